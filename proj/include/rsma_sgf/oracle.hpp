// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <utility>

#include "rsma_sgf/analytic.hpp"
#include "rsma_sgf/config.hpp"
#include "rsma_sgf/quadrature.hpp"

namespace rsma_sgf {

// Brute-force evaluation of the disjoint outage events Q_0 .. Q_{K+1} by
// nested quadrature over the order-statistic densities.
//
// Throughout, x = |h_B|^2 and the h_B window is eta_B < x < eta_B (1 + eps_F),
// where the Group I bound L(x) = (x / eta_B - 1) / P_F stays below the rate
// bound U(x) = ((1 + eps_B)(1 + eps_F) - 1 - P_B x) / P_F.

struct QTermValue
{
    int index = 0;
    double value = 0.0;
    double est_error = 0.0;
};

struct OracleOptions
{
    /// Use the exponential antiderivatives for the innermost integral (and the
    /// closed tail of Q_K). Off integrates everything numerically.
    bool analytic_inner = true;
    /// Extends the upper h_B limit of Q_0 by this amount; the inner region is
    /// clamped to empty where U(x) <= L(x).
    double q0_window_extension = 0.0;
};

QTermValue q0_quadrature(const SystemConfig& config, const QuadratureSpec& spec,
                         const OracleOptions& options = {});

/// 1 <= k <= K - 2.
QTermValue qk_quadrature(const SystemConfig& config, int k, const QuadratureSpec& spec,
                         const OracleOptions& options = {});

QTermValue qk_minus1_quadrature(const SystemConfig& config, const QuadratureSpec& spec,
                                const OracleOptions& options = {});

/// (Q_K, Q_{K+1}); valid for every K >= 1.
std::pair<QTermValue, QTermValue> qK_and_qKplus1_quadrature(const SystemConfig& config,
                                                            const QuadratureSpec& spec,
                                                            const OracleOptions& options = {});

/// All K + 2 terms in index order, K >= 2.
std::vector<QTermValue> q_terms(const SystemConfig& config, const QuadratureSpec& spec,
                                const OracleOptions& options = {});

/// Sum of the Q terms (K >= 2) or the three single-user integrals (K = 1).
/// Throws QuadratureError when any component fails to converge.
AnalyticResult assemble_pout(const SystemConfig& config, const QuadratureSpec& spec,
                             const OracleOptions& options = {});

/// Index of the outage event a realization falls into, or nullopt when the
/// admitted GF user is not in outage. `sorted_gf` is ascending.
std::optional<int> q_event_index(const SystemConfig& config, double g_b,
                                 std::span<const double> sorted_gf);

} // namespace rsma_sgf
