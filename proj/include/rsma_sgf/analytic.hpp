// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rsma_sgf/config.hpp"

namespace rsma_sgf {

enum class Method { Theorem1, Corollary1, Theorem2, Corollary2, Corollary3, Quadrature };

std::string_view to_string(Method method);

/// Arithmetic used for the closed forms. `Extended` is a 50-digit software
/// float for verification; `Auto` evaluates in double and re-evaluates in
/// extended precision when the double result is not trusted.
enum class Precision { Double, Extended, Auto };

/// A closed-form, approximate, or quadrature outage value.
struct AnalyticResult
{
    double value = 0.0;      ///< clamped to [0, 1]
    double raw_value = 0.0;  ///< before clamping
    Method method = Method::Theorem1;
    /// max |term| / |sum| over the evaluated series; >= 1.
    double condition_flag = 1.0;
    /// Machine epsilon of the arithmetic actually used (2^-52 for double).
    double machine_epsilon = 0.0;
    Precision precision = Precision::Double;
    /// Raw value fell outside [-tol, 1 + tol] with tol derived from the
    /// rounding error bound of the series.
    bool out_of_range = false;
    /// Quadrature error estimate; zero for closed forms.
    double est_error = 0.0;
    std::string note;

    /// Cancellation left at least three correct significant digits:
    /// condition_flag * machine_epsilon < 1e-3.
    bool trusted() const { return condition_flag * machine_epsilon < 1e-3; }
};

/// Arguments of the expectation kernel nu(ell, mu); the channel constants come
/// from the SystemConfig it is evaluated against.
struct NuArgs
{
    int ell = 0;
    double mu = 0.0;
};

/// Integral of e^{-c x} over x in (eta_B, eta_B (1 + eps_F)) with
/// c = ell / (P_F eta_B) + mu + 1. Switches to a first-order expansion about
/// c = 0 when |c| eta_B (1 + eps_F) < 1e-8.
double nu(const SystemConfig& config, const NuArgs& args);

/// Exact outage of the admitted GF user, K >= 2.
AnalyticResult theorem1_pout(const SystemConfig& config, Precision precision = Precision::Double);

/// Exact outage of a single GF user, K = 1.
AnalyticResult corollary1_pout(const SystemConfig& config, Precision precision = Precision::Double);

/// High-SNR expansion for K >= 2, derived for P_B = P_F (sets `note` otherwise).
AnalyticResult theorem2_approx(const SystemConfig& config);

/// (eps_F / P_F)^K for K >= 2.
AnalyticResult corollary2_approx(const SystemConfig& config);

/// eps_F / P_F for K = 1.
AnalyticResult corollary3_approx(const SystemConfig& config);

/// Closed-form value of one disjoint outage event Q_index, index in [0, K+1].
struct ClosedFormBlock
{
    int index = 0;
    double value = 0.0;
    double condition_flag = 1.0;
};

/// The K + 2 summands of the exact outage, in index order. K >= 2.
std::vector<ClosedFormBlock> theorem1_blocks(const SystemConfig& config,
                                             Precision precision = Precision::Double);

} // namespace rsma_sgf
