// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>

namespace rsma_sgf {

struct QuadratureSpec
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;

    void validate() const;
};

struct QuadratureResult
{
    double value = 0.0;
    double est_error = 0.0;
    int subdivisions = 0;
    bool converged = true;
};

class QuadratureError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Globally adaptive 21-point Gauss-Kronrod integration: the panel with the
/// largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |value|) or the subdivision budget runs out
/// (reported through `converged`, not thrown). An empty interval (b <= a)
/// integrates to zero.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec);

} // namespace rsma_sgf
