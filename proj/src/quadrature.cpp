// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/quadrature.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace rsma_sgf {

namespace {

struct Panel
{
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b)
{
    double error = 0.0;
    double l1 = 0.0;
    // max_depth = 0: a single Kronrod panel with its embedded Gauss estimate.
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &error, &l1);
    // The Gauss/Kronrod difference can fall below rounding; floor it there.
    error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * l1);
    return {a, b, value, error};
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument(
            fmt::format("quadrature tolerances must be positive (abs={}, rel={})", abs_tol, rel_tol));
    if (max_subdivisions < 1)
        throw std::invalid_argument(
            fmt::format("max_subdivisions must be positive, got {}", max_subdivisions));
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSpec& spec)
{
    QuadratureResult result;
    if (!(b > a))
        return result;

    std::priority_queue<Panel> panels;
    panels.push(evaluate_panel(f, a, b));
    double total = panels.top().value;
    double error = panels.top().error;

    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (result.subdivisions >= spec.max_subdivisions) {
            result.converged = false;
            break;
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++result.subdivisions;
    }

    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    result.value = total;
    result.est_error = error;
    return result;
}

} // namespace rsma_sgf
