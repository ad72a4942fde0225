// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rsma_sgf/channel.hpp"

namespace rsma_sgf {

namespace {

constexpr double kTailSpan = 40.0;

// One level of a nested integral. `worst_error` is the largest error any call
// at this level reported, including what its inner level passed up.
struct Level
{
    QuadratureSpec spec;
    double worst_error = 0.0;
    bool converged = true;
};

template <typename F>
double integrate_level(Level& self, const Level* inner, F&& f, double a, double b)
{
    const auto r = integrate(std::function<double(double)>(std::forward<F>(f)), a, b, self.spec);
    double err = r.est_error;
    if (inner != nullptr && b > a)
        err += (b - a) * inner->worst_error;
    self.worst_error = std::max(self.worst_error, err);
    self.converged = self.converged && r.converged;
    return r.value;
}

// The outer tolerance is split evenly across the nesting levels.
std::vector<Level> make_levels(const QuadratureSpec& spec, int depth)
{
    spec.validate();
    QuadratureSpec per = spec;
    per.abs_tol /= depth;
    per.rel_tol /= depth;
    return std::vector<Level>(static_cast<std::size_t>(depth), Level{per});
}

QTermValue finish_term(int index, double value, const std::vector<Level>& levels,
                       const char* what)
{
    for (const auto& level : levels)
        if (!level.converged)
            throw QuadratureError(fmt::format("{} did not converge within {} subdivisions", what,
                                              level.spec.max_subdivisions));
    return {index, value, levels.front().worst_error};
}

struct Bounds
{
    double eta_b, eps_f, p_b, p_f, joint_minus_1;

    explicit Bounds(const SystemConfig& c)
        : eta_b(c.eta_b()), eps_f(c.eps_f()), p_b(c.p_b()), p_f(c.p_f()),
          joint_minus_1(c.eps_b() + c.eps_f() + c.eps_b() * c.eps_f())
    {
    }

    double window_hi() const { return eta_b * (1.0 + eps_f); }
    double lower(double x) const { return (x / eta_b - 1.0) / p_f; }
    double upper(double x) const { return (joint_minus_1 - p_b * x) / p_f; }
};

// e^{-a} - e^{-b} for a <= b.
double exp_diff(double a, double b)
{
    return -std::exp(-a) * std::expm1(a - b);
}

double falling_ratio(int n, int k)
{
    // n! / k!
    double r = 1.0;
    for (int i = k + 1; i <= n; ++i)
        r *= i;
    return r;
}

} // namespace

QTermValue q0_quadrature(const SystemConfig& config, const QuadratureSpec& spec,
                         const OracleOptions& options)
{
    const int K = config.k_users();
    if (K < 2)
        throw PreconditionError(fmt::format("q0_quadrature requires K >= 2, got K={}", K));
    if (!(options.q0_window_extension >= 0.0))
        throw PreconditionError("q0_window_extension must be nonnegative");
    const Bounds bd(config);
    const double phi0 = static_cast<double>(K) * (K - 1);
    const double x_hi = bd.window_hi() + options.q0_window_extension;

    if (options.analytic_inner) {
        auto lv = make_levels(spec, 2);
        auto s0 = [&](double x) {
            const double lo = bd.lower(x);
            const double hi = bd.upper(x);
            // Integral over v in (u, hi) of the min/max density.
            auto g = [&](double u) {
                return phi0 * std::exp(-u) * std::pow(exp_diff(u, hi), K - 1) / (K - 1);
            };
            return std::exp(-x) * integrate_level(lv[1], nullptr, g, lo, hi);
        };
        const double v = integrate_level(lv[0], &lv[1], s0, bd.eta_b, x_hi);
        return finish_term(0, v, lv, "q0_quadrature");
    }

    auto lv = make_levels(spec, 3);
    auto s0 = [&](double x) {
        const double lo = bd.lower(x);
        const double hi = bd.upper(x);
        auto g = [&](double u) {
            auto h = [&](double v) { return min_max_joint_pdf(u, v, K); };
            return integrate_level(lv[2], nullptr, h, u, hi);
        };
        return std::exp(-x) * integrate_level(lv[1], &lv[2], g, lo, hi);
    };
    const double v = integrate_level(lv[0], &lv[1], s0, bd.eta_b, x_hi);
    return finish_term(0, v, lv, "q0_quadrature");
}

QTermValue qk_quadrature(const SystemConfig& config, int k, const QuadratureSpec& spec,
                         const OracleOptions& options)
{
    const int K = config.k_users();
    if (k < 1 || k > K - 2)
        throw PreconditionError(
            fmt::format("qk_quadrature requires 1 <= k <= K-2, got k={} with K={}", k, K));
    const Bounds bd(config);

    if (options.analytic_inner) {
        // K! / ((k-1)! (K-k-2)!) with the z integral done in closed form.
        const double phik = falling_ratio(K, k - 1) / falling_ratio(K - k - 2, 1);
        auto lv = make_levels(spec, 3);
        auto sk = [&](double x) {
            const double lo = bd.lower(x);
            const double hi = bd.upper(x);
            auto over_xp = [&](double xp) {
                auto over_y = [&](double y) {
                    return std::exp(-y) * std::pow(exp_diff(y, hi), K - k - 1) / (K - k - 1);
                };
                const double wx = std::exp(-xp) * std::pow(-std::expm1(-xp), k - 1);
                return phik * wx * integrate_level(lv[2], nullptr, over_y, lo, hi);
            };
            return std::exp(-x) * integrate_level(lv[1], &lv[2], over_xp, 0.0, lo);
        };
        const double v = integrate_level(lv[0], &lv[1], sk, bd.eta_b, bd.window_hi());
        return finish_term(k, v, lv, "qk_quadrature");
    }

    auto lv = make_levels(spec, 4);
    auto sk = [&](double x) {
        const double lo = bd.lower(x);
        const double hi = bd.upper(x);
        auto over_xp = [&](double xp) {
            auto over_y = [&](double y) {
                auto over_z = [&](double z) { return interior_pair_max_joint_pdf(xp, y, z, k, K); };
                return integrate_level(lv[3], nullptr, over_z, y, hi);
            };
            return integrate_level(lv[2], &lv[3], over_y, lo, hi);
        };
        return std::exp(-x) * integrate_level(lv[1], &lv[2], over_xp, 0.0, lo);
    };
    const double v = integrate_level(lv[0], &lv[1], sk, bd.eta_b, bd.window_hi());
    return finish_term(k, v, lv, "qk_quadrature");
}

QTermValue qk_minus1_quadrature(const SystemConfig& config, const QuadratureSpec& spec,
                                const OracleOptions& options)
{
    const int K = config.k_users();
    if (K < 2)
        throw PreconditionError(fmt::format("qk_minus1_quadrature requires K >= 2, got K={}", K));
    const Bounds bd(config);

    if (options.analytic_inner) {
        const double phi0 = static_cast<double>(K) * (K - 1);
        auto lv = make_levels(spec, 2);
        auto s = [&](double x) {
            const double lo = bd.lower(x);
            const double hi = bd.upper(x);
            const double top = exp_diff(lo, hi);
            auto g = [&](double u) {
                return phi0 * std::exp(-u) * std::pow(-std::expm1(-u), K - 2) * top;
            };
            return std::exp(-x) * integrate_level(lv[1], nullptr, g, 0.0, lo);
        };
        const double v = integrate_level(lv[0], &lv[1], s, bd.eta_b, bd.window_hi());
        return finish_term(K - 1, v, lv, "qk_minus1_quadrature");
    }

    auto lv = make_levels(spec, 3);
    auto s = [&](double x) {
        const double lo = bd.lower(x);
        const double hi = bd.upper(x);
        auto g = [&](double u) {
            auto h = [&](double v) { return top_pair_joint_pdf(u, v, K); };
            return integrate_level(lv[2], nullptr, h, lo, hi);
        };
        return std::exp(-x) * integrate_level(lv[1], &lv[2], g, 0.0, lo);
    };
    const double v = integrate_level(lv[0], &lv[1], s, bd.eta_b, bd.window_hi());
    return finish_term(K - 1, v, lv, "qk_minus1_quadrature");
}

namespace {

// Pr(|h_K|^2 < eta_F) over |h_B|^2 beyond the window: closed form, or the
// integral truncated kTailSpan past the window edge.
QTermValue tail_term(const SystemConfig& config, const QuadratureSpec& spec,
                     const OracleOptions& options)
{
    const Bounds bd(config);
    const int K = config.k_users();
    const double cdf = max_gain_cdf(config.eta_f(), K);
    if (options.analytic_inner)
        return {K, cdf * std::exp(-bd.window_hi()), 0.0};
    auto lv = make_levels(spec, 1);
    auto tail = [&](double x) { return cdf * std::exp(-x); };
    const double v =
        integrate_level(lv[0], nullptr, tail, bd.window_hi(), bd.window_hi() + kTailSpan);
    auto t = finish_term(K, v, lv, "Q_K tail quadrature");
    t.est_error += cdf * std::exp(-bd.window_hi() - kTailSpan);
    return t;
}

// Q_{K+1}: GB already in outage, tau = 0.
QTermValue below_window_term(const SystemConfig& config, const QuadratureSpec& spec)
{
    const Bounds bd(config);
    const int K = config.k_users();
    auto lv = make_levels(spec, 1);
    auto below = [&](double x) {
        return std::exp(-x) * max_gain_cdf(bd.eps_f * (1.0 + bd.p_b * x) / bd.p_f, K);
    };
    const double v = integrate_level(lv[0], nullptr, below, 0.0, bd.eta_b);
    return finish_term(K + 1, v, lv, "Q_{K+1} quadrature");
}

} // namespace

std::pair<QTermValue, QTermValue> qK_and_qKplus1_quadrature(const SystemConfig& config,
                                                            const QuadratureSpec& spec,
                                                            const OracleOptions& options)
{
    const int K = config.k_users();
    const Bounds bd(config);

    // Inside the window every user sits below the Group I bound.
    auto lv = make_levels(spec, 1);
    auto in_window = [&](double x) { return std::exp(-x) * max_gain_cdf(bd.lower(x), K); };
    const double v = integrate_level(lv[0], nullptr, in_window, bd.eta_b, bd.window_hi());
    QTermValue q_k = finish_term(K, v, lv, "Q_K quadrature");
    const QTermValue tail = tail_term(config, spec, options);
    q_k.value += tail.value;
    q_k.est_error += tail.est_error;

    return {q_k, below_window_term(config, spec)};
}

std::vector<QTermValue> q_terms(const SystemConfig& config, const QuadratureSpec& spec,
                                const OracleOptions& options)
{
    const int K = config.k_users();
    if (K < 2)
        throw PreconditionError(fmt::format("q_terms requires K >= 2, got K={}", K));
    std::vector<QTermValue> out;
    out.push_back(q0_quadrature(config, spec, options));
    for (int k = 1; k <= K - 2; ++k)
        out.push_back(qk_quadrature(config, k, spec, options));
    out.push_back(qk_minus1_quadrature(config, spec, options));
    auto [qk, qk1] = qK_and_qKplus1_quadrature(config, spec, options);
    out.push_back(qk);
    out.push_back(qk1);
    return out;
}

namespace {

// Single GF user: Pr(g < U) inside the window, Pr(g < eta_F) beyond it, and
// the tau = 0 term below eta_B.
AnalyticResult single_user_pout(const SystemConfig& config, const QuadratureSpec& spec,
                                const OracleOptions& options)
{
    const Bounds bd(config);
    auto lv = make_levels(spec, 1);
    auto window = [&](double x) { return std::exp(-x) * -std::expm1(-bd.upper(x)); };
    const QTermValue first = finish_term(
        0, integrate_level(lv[0], nullptr, window, bd.eta_b, bd.window_hi()), lv,
        "single-user window quadrature");
    const QTermValue tail = tail_term(config, spec, options);
    const QTermValue below = below_window_term(config, spec);

    AnalyticResult r;
    r.method = Method::Quadrature;
    r.raw_value = first.value + tail.value + below.value;
    r.value = std::clamp(r.raw_value, 0.0, 1.0);
    r.est_error = first.est_error + tail.est_error + below.est_error;
    r.machine_epsilon = std::numeric_limits<double>::epsilon();
    r.note = "single-user three-integral route";
    return r;
}

} // namespace

AnalyticResult assemble_pout(const SystemConfig& config, const QuadratureSpec& spec,
                             const OracleOptions& options)
{
    if (config.k_users() == 1)
        return single_user_pout(config, spec, options);
    const auto terms = q_terms(config, spec, options);
    AnalyticResult r;
    r.method = Method::Quadrature;
    for (const auto& t : terms) {
        r.raw_value += t.value;
        r.est_error += t.est_error;
    }
    r.value = std::clamp(r.raw_value, 0.0, 1.0);
    r.machine_epsilon = std::numeric_limits<double>::epsilon();
    r.out_of_range = r.raw_value > 1.0 + r.est_error;
    return r;
}

std::optional<int> q_event_index(const SystemConfig& config, double g_b,
                                 std::span<const double> sorted_gf)
{
    const int K = config.k_users();
    if (static_cast<int>(sorted_gf.size()) != K || K < 1)
        throw PreconditionError(fmt::format("q_event_index expects {} gains, got {}", K,
                                            sorted_gf.size()));
    const double strongest = config.p_f() * sorted_gf.back();
    if (g_b <= config.eta_b()) {
        if (strongest < config.eps_f() * (1.0 + config.p_b() * g_b))
            return K + 1;
        return std::nullopt;
    }
    const double lower = (g_b / config.eta_b() - 1.0) / config.p_f();
    const int m = static_cast<int>(
        std::upper_bound(sorted_gf.begin(), sorted_gf.end(), lower) - sorted_gf.begin());
    if (m == K)
        return strongest < config.eps_f() ? std::optional<int>(K) : std::nullopt;
    const double joint_minus_1 =
        config.eps_b() + config.eps_f() + config.eps_b() * config.eps_f();
    if (strongest < joint_minus_1 - config.p_b() * g_b)
        return m;
    return std::nullopt;
}

} // namespace rsma_sgf
