// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "rsma_sgf/summation.hpp"

namespace rsma_sgf {

namespace {

using Extended = boost::multiprecision::cpp_bin_float_50;

// Channel constants promoted to the evaluation type.
template <typename Real>
struct Constants
{
    int k;
    Real p_b, p_f, eps_b, eps_f, eta_b, eta_f;
};

template <typename Real>
Constants<Real> promote(const SystemConfig& c)
{
    if constexpr (std::is_same_v<Real, double>) {
        return {c.k_users(), c.p_b(), c.p_f(), c.eps_b(), c.eps_f(), c.eta_b(), c.eta_f()};
    } else {
        const Real ln2 = boost::math::constants::ln_two<Real>();
        const Real p_b(c.p_b());
        const Real p_f(c.p_f());
        const Real eps_b = boost::math::expm1(Real(c.rate_b()) * ln2);
        const Real eps_f = boost::math::expm1(Real(c.rate_f()) * ln2);
        return {c.k_users(), p_b, p_f, eps_b, eps_f, eps_b / p_b, eps_f / p_f};
    }
}

template <typename Real>
Real binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return Real(std::round(r));
}

template <typename Real>
Real alternating(int i)
{
    return (i % 2 == 0) ? Real(1) : Real(-1);
}

template <typename Real>
Real nu_switch()
{
    if constexpr (std::is_same_v<Real, double>)
        return 1e-8;
    else {
        using std::sqrt;
        return sqrt(std::numeric_limits<Real>::epsilon());
    }
}

template <typename Real>
Real nu_kernel(const Constants<Real>& ch, int ell, const Real& mu)
{
    using std::abs;
    using std::exp;
    const Real c = Real(ell) / (ch.p_f * ch.eta_b) + mu + 1;
    const Real upper = ch.eta_b * (1 + ch.eps_f);
    if (abs(c) * upper < nu_switch<Real>())
        return ch.eps_f * ch.eta_b * (1 - c * ch.eta_b * (1 + ch.eps_f / 2));
    // (e^{-eta_B c} - e^{-eta_B (1+eps_F) c}) / c with the difference taken by expm1.
    return -exp(-ch.eta_b * c) * boost::math::expm1(-ch.eta_b * ch.eps_f * c) / c;
}

template <typename Real>
struct SeriesEval
{
    NeumaierSum<Real> total;
    std::vector<NeumaierSum<Real>> blocks;
};

template <typename Real>
SeriesEval<Real> theorem1_series(const Constants<Real>& ch)
{
    using std::exp;
    using std::pow;
    const int K = ch.k;
    SeriesEval<Real> eval;
    eval.blocks.resize(static_cast<std::size_t>(K) + 2);
    auto add = [&](int block, const Real& term) {
        eval.total += term;
        eval.blocks[static_cast<std::size_t>(block)] += term;
    };

    const Real joint = (1 + ch.eps_b) * (1 + ch.eps_f);  // (1+eps_B)(1+eps_F)
    const Real pf_etab = ch.p_f * ch.eta_b;
    const Real phi0 = Real(K) * Real(K - 1);

    // Q_0: no user in Group I.
    for (int ell = 0; ell <= K; ++ell) {
        const Real mu1 = exp((Real(K) - Real(ell) * joint) / ch.p_f);
        const Real mu2 = Real(K - ell) / pf_etab - ch.p_b * Real(ell) / ch.p_f;
        add(0, phi0 / (Real(K) * Real(K - 1)) * binomial<Real>(K, ell) * alternating<Real>(ell) *
                   mu1 * nu_kernel(ch, 0, mu2));
    }

    // Q_k, 1 <= k <= K-2: k users in Group I.
    for (int k = 1; k <= K - 2; ++k) {
        const Real phik = binomial<Real>(K, k);
        for (int n = 0; n <= K - k; ++n) {
            const Real mu4 = Real(K - k - n) / pf_etab - Real(n) * ch.p_b / ch.p_f;
            for (int ell = 0; ell <= k; ++ell) {
                // e^{ell/P_F} * mu_3 folded into one exponent.
                const Real scale = exp((Real(ell + K - k) - Real(n) * joint) / ch.p_f);
                add(k, phik * binomial<Real>(K - k, n) * binomial<Real>(k, ell) *
                           alternating<Real>(n + ell) * scale * nu_kernel(ch, ell, mu4));
            }
        }
    }

    // Q_{K-1}: only the strongest user in Group II.
    {
        const Real mu5 = 1 / pf_etab;
        const Real mu6 = -ch.p_b / ch.p_f;
        for (int ell = 0; ell <= K - 1; ++ell) {
            const Real w = phi0 / Real(K - 1) * binomial<Real>(K - 1, ell) * alternating<Real>(ell);
            add(K - 1, w * exp(Real(ell + 1) / ch.p_f) * nu_kernel(ch, ell, mu5));
            add(K - 1, -w * exp((Real(ell) - (joint - 1)) / ch.p_f) * nu_kernel(ch, ell, mu6));
        }
    }

    // Q_K: every user in Group I.
    for (int ell = 0; ell <= K; ++ell)
        add(K, binomial<Real>(K, ell) * alternating<Real>(ell) * exp(Real(ell) / ch.p_f) *
                   nu_kernel(ch, ell, Real(0)));
    add(K, pow(-boost::math::expm1(-ch.eta_f), K) * exp(-ch.eta_b * (1 + ch.eps_f)));

    // Q_{K+1}: GB already in outage, tau = 0.
    for (int ell = 0; ell <= K; ++ell) {
        const Real a = 1 + Real(ell) * ch.eta_f * ch.p_b;
        add(K + 1, binomial<Real>(K, ell) * alternating<Real>(ell) * exp(-Real(ell) * ch.eta_f) *
                       -boost::math::expm1(-a * ch.eta_b) / a);
    }
    return eval;
}

template <typename Real>
NeumaierSum<Real> corollary1_series(const Constants<Real>& ch)
{
    using std::exp;
    NeumaierSum<Real> sum;
    const Real mu6 = -ch.p_b / ch.p_f;
    sum += Real(1);
    sum += -exp(-(ch.eps_b + ch.eps_f + ch.eps_b * ch.eps_f) / ch.p_f) * nu_kernel(ch, 0, mu6);
    sum += -exp(-ch.eta_f - ch.eta_b * (1 + ch.eps_f));
    sum += exp(-ch.eta_f) * boost::math::expm1(-ch.eta_b - ch.eps_b * ch.eta_f) /
           (1 + ch.p_b * ch.eta_f);
    return sum;
}

template <typename Real>
AnalyticResult finish(const NeumaierSum<Real>& sum, Method method, Precision precision)
{
    AnalyticResult r;
    r.method = method;
    r.precision = precision;
    r.raw_value = static_cast<double>(sum.value());
    r.condition_flag = static_cast<double>(sum.condition());
    r.machine_epsilon = static_cast<double>(std::numeric_limits<Real>::epsilon());
    const double tol =
        8.0 * static_cast<double>(sum.terms()) * r.machine_epsilon * static_cast<double>(sum.max_abs_term());
    r.out_of_range = r.raw_value < -tol || r.raw_value > 1.0 + tol;
    r.value = std::clamp(r.raw_value, 0.0, 1.0);
    return r;
}

void require_k(const SystemConfig& config, bool ok, const char* what, const char* need)
{
    if (!ok)
        throw PreconditionError(fmt::format("{} requires {}, got K={}", what, need, config.k_users()));
}

template <typename Eval>
AnalyticResult with_precision(Precision precision, Eval&& eval)
{
    switch (precision) {
    case Precision::Double:
        return eval(double{});
    case Precision::Extended:
        return eval(Extended{});
    case Precision::Auto: {
        auto r = eval(double{});
        if (r.trusted())
            return r;
        auto e = eval(Extended{});
        e.note = fmt::format("re-evaluated in extended precision (double condition {:.3g})",
                             r.condition_flag);
        return e;
    }
    }
    throw std::logic_error("unhandled Precision");
}

} // namespace

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::Theorem1:
        return "theorem1";
    case Method::Corollary1:
        return "corollary1";
    case Method::Theorem2:
        return "theorem2";
    case Method::Corollary2:
        return "corollary2";
    case Method::Corollary3:
        return "corollary3";
    case Method::Quadrature:
        return "quadrature";
    }
    return "unknown";
}

double nu(const SystemConfig& config, const NuArgs& args)
{
    return nu_kernel(promote<double>(config), args.ell, args.mu);
}

AnalyticResult theorem1_pout(const SystemConfig& config, Precision precision)
{
    require_k(config, config.k_users() >= 2, "theorem1_pout", "K >= 2 (use corollary1_pout for K = 1)");
    return with_precision(precision, [&](auto tag) {
        using Real = decltype(tag);
        const auto eval = theorem1_series(promote<Real>(config));
        return finish(eval.total, Method::Theorem1,
                      std::is_same_v<Real, double> ? Precision::Double : Precision::Extended);
    });
}

std::vector<ClosedFormBlock> theorem1_blocks(const SystemConfig& config, Precision precision)
{
    require_k(config, config.k_users() >= 2, "theorem1_blocks", "K >= 2");
    auto collect = [&](auto tag) {
        using Real = decltype(tag);
        const auto eval = theorem1_series(promote<Real>(config));
        std::vector<ClosedFormBlock> out;
        for (std::size_t i = 0; i < eval.blocks.size(); ++i)
            out.push_back({static_cast<int>(i), static_cast<double>(eval.blocks[i].value()),
                           static_cast<double>(eval.blocks[i].condition())});
        return out;
    };
    if (precision == Precision::Double)
        return collect(double{});
    if (precision == Precision::Extended)
        return collect(Extended{});
    auto blocks = collect(double{});
    const bool all_ok = std::all_of(blocks.begin(), blocks.end(), [](const ClosedFormBlock& b) {
        return b.condition_flag * std::numeric_limits<double>::epsilon() < 1e-3;
    });
    return all_ok ? blocks : collect(Extended{});
}

AnalyticResult corollary1_pout(const SystemConfig& config, Precision precision)
{
    require_k(config, config.k_users() == 1, "corollary1_pout", "K = 1");
    return with_precision(precision, [&](auto tag) {
        using Real = decltype(tag);
        return finish(corollary1_series(promote<Real>(config)), Method::Corollary1,
                      std::is_same_v<Real, double> ? Precision::Double : Precision::Extended);
    });
}

AnalyticResult theorem2_approx(const SystemConfig& config)
{
    require_k(config, config.k_users() >= 2, "theorem2_approx", "K >= 2");
    const int K = config.k_users();
    const double P = config.p_f();
    const double eb = config.eps_b();
    const double ef = config.eps_f();
    const double phi0 = static_cast<double>(K) * (K - 1);
    const double pk1 = std::pow(P, K + 1);
    const double efk = std::pow(ef, K);

    NeumaierSum<double> sum;

    // Q_0 block.
    {
        NeumaierSum<double> inner;
        for (int ell = 0; ell <= K; ++ell)
            inner += binomial<double>(K, ell) * alternating<double>(ell) / (ell + 1) *
                     (std::pow(1 + ef, K + 1) - std::pow(1 + ef, K - ell));
        sum += phi0 * eb * std::pow(1 + eb, K) / (pk1 * K * (K - 1)) * inner.value();
    }
    // Q_k blocks, summed over 1 <= k <= K-2.
    for (int k = 1; k <= K - 2; ++k) {
        NeumaierSum<double> inner;
        for (int n = 0; n <= K - k; ++n)
            for (int ell = 0; ell <= k; ++ell)
                inner += binomial<double>(K - k, n) * alternating<double>(n) *
                         std::pow(1 + ef, K - k - n) * binomial<double>(k, ell) *
                         alternating<double>(ell) * (std::pow(1 + ef, n + ell + 1) - 1) /
                         (n + ell + 1);
        sum += binomial<double>(K, k) * eb * std::pow(1 + eb, K - k) * alternating<double>(k) / pk1 *
               inner.value();
    }
    // Q_{K-1} block.
    sum += phi0 * eb * efk * (1 + eb) * (1 + ef) / (pk1 * K * (K - 1));
    sum += -phi0 * efk * (1 / eb + 1) * (K * (1 + ef) + 1) / (pk1 * K * (K - 1) * (K + 1));
    // Q_K block; eps_F^K / P_F^K is the leading term.
    sum += eb * std::pow(ef, K + 1) / ((K + 1) * pk1);
    sum += efk / std::pow(P, K);
    sum += -eb * efk * (1 + ef) / pk1;
    // Q_{K+1} block.
    sum += efk * (std::pow(1 + eb, K + 1) - 1) / (pk1 * (K + 1));
    sum += -efk * ((eb * (K + 1) - 1) * std::pow(1 + eb, K + 1) + 1) /
           (std::pow(P, K + 2) * (K + 2) * (K + 1));

    auto r = finish(sum, Method::Theorem2, Precision::Double);
    if (std::abs(config.p_b() - config.p_f()) > 1e-12 * config.p_f())
        r.note = "theorem2 assumes P_B = P_F; evaluated with P_F";
    return r;
}

AnalyticResult corollary2_approx(const SystemConfig& config)
{
    require_k(config, config.k_users() >= 2, "corollary2_approx", "K >= 2");
    NeumaierSum<double> sum;
    sum += std::pow(config.eps_f() / config.p_f(), config.k_users());
    return finish(sum, Method::Corollary2, Precision::Double);
}

AnalyticResult corollary3_approx(const SystemConfig& config)
{
    require_k(config, config.k_users() == 1, "corollary3_approx", "K = 1");
    NeumaierSum<double> sum;
    sum += config.eps_f() / config.p_f();
    return finish(sum, Method::Corollary3, Precision::Double);
}

} // namespace rsma_sgf
