// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/channel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include <fmt/format.h>

namespace rsma_sgf {

namespace {

// n! / d! for d <= n, exact in double for the K range in use.
double falling_ratio(int n, int d)
{
    double r = 1.0;
    for (int i = d + 1; i <= n; ++i)
        r *= i;
    return r;
}

double factorial(int n)
{
    return falling_ratio(n, 0);
}

// e^{-a} - e^{-b} for a <= b without cancellation.
double exp_gap(double a, double b)
{
    return -std::exp(-a) * std::expm1(-(b - a));
}

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ChannelRng::ChannelRng(std::uint64_t master_seed, std::uint64_t stream_index)
{
    std::uint64_t state = master_seed ^ stream_index;
    gb_.seed(splitmix64(state));
    gf_.seed(splitmix64(state));
}

double ChannelRng::draw_exponential(Engine& engine)
{
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return -std::log1p(-u);
}

ChannelRealization sample_realization(const SystemConfig& config, ChannelRng& rng)
{
    ChannelRealization out;
    sample_realization(config, rng, out);
    return out;
}

void sample_realization(const SystemConfig& config, ChannelRng& rng, ChannelRealization& out)
{
    const auto k = static_cast<std::size_t>(config.k_users());
    out.g_b = rng.exponential_gb();
    out.g_f.resize(k);
    for (auto& g : out.g_f)
        g = rng.exponential_gf();
    std::sort(out.g_f.begin(), out.g_f.end());
    assert(std::is_sorted(out.g_f.begin(), out.g_f.end()));
}

double min_max_joint_pdf(double x, double y, int k_users)
{
    if (k_users < 2)
        throw PreconditionError(fmt::format("min_max_joint_pdf needs K >= 2, got {}", k_users));
    if (x < 0.0 || y < 0.0 || x >= y)
        return 0.0;
    const double phi0 = falling_ratio(k_users, k_users - 2);
    return phi0 * std::exp(-x) * std::pow(exp_gap(x, y), k_users - 2) * std::exp(-y);
}

double interior_pair_max_joint_pdf(double x, double y, double z, int k, int k_users)
{
    if (k < 1 || k > k_users - 2)
        throw PreconditionError(
            fmt::format("interior_pair_max_joint_pdf needs 1 <= k <= K-2, got k={} K={}", k, k_users));
    if (x < 0.0 || x > y || y > z)
        return 0.0;
    const double phi = factorial(k_users) / (factorial(k - 1) * factorial(k_users - k - 2));
    return phi * std::exp(-x) * std::pow(-std::expm1(-x), k - 1) * std::exp(-y) *
           std::pow(exp_gap(y, z), k_users - k - 2) * std::exp(-z);
}

double top_pair_joint_pdf(double x, double y, int k_users)
{
    if (k_users < 2)
        throw PreconditionError(fmt::format("top_pair_joint_pdf needs K >= 2, got {}", k_users));
    if (x < 0.0 || x > y)
        return 0.0;
    const double phi0 = falling_ratio(k_users, k_users - 2);
    return phi0 * std::exp(-x) * std::pow(-std::expm1(-x), k_users - 2) * std::exp(-y);
}

double max_gain_cdf(double t, int k_users)
{
    if (t <= 0.0)
        return 0.0;
    return std::pow(-std::expm1(-t), k_users);
}

} // namespace rsma_sgf
