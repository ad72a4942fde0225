// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rsma_sgf/config.hpp"

namespace rsma_sgf {

using Engine = std::mt19937_64;

/// SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Random stream for one worker chunk.
///
/// The GB gain and the GF gains come from separate engines so the GB sequence
/// does not depend on K. Both engines are seeded from SplitMix64 started at
/// master_seed ^ stream_index.
class ChannelRng
{
  public:
    ChannelRng(std::uint64_t master_seed, std::uint64_t stream_index);

    /// Unit-mean exponential by inversion of a 53-bit uniform.
    double exponential_gb() { return draw_exponential(gb_); }
    double exponential_gf() { return draw_exponential(gf_); }

  private:
    static double draw_exponential(Engine& engine);

    Engine gb_;
    Engine gf_;
};

/// Channel gains of one transmission block: |h_B|^2 and the K GF gains in
/// ascending order.
struct ChannelRealization
{
    double g_b = 0.0;
    std::vector<double> g_f;

    double strongest_gf() const { return g_f.back(); }
};

ChannelRealization sample_realization(const SystemConfig& config, ChannelRng& rng);

/// Allocation-free variant for hot loops; reuses `out.g_f` storage.
void sample_realization(const SystemConfig& config, ChannelRng& rng, ChannelRealization& out);

/// Joint density of (|h_1|^2, |h_K|^2), the minimum and maximum of K
/// unit-mean exponentials. Zero outside 0 <= x < y.
double min_max_joint_pdf(double x, double y, int k_users);

/// Joint density of (|h_k|^2, |h_{k+1}|^2, |h_K|^2) for 1 <= k <= K-2.
/// Zero outside 0 <= x <= y <= z.
double interior_pair_max_joint_pdf(double x, double y, double z, int k, int k_users);

/// Joint density of the two largest gains (|h_{K-1}|^2, |h_K|^2), K >= 2.
/// Zero outside 0 <= x <= y.
double top_pair_joint_pdf(double x, double y, int k_users);

/// Pr(|h_K|^2 < t) = (1 - e^{-t})^K; zero for t <= 0.
double max_gain_cdf(double t, int k_users);

} // namespace rsma_sgf
