// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsma_sgf/config.hpp"
#include "rsma_sgf/protocol.hpp"

namespace rsma_sgf {

struct SimulationOptions
{
    /// Worker count; 0 picks RSMA_SGF_THREADS or the hardware concurrency.
    unsigned threads = 0;
    /// Confidence multiplier for ci_halfwidth.
    double z = 3.0;
    /// Wilson score interval instead of the normal approximation.
    bool wilson = false;
    /// Double the trial count until ci_halfwidth < 0.1 p_hat or trial_cap.
    bool auto_escalate = false;
    std::uint64_t trial_cap = 100'000'000;
    /// Trials per RNG stream. Results depend on it, the worker count does not.
    std::uint64_t chunk_size = 1u << 16;
};

/// Worker count used when SimulationOptions::threads is 0.
unsigned default_thread_count();

struct OutageEstimate
{
    double p_hat = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t events = 0;
    double ci_halfwidth = 0.0;
    SchemeKind scheme = SchemeKind::RsmaSgf;
};

struct ErgodicRateEstimate
{
    double mean_rate_gf = 0.0;
    double mean_rate_sum = 0.0;
    std::uint64_t trials = 0;
    double std_error = 0.0;      ///< of mean_rate_gf
    double std_error_sum = 0.0;  ///< of mean_rate_sum
};

/// Everything one pass over the blocks accumulates.
struct BlockTally
{
    std::uint64_t trials = 0;
    std::uint64_t gf_outages = 0;
    std::uint64_t gb_outages = 0;
    double sum_gf = 0.0;
    double sum_sq_gf = 0.0;
    double sum_total = 0.0;
    double sum_sq_total = 0.0;

    void merge(const BlockTally& other);
};

/// Runs `trials` blocks of `scheme`; chunk c draws from ChannelRng(seed, c).
BlockTally simulate_blocks(const SystemConfig& config, SchemeKind scheme, std::uint64_t trials,
                           std::uint64_t seed, const SimulationOptions& options = {});

/// Binomial estimate from a count, with the interval chosen by `options`.
OutageEstimate make_outage_estimate(std::uint64_t events, std::uint64_t trials, SchemeKind scheme,
                                    const SimulationOptions& options = {});

OutageEstimate estimate_outage(const SystemConfig& config, SchemeKind scheme, std::uint64_t trials,
                               std::uint64_t seed, const SimulationOptions& options = {});

OutageEstimate estimate_gb_outage(const SystemConfig& config, SchemeKind scheme,
                                  std::uint64_t trials, std::uint64_t seed,
                                  const SimulationOptions& options = {});

ErgodicRateEstimate estimate_ergodic(const SystemConfig& config, SchemeKind scheme,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const SimulationOptions& options = {});

/// Counts of the outage events Q_0 .. Q_{K+1} (RSMA-SGF, index from
/// q_event_index) plus the GF outage count from run_block on the same blocks.
struct QEventTally
{
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t gf_outages = 0;
    /// Blocks where the classifier and run_block disagree; zero when consistent.
    std::uint64_t mismatches = 0;
};

QEventTally count_q_events(const SystemConfig& config, std::uint64_t trials, std::uint64_t seed,
                           const SimulationOptions& options = {});

struct SweepPoint
{
    SystemConfig config;
    std::optional<OutageEstimate> outage;
    std::optional<ErgodicRateEstimate> ergodic;
    std::string error;
};

/// Estimates every grid point with the same seed; a failing point carries its
/// message in `error` and the sweep continues. Throws on an empty grid.
std::vector<SweepPoint> sweep(const std::vector<SystemConfig>& grid, SchemeKind scheme,
                              std::uint64_t trials, std::uint64_t seed,
                              const SimulationOptions& options = {});

} // namespace rsma_sgf
