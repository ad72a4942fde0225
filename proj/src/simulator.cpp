// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "rsma_sgf/channel.hpp"
#include "rsma_sgf/oracle.hpp"

namespace rsma_sgf {

namespace {

unsigned resolve_threads(const SimulationOptions& options)
{
    return options.threads != 0 ? options.threads : default_thread_count();
}

// Splits `trials` into chunks, runs fn(chunk_index, chunk_trials) for each on
// a worker pool and returns the per-chunk results in chunk order.
template <typename Acc, typename Fn>
std::vector<Acc> run_chunks(std::uint64_t trials, const SimulationOptions& options, Fn&& fn)
{
    if (options.chunk_size == 0)
        throw PreconditionError("chunk_size must be positive");
    const std::uint64_t n_chunks = (trials + options.chunk_size - 1) / options.chunk_size;
    std::vector<Acc> results(n_chunks);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(options), n_chunks));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::uint64_t c = next++; c < n_chunks; c = next++) {
                const std::uint64_t begin = c * options.chunk_size;
                const std::uint64_t n = std::min(options.chunk_size, trials - begin);
                results[c] = fn(c, n);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next = n_chunks;
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

void require_trials(std::uint64_t trials)
{
    if (trials < 1)
        throw PreconditionError("trials must be at least 1");
}

bool precise_enough(const OutageEstimate& e)
{
    return e.ci_halfwidth < 0.1 * e.p_hat;
}

ErgodicRateEstimate ergodic_from_tally(const BlockTally& t)
{
    const double n = static_cast<double>(t.trials);
    auto std_error = [n](double sum, double sum_sq) {
        if (n < 2.0)
            return 0.0;
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        return std::sqrt(var / n);
    };
    ErgodicRateEstimate e;
    e.trials = t.trials;
    e.mean_rate_gf = t.sum_gf / n;
    e.mean_rate_sum = t.sum_total / n;
    e.std_error = std_error(t.sum_gf, t.sum_sq_gf);
    e.std_error_sum = std_error(t.sum_total, t.sum_sq_total);
    return e;
}

template <typename Estimate>
OutageEstimate escalate(std::uint64_t trials, const SimulationOptions& options, Estimate&& run)
{
    OutageEstimate e = run(trials);
    if (!options.auto_escalate)
        return e;
    while (!precise_enough(e) && trials < options.trial_cap) {
        trials = std::min(trials * 2, options.trial_cap);
        e = run(trials);
    }
    return e;
}

} // namespace

unsigned default_thread_count()
{
    if (const char* env = std::getenv("RSMA_SGF_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void BlockTally::merge(const BlockTally& other)
{
    trials += other.trials;
    gf_outages += other.gf_outages;
    gb_outages += other.gb_outages;
    sum_gf += other.sum_gf;
    sum_sq_gf += other.sum_sq_gf;
    sum_total += other.sum_total;
    sum_sq_total += other.sum_sq_total;
}

BlockTally simulate_blocks(const SystemConfig& config, SchemeKind scheme, std::uint64_t trials,
                           std::uint64_t seed, const SimulationOptions& options)
{
    require_trials(trials);
    const auto chunks = run_chunks<BlockTally>(trials, options, [&](std::uint64_t c, std::uint64_t n) {
        ChannelRng rng(seed, c);
        ChannelRealization ch;
        BlockTally t;
        for (std::uint64_t i = 0; i < n; ++i) {
            sample_realization(config, rng, ch);
            const auto out = run_block(config, ch, scheme);
            t.gf_outages += out.gf_outage ? 1 : 0;
            t.gb_outages += out.gb_outage ? 1 : 0;
            const double total = out.rate_gf + out.rate_gb;
            t.sum_gf += out.rate_gf;
            t.sum_sq_gf += out.rate_gf * out.rate_gf;
            t.sum_total += total;
            t.sum_sq_total += total * total;
        }
        t.trials = n;
        return t;
    });
    BlockTally all;
    for (const auto& t : chunks)
        all.merge(t);
    return all;
}

OutageEstimate make_outage_estimate(std::uint64_t events, std::uint64_t trials, SchemeKind scheme,
                                    const SimulationOptions& options)
{
    require_trials(trials);
    OutageEstimate e;
    e.scheme = scheme;
    e.trials = trials;
    e.events = events;
    const double n = static_cast<double>(trials);
    e.p_hat = static_cast<double>(events) / n;
    const double z = options.z;
    if (options.wilson) {
        const double z2n = z * z / n;
        e.ci_halfwidth = z / (1.0 + z2n) *
                         std::sqrt(e.p_hat * (1.0 - e.p_hat) / n + z2n / (4.0 * n));
    } else {
        e.ci_halfwidth = z * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n);
    }
    return e;
}

OutageEstimate estimate_outage(const SystemConfig& config, SchemeKind scheme, std::uint64_t trials,
                               std::uint64_t seed, const SimulationOptions& options)
{
    return escalate(trials, options, [&](std::uint64_t n) {
        const auto t = simulate_blocks(config, scheme, n, seed, options);
        return make_outage_estimate(t.gf_outages, t.trials, scheme, options);
    });
}

OutageEstimate estimate_gb_outage(const SystemConfig& config, SchemeKind scheme,
                                  std::uint64_t trials, std::uint64_t seed,
                                  const SimulationOptions& options)
{
    return escalate(trials, options, [&](std::uint64_t n) {
        const auto t = simulate_blocks(config, scheme, n, seed, options);
        return make_outage_estimate(t.gb_outages, t.trials, scheme, options);
    });
}

ErgodicRateEstimate estimate_ergodic(const SystemConfig& config, SchemeKind scheme,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const SimulationOptions& options)
{
    return ergodic_from_tally(simulate_blocks(config, scheme, trials, seed, options));
}

QEventTally count_q_events(const SystemConfig& config, std::uint64_t trials, std::uint64_t seed,
                           const SimulationOptions& options)
{
    require_trials(trials);
    const auto slots = static_cast<std::size_t>(config.k_users()) + 2;
    const auto chunks = run_chunks<QEventTally>(trials, options, [&](std::uint64_t c, std::uint64_t n) {
        ChannelRng rng(seed, c);
        ChannelRealization ch;
        QEventTally t;
        t.counts.assign(slots, 0);
        for (std::uint64_t i = 0; i < n; ++i) {
            sample_realization(config, rng, ch);
            const auto idx = q_event_index(config, ch.g_b, ch.g_f);
            const bool outage = run_block(config, ch, SchemeKind::RsmaSgf).gf_outage;
            if (idx)
                ++t.counts[static_cast<std::size_t>(*idx)];
            t.gf_outages += outage ? 1 : 0;
            t.mismatches += (idx.has_value() != outage) ? 1 : 0;
        }
        t.trials = n;
        return t;
    });
    QEventTally all;
    all.counts.assign(slots, 0);
    for (const auto& t : chunks) {
        all.trials += t.trials;
        all.gf_outages += t.gf_outages;
        all.mismatches += t.mismatches;
        for (std::size_t i = 0; i < slots; ++i)
            all.counts[i] += t.counts[i];
    }
    return all;
}

std::vector<SweepPoint> sweep(const std::vector<SystemConfig>& grid, SchemeKind scheme,
                              std::uint64_t trials, std::uint64_t seed,
                              const SimulationOptions& options)
{
    if (grid.empty())
        throw PreconditionError("sweep requires a non-empty grid");
    std::vector<SweepPoint> out;
    out.reserve(grid.size());
    for (const auto& config : grid) {
        SweepPoint point{config, std::nullopt, std::nullopt, {}};
        try {
            const auto t = simulate_blocks(config, scheme, trials, seed, options);
            point.outage = make_outage_estimate(t.gf_outages, t.trials, scheme, options);
            point.ergodic = ergodic_from_tally(t);
        } catch (const std::exception& ex) {
            point.error = ex.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

} // namespace rsma_sgf
