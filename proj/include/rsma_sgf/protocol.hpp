// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "rsma_sgf/channel.hpp"
#include "rsma_sgf/config.hpp"

namespace rsma_sgf {

enum class SchemeKind { RsmaSgf, OmaGbOnly, NomaSgfNoRs };

std::string_view to_string(SchemeKind scheme);
/// Accepts the names produced by to_string; throws std::invalid_argument otherwise.
SchemeKind parse_scheme(std::string_view name);

enum class Group { GroupI, GroupII };

/// Result of one block of admission plus transmission.
struct TransmissionOutcome
{
    double tau = 0.0;
    int winner = 0;
    Group group = Group::GroupI;
    double alpha = 0.0;
    double rate_gf = 0.0;  // BPCU, zero when silent
    double rate_gb = 0.0;  // BPCU
    bool gf_outage = true;
    bool gb_outage = true;
    bool gf_silent = true;
};

/// Interference threshold broadcast by the BS: max{0, P_B g_b / eps_B - 1}.
double compute_tau(const SystemConfig& config, double g_b);

/// Group I iff P_F g_k <= tau (boundary belongs to Group I).
Group classify(const SystemConfig& config, double tau, double g_k);

/// Power split 1 - tau / (P_F g_k) for a Group II user.
double rs_alpha(const SystemConfig& config, double tau, double g_k);

/// log2(1 + P_F g_k).
double rate_group1(const SystemConfig& config, double g_k);

/// Total rate of a rate-split Group II user: the first stream sees the GB
/// signal and the residual tau as interference, the second stream is capped
/// at log2(1 + tau).
double rate_group2(const SystemConfig& config, double tau, double g_b, double g_k);

/// GB outage is decided by |h_B|^2 alone, for every scheme.
inline bool gb_outage_event(const SystemConfig& config, double g_b)
{
    return g_b < config.eta_b();
}

/// Runs admission and transmission for one block under `scheme`.
///
/// The contention winner is always the strongest GF user: backoff timers are
/// inversely proportional to rate and both group rates increase with gain,
/// so the timer race is resolved directly instead of simulated.
TransmissionOutcome run_block(const SystemConfig& config, const ChannelRealization& ch,
                              SchemeKind scheme);

} // namespace rsma_sgf
