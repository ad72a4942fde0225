// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace rsma_sgf {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

double log2_1p(double x)
{
    return std::log1p(x) * kInvLn2;
}

void require_group2(const SystemConfig& config, double tau, double g_k, const char* op)
{
    if (!(tau >= 0.0) || !(config.p_f() * g_k > tau))
        throw PreconditionError(fmt::format(
            "{}: requires P_F*g_k > tau >= 0 (Group II), got P_F*g_k={} tau={}", op,
            config.p_f() * g_k, tau));
}

TransmissionOutcome run_rsma(const SystemConfig& config, const ChannelRealization& ch)
{
    TransmissionOutcome out;
    const double g = ch.strongest_gf();
    const double s = config.p_b() * ch.g_b;
    out.winner = static_cast<int>(ch.g_f.size()) - 1;
    out.tau = compute_tau(config, ch.g_b);
    out.group = classify(config, out.tau, g);
    out.gb_outage = gb_outage_event(config, ch.g_b);

    if (out.group == Group::GroupI) {
        // Decoded after the GB signal; interference P_F g <= tau keeps GB at its target.
        out.alpha = 0.0;
        out.gf_silent = false;
        out.rate_gf = rate_group1(config, g);
        out.rate_gb = log2_1p(s / (config.p_f() * g + 1.0));
    } else {
        out.alpha = rs_alpha(config, out.tau, g);
        const double candidate = rate_group2(config, out.tau, ch.g_b, g);
        if (candidate < config.rate_f()) {
            out.gf_silent = true;
            out.rate_gf = 0.0;
            out.rate_gb = log2_1p(s);
        } else {
            out.gf_silent = false;
            out.rate_gf = candidate;
            // Residual stream power (1 - alpha) P_F g equals tau.
            out.rate_gb = log2_1p(s / ((1.0 - out.alpha) * config.p_f() * g + 1.0));
        }
    }
    out.gf_outage = out.rate_gf < config.rate_f();
    return out;
}

TransmissionOutcome run_noma(const SystemConfig& config, const ChannelRealization& ch)
{
    TransmissionOutcome out;
    const double g = ch.strongest_gf();
    const double s = config.p_b() * ch.g_b;
    const double rx_f = config.p_f() * g;
    out.winner = static_cast<int>(ch.g_f.size()) - 1;
    out.tau = compute_tau(config, ch.g_b);
    out.group = classify(config, out.tau, g);
    out.gb_outage = gb_outage_event(config, ch.g_b);

    // GB first (alpha = 0): GB must decode with the whole GF signal as noise.
    const bool gb_first_ok = !out.gb_outage && out.group == Group::GroupI;
    const double gb_first_rate = rate_group1(config, g);
    // GF first (alpha = 1): GF must decode, after which GB sees an OMA channel.
    const double gf_first_rate = log2_1p(rx_f / (s + 1.0));
    const bool gf_first_ok = gf_first_rate >= config.rate_f();

    if (gb_first_ok && (!gf_first_ok || gb_first_rate >= gf_first_rate)) {
        out.alpha = 0.0;
        out.group = Group::GroupI;
        out.gf_silent = false;
        out.rate_gf = gb_first_rate;
        out.rate_gb = log2_1p(s / (rx_f + 1.0));
    } else if (gf_first_ok) {
        out.alpha = 1.0;
        out.group = Group::GroupII;
        out.gf_silent = false;
        out.rate_gf = gf_first_rate;
        out.rate_gb = log2_1p(s);
    } else {
        out.alpha = out.group == Group::GroupI ? 0.0 : 1.0;
        out.gf_silent = true;
        out.rate_gf = 0.0;
        out.rate_gb = log2_1p(s);
    }
    out.gf_outage = out.rate_gf < config.rate_f();
    return out;
}

TransmissionOutcome run_oma(const SystemConfig& config, const ChannelRealization& ch)
{
    TransmissionOutcome out;
    out.rate_gb = log2_1p(config.p_b() * ch.g_b);
    // Same predicate as rate_gb < R_B, written on |h_B|^2 so every scheme shares it bitwise.
    out.gb_outage = gb_outage_event(config, ch.g_b);
    out.gf_silent = true;
    out.gf_outage = true;
    return out;
}

} // namespace

std::string_view to_string(SchemeKind scheme)
{
    switch (scheme) {
    case SchemeKind::RsmaSgf:
        return "rsma_sgf";
    case SchemeKind::OmaGbOnly:
        return "oma_gb_only";
    case SchemeKind::NomaSgfNoRs:
        return "noma_sgf_no_rs";
    }
    return "unknown";
}

SchemeKind parse_scheme(std::string_view name)
{
    for (auto s : {SchemeKind::RsmaSgf, SchemeKind::OmaGbOnly, SchemeKind::NomaSgfNoRs})
        if (name == to_string(s))
            return s;
    throw std::invalid_argument(fmt::format("unknown scheme '{}'", name));
}

double compute_tau(const SystemConfig& config, double g_b)
{
    if (g_b <= config.eta_b())
        return 0.0;
    return std::max(0.0, config.p_b() * g_b / config.eps_b() - 1.0);
}

Group classify(const SystemConfig& config, double tau, double g_k)
{
    return config.p_f() * g_k <= tau ? Group::GroupI : Group::GroupII;
}

double rs_alpha(const SystemConfig& config, double tau, double g_k)
{
    require_group2(config, tau, g_k, "rs_alpha");
    return 1.0 - tau / (config.p_f() * g_k);
}

double rate_group1(const SystemConfig& config, double g_k)
{
    return log2_1p(config.p_f() * g_k);
}

double rate_group2(const SystemConfig& config, double tau, double g_b, double g_k)
{
    require_group2(config, tau, g_k, "rate_group2");
    const double rx_f = config.p_f() * g_k;
    return log2_1p((rx_f - tau) / (config.p_b() * g_b + tau + 1.0)) + log2_1p(tau);
}

TransmissionOutcome run_block(const SystemConfig& config, const ChannelRealization& ch,
                              SchemeKind scheme)
{
    switch (scheme) {
    case SchemeKind::RsmaSgf:
        return run_rsma(config, ch);
    case SchemeKind::OmaGbOnly:
        return run_oma(config, ch);
    case SchemeKind::NomaSgfNoRs:
        return run_noma(config, ch);
    }
    throw std::logic_error("unhandled SchemeKind");
}

} // namespace rsma_sgf
