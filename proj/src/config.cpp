// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/config.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rsma_sgf {

SystemConfig::SystemConfig(int k_users, double p_b, double p_f, double rate_b, double rate_f)
    : k_users_(k_users), p_b_(p_b), p_f_(p_f), rate_b_(rate_b), rate_f_(rate_f)
{
    if (k_users < 1)
        throw PreconditionError(fmt::format("k_users must be >= 1, got {}", k_users));
    if (!(p_b > 0.0) || !std::isfinite(p_b))
        throw PreconditionError(fmt::format("p_b must be positive and finite, got {}", p_b));
    if (!(p_f > 0.0) || !std::isfinite(p_f))
        throw PreconditionError(fmt::format("p_f must be positive and finite, got {}", p_f));
    if (!(rate_b > 0.0) || !std::isfinite(rate_b))
        throw PreconditionError(fmt::format("rate_b must be positive and finite, got {}", rate_b));
    if (!(rate_f > 0.0) || !std::isfinite(rate_f))
        throw PreconditionError(fmt::format("rate_f must be positive and finite, got {}", rate_f));

    // expm1 keeps eps accurate for tiny target rates.
    eps_b_ = std::expm1(rate_b * std::log(2.0));
    eps_f_ = std::expm1(rate_f * std::log(2.0));
    eta_b_ = eps_b_ / p_b;
    eta_f_ = eps_f_ / p_f;
}

SystemConfig SystemConfig::with_k(int k_users) const
{
    return {k_users, p_b_, p_f_, rate_b_, rate_f_};
}

SystemConfig SystemConfig::with_powers(double p_b, double p_f) const
{
    return {k_users_, p_b, p_f, rate_b_, rate_f_};
}

std::string SystemConfig::describe() const
{
    return fmt::format("K={} P_B={:g} P_F={:g} R_B={:g} R_F={:g}", k_users_, p_b_, p_f_, rate_b_,
                       rate_f_);
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace rsma_sgf
