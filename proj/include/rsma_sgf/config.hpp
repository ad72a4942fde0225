// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rsma_sgf {

/// Thrown when a caller violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// One GB user paired with K contending GF users on a single resource block.
///
/// Powers are linear (noise is unit variance, so a power is also a transmit
/// SNR). Target rates are in bits per channel use. The SNR thresholds
/// eps = 2^rate - 1 and their power-normalised forms eta = eps / power are
/// computed once at construction.
class SystemConfig
{
  public:
    /// Validates k_users >= 1 and strictly positive powers and rates.
    SystemConfig(int k_users, double p_b, double p_f, double rate_b, double rate_f);

    int k_users() const noexcept { return k_users_; }
    double p_b() const noexcept { return p_b_; }
    double p_f() const noexcept { return p_f_; }
    double rate_b() const noexcept { return rate_b_; }
    double rate_f() const noexcept { return rate_f_; }

    double eps_b() const noexcept { return eps_b_; }
    double eps_f() const noexcept { return eps_f_; }
    double eta_b() const noexcept { return eta_b_; }
    double eta_f() const noexcept { return eta_f_; }

    SystemConfig with_k(int k_users) const;
    SystemConfig with_powers(double p_b, double p_f) const;

    std::string describe() const;

  private:
    int k_users_;
    double p_b_;
    double p_f_;
    double rate_b_;
    double rate_f_;
    double eps_b_;
    double eps_f_;
    double eta_b_;
    double eta_f_;
};

/// 10^(db/10).
double db_to_linear(double db);

} // namespace rsma_sgf
