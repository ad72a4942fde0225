// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>

namespace rsma_sgf {

/// Neumaier compensated sum that also records the largest term magnitude, so
/// callers can report how much cancellation the result went through.
template <typename Real>
class NeumaierSum
{
  public:
    NeumaierSum& operator+=(const Real& term)
    {
        using std::abs;
        const Real t = sum_ + term;
        if (abs(sum_) >= abs(term))
            compensation_ += (sum_ - t) + term;
        else
            compensation_ += (term - t) + sum_;
        sum_ = t;
        if (abs(term) > max_abs_)
            max_abs_ = abs(term);
        ++terms_;
        return *this;
    }

    Real value() const { return sum_ + compensation_; }
    Real max_abs_term() const { return max_abs_; }
    std::size_t terms() const { return terms_; }

    /// max |term| / |sum|; 1 for an empty or all-zero sum.
    Real condition() const
    {
        using std::abs;
        const Real v = abs(value());
        if (v == Real(0))
            return max_abs_ == Real(0) ? Real(1) : Real(INFINITY);
        const Real c = max_abs_ / v;
        return c < Real(1) ? Real(1) : c;
    }

  private:
    Real sum_{0};
    Real compensation_{0};
    Real max_abs_{0};
    std::size_t terms_ = 0;
};

} // namespace rsma_sgf
