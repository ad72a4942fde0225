// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rsma_sgf/channel.hpp"
#include "rsma_sgf/config.hpp"
#include "rsma_sgf/quadrature.hpp"

using namespace rsma_sgf;

namespace {

QuadratureSpec tight()
{
    return {1e-12, 1e-10, 400};
}

} // namespace

TEST_SUITE("channel")
{
    TEST_CASE("config derives thresholds")
    {
        const SystemConfig c(3, 100.0, 10.0, 2.0, 1.5);
        CHECK(c.eps_b() == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(c.eps_f() == doctest::Approx(std::pow(2.0, 1.5) - 1.0).epsilon(1e-15));
        CHECK(c.eta_b() == doctest::Approx(0.03).epsilon(1e-15));
        CHECK(c.eta_f() == doctest::Approx((std::pow(2.0, 1.5) - 1.0) / 10.0).epsilon(1e-15));
        CHECK(c.with_k(5).k_users() == 5);
        CHECK(c.with_powers(1.0, 2.0).eta_b() == doctest::Approx(3.0));
    }

    TEST_CASE("config rejects invalid inputs")
    {
        CHECK_THROWS_AS(SystemConfig(0, 1, 1, 1, 1), PreconditionError);
        CHECK_THROWS_AS(SystemConfig(1, 0, 1, 1, 1), PreconditionError);
        CHECK_THROWS_AS(SystemConfig(1, 1, -1, 1, 1), PreconditionError);
        CHECK_THROWS_AS(SystemConfig(1, 1, 1, 0, 1), PreconditionError);
        CHECK_THROWS_AS(SystemConfig(1, 1, 1, 1, std::nan("")), PreconditionError);
    }

    TEST_CASE("db conversion")
    {
        CHECK(db_to_linear(0.0) == 1.0);
        CHECK(db_to_linear(20.0) == doctest::Approx(100.0).epsilon(1e-15));
        CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
    }

    TEST_CASE("single user realization")
    {
        const SystemConfig c(1, 10, 10, 1, 1);
        ChannelRng rng(3, 0);
        for (int i = 0; i < 100; ++i) {
            const auto r = sample_realization(c, rng);
            REQUIRE(r.g_f.size() == 1);
            CHECK(r.g_f[0] >= 0.0);
            CHECK(r.g_b >= 0.0);
        }
    }

    TEST_CASE("sampling is deterministic and sorted")
    {
        const SystemConfig c(5, 10, 10, 1, 1);
        ChannelRng a(42, 7);
        ChannelRng b(42, 7);
        ChannelRng other(42, 8);
        bool differs = false;
        for (int i = 0; i < 1000; ++i) {
            const auto ra = sample_realization(c, a);
            const auto rb = sample_realization(c, b);
            const auto ro = sample_realization(c, other);
            CHECK(ra.g_b == rb.g_b);
            CHECK(ra.g_f == rb.g_f);
            CHECK(std::is_sorted(ra.g_f.begin(), ra.g_f.end()));
            differs = differs || ro.g_b != ra.g_b;
        }
        CHECK(differs);
    }

    TEST_CASE("GB stream does not depend on K")
    {
        ChannelRng a(9, 2);
        ChannelRng b(9, 2);
        const SystemConfig one(1, 10, 10, 1, 1);
        const SystemConfig five(5, 10, 10, 1, 1);
        for (int i = 0; i < 1000; ++i)
            CHECK(sample_realization(one, a).g_b == sample_realization(five, b).g_b);
    }

    TEST_CASE("splitmix64 reference values")
    {
        // First outputs for state 0 of the reference implementation.
        std::uint64_t s = 0;
        CHECK(splitmix64(s) == 0xe220a8397b1dcdafULL);
        CHECK(splitmix64(s) == 0x6e789e6aa1b965f4ULL);
    }

    TEST_CASE("mean of the maximum of four exponentials is H_4")
    {
        const SystemConfig c(4, 10, 10, 1, 1);
        ChannelRng rng(2024, 0);
        ChannelRealization r;
        const int n = 1'000'000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sample_realization(c, rng, r);
            sum += r.strongest_gf();
        }
        const double h4 = 1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4;
        CHECK(std::abs(sum / n - h4) < 0.01 * h4);
    }

    TEST_CASE("max-gain CDF grid within 3 binomial standard errors")
    {
        for (int k : {1, 2, 3, 5}) {
            const SystemConfig c(k, 10, 10, 1, 1);
            ChannelRng rng(77, static_cast<std::uint64_t>(k));
            ChannelRealization r;
            const int n = 200'000;
            const double ts[] = {0.1, 0.5, 1.0, 2.0};
            int counts[4] = {0, 0, 0, 0};
            for (int i = 0; i < n; ++i) {
                sample_realization(c, rng, r);
                for (int j = 0; j < 4; ++j)
                    counts[j] += r.strongest_gf() < ts[j] ? 1 : 0;
            }
            for (int j = 0; j < 4; ++j) {
                const double p = max_gain_cdf(ts[j], k);
                const double sigma = std::sqrt(p * (1 - p) / n);
                CAPTURE(k);
                CAPTURE(ts[j]);
                CHECK(std::abs(counts[j] / static_cast<double>(n) - p) < 3 * sigma);
            }
        }
    }

    TEST_CASE("K=1 gain passes the Kolmogorov-Smirnov test at 1%")
    {
        const SystemConfig c(1, 10, 10, 1, 1);
        ChannelRng rng(5, 0);
        const int n = 100'000;
        std::vector<double> xs(n);
        for (auto& x : xs)
            x = sample_realization(c, rng).g_f[0];
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            const double f = -std::expm1(-xs[i]);
            d = std::max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
        }
        CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
    }

    TEST_CASE("density supports and reductions")
    {
        CHECK(min_max_joint_pdf(1.0, 0.5, 3) == 0.0);
        CHECK(min_max_joint_pdf(-0.1, 0.5, 3) == 0.0);
        CHECK(min_max_joint_pdf(0.0, 200.0, 2) < 1e-80);
        CHECK(interior_pair_max_joint_pdf(0.1, 0.5, 0.4, 1, 4) == 0.0);
        CHECK(top_pair_joint_pdf(0.5, 0.2, 3) == 0.0);
        // K=3, k=1: the gap factor has exponent zero.
        const double x = 0.2, y = 0.7, z = 1.3;
        CHECK(interior_pair_max_joint_pdf(x, y, z, 1, 3) ==
              doctest::Approx(6.0 * std::exp(-x - y - z)).epsilon(1e-14));
        // The two largest of two are the min and the max.
        CHECK(top_pair_joint_pdf(x, y, 2) == doctest::Approx(min_max_joint_pdf(x, y, 2)).epsilon(1e-14));
        CHECK(max_gain_cdf(0.0, 3) == 0.0);
        CHECK(max_gain_cdf(-1.0, 3) == 0.0);
        CHECK(max_gain_cdf(1.0, 2) == doctest::Approx(std::pow(1 - std::exp(-1.0), 2)));
    }

    TEST_CASE("density preconditions")
    {
        CHECK_THROWS_AS(min_max_joint_pdf(0.1, 0.2, 1), PreconditionError);
        CHECK_THROWS_AS(top_pair_joint_pdf(0.1, 0.2, 1), PreconditionError);
        CHECK_THROWS_AS(interior_pair_max_joint_pdf(0.1, 0.2, 0.3, 0, 4), PreconditionError);
        CHECK_THROWS_AS(interior_pair_max_joint_pdf(0.1, 0.2, 0.3, 3, 4), PreconditionError);
    }

    TEST_CASE("two-variable densities integrate to one")
    {
        const double top = 60.0;
        for (int k = 2; k <= 5; ++k) {
            auto outer = [&](auto pdf) {
                return integrate(
                           [&](double x) {
                               return integrate([&](double y) { return pdf(x, y); }, x, top, tight()).value;
                           },
                           0.0, top, tight())
                    .value;
            };
            CAPTURE(k);
            CHECK(outer([k](double x, double y) { return min_max_joint_pdf(x, y, k); }) ==
                  doctest::Approx(1.0).epsilon(1e-8));
            CHECK(outer([k](double x, double y) { return top_pair_joint_pdf(x, y, k); }) ==
                  doctest::Approx(1.0).epsilon(1e-8));
        }
    }

    TEST_CASE("three-order-statistic density integrates to one")
    {
        const double top = 40.0;
        const QuadratureSpec spec{1e-9, 1e-8, 200};
        for (auto [k, K] : {std::pair{1, 3}, std::pair{1, 4}, std::pair{2, 4}, std::pair{2, 5}}) {
            const double total = integrate(
                                     [&](double x) {
                                         return integrate(
                                                    [&](double y) {
                                                        return integrate(
                                                                   [&](double z) {
                                                                       return interior_pair_max_joint_pdf(x, y, z, k, K);
                                                                   },
                                                                   y, top, spec)
                                                            .value;
                                                    },
                                                    x, top, spec)
                                             .value;
                                     },
                                     0.0, top, spec)
                                     .value;
            CAPTURE(k);
            CAPTURE(K);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}
