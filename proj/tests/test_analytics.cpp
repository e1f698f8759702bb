// SPDX-License-Identifier: Apache-2.0
//
// edma-pin: pinching-antenna environment division multiple access toolkit
// Copyright (C) 2026 The edma-pin authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edma/analytics.hpp"
#include "edma/rates.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace edma;

namespace
{
    SystemParams params_with(double phi, double height = 3.0, double tx_dbm = 30.0)
    {
        return SystemParams::make(28e9, height, phi, tx_dbm, -90.0);
    }

    // E over the triangular separation of f(z), split at the kink.
    template <class F>
    double over_separation(F f, double L)
    {
        auto g = [&](double z) { return f(z) * separation_pdf(z, L); };
        return oracle::integrate(g, 0.0, 0.5 * L) + oracle::integrate(g, 0.5 * L, L);
    }
}

TEST_CASE("separation density")
{
    const double L = 20.0;
    CHECK(separation_pdf(10.0, L) == doctest::Approx(0.1));
    CHECK(separation_pdf(0.0, L) == 0.0);
    CHECK(separation_pdf(L, L) == 0.0);
    CHECK(separation_pdf(-1.0, L) == 0.0);
    CHECK(separation_pdf(25.0, L) == 0.0);
    CHECK(over_separation([](double) { return 1.0; }, L) == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {0.0, 3.0, 10.0, 14.0, 19.5, 20.0})
    {
        const double tail = t >= L ? 0.0 : oracle::integrate([&](double z) { return separation_pdf(z, L); }, t, std::max(t, 0.5 * L)) +
                                               oracle::integrate([&](double z) { return separation_pdf(z, L); }, std::max(t, 0.5 * L), L);
        CHECK(separation_tail(t, L) == doctest::Approx(tail).epsilon(1e-12));
    }
    CHECK_THROWS_AS(separation_pdf(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("t1 against quadrature")
{
    Rng rng = substream(21, 0);
    for (int k = 0; k < 100; ++k)
    {
        const double phi = 0.001 + 0.2 * uniform01(rng);
        const double L = 5.0 + 95.0 * uniform01(rng);
        const double q = over_separation([&](double z) { return std::exp(-phi * z * z); }, L);
        CHECK(std::abs(t1(phi, L) - q) <= 1e-9);
    }
    CHECK(t1(0.02, 20.0) == doctest::Approx(over_separation([](double z) { return std::exp(-0.02 * z * z); }, 20.0)).epsilon(1e-10));
}

TEST_CASE("t1 limits")
{
    CHECK(t1(0.0, 20.0) == 1.0);
    CHECK(t1(1e-12, 20.0) == doctest::Approx(1.0).epsilon(1e-8));
    const double phi = 0.5, L = 100.0;
    CHECK(t1(phi, L) * phi * L * L / 2.0 == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(t1(-0.1, 20.0), std::invalid_argument);
}

TEST_CASE("mean lateral LoS against quadrature")
{
    for (double phi : {0.005, 0.02, 0.1})
        for (double W : {5.0, 10.0, 20.0})
        {
            const double q = oracle::integrate([&](double y) { return std::exp(-phi * y * y); }, -0.5 * W, 0.5 * W) / W;
            CHECK(mean_lateral_los(phi, W) == doctest::Approx(q).epsilon(1e-12));
        }
    CHECK(mean_lateral_los(0.0, 10.0) == 1.0);
}

TEST_CASE("g1 closed form")
{
    const double q = oracle::integrate([](double y) { return std::log2(y * y + 1.0); }, 0.0, 1.0);
    CHECK(g1(1.0, 2.0) == doctest::Approx(q).epsilon(1e-12));
    CHECK(g1(1.0, 2.0) == doctest::Approx(0.3808).epsilon(1e-4));

    Rng rng = substream(22, 0);
    for (int k = 0; k < 100; ++k)
    {
        const double a = std::pow(10.0, -1.0 + 7.0 * uniform01(rng));
        const double W = 1.0 + 30.0 * uniform01(rng);
        const double ref = oracle::integrate([&](double y) { return std::log2(y * y + a); }, 0.0, 0.5 * W);
        CHECK(std::abs(g1(a, W) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    }
    double prev = g1(0.1, 10.0);
    for (double a = 0.2; a < 100.0; a *= 1.7)
    {
        CHECK(g1(a, 10.0) > prev);
        prev = g1(a, 10.0);
    }
    CHECK_THROWS_AS(g1(0.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(g1(-1.0, 10.0), std::domain_error);
}

TEST_CASE("ergodic gain bound against nested quadrature")
{
    const SystemParams p = params_with(0.04);
    const double L = 40.0, W = 10.0, d2 = 9.0, re = p.snr_scale(), phi = p.blockage_phi;
    auto rate = [&](double y) { return std::log2(1.0 + re / (y * y + d2)); };
    // two terms of the instantaneous bound, each weighted by the other user's non-LoS probability
    auto inner = [&](double z)
    {
        return oracle::integrate(
            [&](double y1)
            {
                return oracle::integrate(
                           [&](double y2)
                           {
                               const double b1 = -std::expm1(-phi * (z * z + y2 * y2 + d2));
                               const double b2 = -std::expm1(-phi * (z * z + y1 * y1 + d2));
                               return rate(y1) * (b1 - 0.5) + rate(y2) * (b2 - 0.5);
                           },
                           -0.5 * W, 0.5 * W, 1e-12) /
                       W;
            },
            -0.5 * W, 0.5 * W, 1e-12) /
               W;
    };
    const double ref = over_separation(inner, L);
    const GainBound b = ergodic_gain_lb(p, L, W);
    CHECK(b.regime == GainRegime::General);
    CHECK(b.value == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("rate-integral factor is non-negative")
{
    for (double a : {1.0, 9.0, 25.0})
        for (double re : {1e2, 1e5, 1e8})
            CHECK(g1(a + re, 10.0) - g1(a, 10.0) >= 0.0);
}

TEST_CASE("centerline bound against one-dimensional quadrature")
{
    Rng rng = substream(23, 0);
    for (int k = 0; k < 30; ++k)
    {
        const SystemParams p = params_with(0.005 + 0.1 * uniform01(rng), 2.0 + 3.0 * uniform01(rng), 20.0 + 20.0 * uniform01(rng));
        const double L = 10.0 + 70.0 * uniform01(rng);
        const double d2 = p.height * p.height, phi = p.blockage_phi;
        const double rate = std::log2(1.0 + p.snr_scale() / d2);
        const double ref = over_separation(
            [&](double z) { return 2.0 * rate * (-std::expm1(-phi * (z * z + d2)) - 0.5); }, L);
        CHECK(ergodic_gain_lb_centerline(p, L).value == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("centerline asymptotes")
{
    const double L = 40.0;
    {
        const SystemParams p = params_with(2.0, 0.3);
        const double exact = ergodic_gain_lb_centerline(p, L).value;
        const GainBound a = ergodic_gain_lb_centerline_asymptotic(p, L, GainRegime::AsymptoticLarge);
        CHECK(a.value > 0.0);
        CHECK(exact > 0.0);
        CHECK(a.value == doctest::Approx(exact).epsilon(1e-6));
    }
    {
        const SystemParams p = params_with(1e-7);
        const double exact = ergodic_gain_lb_centerline(p, 1.0).value;
        const GainBound a = ergodic_gain_lb_centerline_asymptotic(p, 1.0, GainRegime::AsymptoticSmall);
        CHECK(a.value < 0.0);
        CHECK(exact < 0.0);
        CHECK(a.value == doctest::Approx(exact).epsilon(1e-5));
    }
    CHECK_THROWS_AS(ergodic_gain_lb_centerline_asymptotic(params_with(0.02), L, GainRegime::General),
                    std::invalid_argument);
}

TEST_CASE("gain bound signs in the limiting regimes")
{
    // phi D_W^2 and phi D_L^2 both >= 50, then both <= 1e-3
    for (double L : {60.0, 100.0, 200.0, 400.0, 1000.0})
    {
        const SystemParams big = params_with(1.0, 3.0);
        CHECK(ergodic_gain_lb(big, L, 10.0).value > 0.0);
        const SystemParams small = params_with(1e-7, 3.0);
        CHECK(ergodic_gain_lb(small, L / 1000.0, 10.0).value < 0.0);
    }
}

TEST_CASE("nu threshold")
{
    const SeparationThreshold nu = nu_threshold(0.02, 3.0);
    REQUIRE_FALSE(nu.always_wins);
    CHECK(nu.value == doctest::Approx(5.0654).epsilon(1e-4));
    CHECK(2.0 * std::exp(-0.02 * (nu.value * nu.value + 9.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nu_threshold(std::log(2.0) / 9.0, 3.0).value == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(nu_threshold(0.1, 3.0).always_wins);
    CHECK_THROWS_AS(nu_threshold(0.0, 3.0), std::invalid_argument);
}

TEST_CASE("win probability bound")
{
    CHECK(win_probability_lb(0.02, 3.0, 20.0) == doctest::Approx(0.871713).epsilon(1e-6));
    CHECK(win_probability_lb(0.1, 3.0, 20.0) == 1.0);
    const double nu = nu_threshold(0.02, 3.0).value;
    CHECK(win_probability_lb(0.02, 3.0, nu) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(win_probability_lb(0.02, 3.0, 4.0), std::domain_error);

    double prev = 0.0;
    for (double L = nu; L < 200.0; L += 3.7)
    {
        const double p = win_probability_lb(0.02, 3.0, L);
        CHECK(p >= prev);
        prev = p;
        const double tail = oracle::integrate([&](double z) { return separation_pdf(z, L); }, nu, std::max(nu, 0.5 * L)) +
                            oracle::integrate([&](double z) { return separation_pdf(z, L); }, std::max(nu, 0.5 * L), L);
        CHECK(p == doctest::Approx(tail).epsilon(1e-12));
    }
}

TEST_CASE("exact win separation lies below nu")
{
    const SystemParams p = params_with(0.02);
    const SeparationThreshold z = centerline_win_separation(p);
    REQUIRE_FALSE(z.always_wins);
    CHECK(z.value < nu_threshold(0.02, 3.0).value);
    const UserLayout u{{{0.0, 0.0}, {z.value, 0.0}}};
    const double gap = edma_sum_rate(Link::Uplink, u, AntennaLayout::at_users(u), p, RateModel::BlockAveraged).sum -
                       tdma_pinch_sum_rate(u, p);
    CHECK(gap == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(centerline_win_separation(params_with(0.2)).always_wins);
}
