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

#include "edma/analytics.hpp"

#include "edma/numerics.hpp"
#include "edma/rates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edma
{
    double separation_pdf(double z, double length)
    {
        if (!(length > 0.0))
            throw std::invalid_argument("separation_pdf: length must be positive");
        if (z < 0.0 || z > length)
            return 0.0;
        const double l2 = length * length;
        return z <= 0.5 * length ? 4.0 * z / l2 : 4.0 * (length - z) / l2;
    }

    double separation_tail(double threshold, double length)
    {
        if (!(length > 0.0))
            throw std::invalid_argument("separation_tail: length must be positive");
        if (threshold <= 0.0)
            return 1.0;
        if (threshold >= length)
            return 0.0;
        if (threshold <= 0.5 * length)
            return 1.0 - 2.0 * threshold * threshold / (length * length);
        const double r = 1.0 - threshold / length;
        return 2.0 * r * r;
    }

    double t1(double phi, double length)
    {
        if (!(length > 0.0) || phi < 0.0)
            throw std::invalid_argument("t1: need phi >= 0 and length > 0");
        if (phi == 0.0)
            return 1.0;

        const double s = std::sqrt(phi) * length;
        const double a = phi * length * length;
        const double erf_part = 2.0 * std::sqrt(std::numbers::pi) / s *
                                (probability_integral(s) - probability_integral(0.5 * s));
        // 1 - 2 e^{-a/4} + e^{-a}, written with expm1 to survive a -> 0
        const double exp_part = -2.0 * std::expm1(-0.25 * a) + std::expm1(-a);
        return erf_part + 2.0 / a * exp_part;
    }

    double mean_lateral_los(double phi, double width)
    {
        if (!(width > 0.0) || phi < 0.0)
            throw std::invalid_argument("mean_lateral_los: need phi >= 0 and width > 0");
        if (phi == 0.0)
            return 1.0;
        const double s = std::sqrt(phi) * width;
        return std::sqrt(std::numbers::pi) / s * probability_integral(0.5 * s);
    }

    double g1(double a, double width)
    {
        if (!(a > 0.0))
            throw std::domain_error("g1: a must be positive");
        const double log2e = std::numbers::log2e;
        const double ra = std::sqrt(a);
        return 0.5 * width * std::log2(0.25 * width * width + a) - log2e * width +
               2.0 * log2e * ra * std::atan(width / (2.0 * ra));
    }

    GainBound ergodic_gain_lb(const SystemParams &params, double length, double width)
    {
        const double phi = params.blockage_phi;
        const double d2 = params.height * params.height;
        const double los = std::exp(-phi * d2) * t1(phi, length) * mean_lateral_los(phi, width);
        const double rate_integral = g1(d2 + params.snr_scale(), width) - g1(d2, width);
        return {2.0 / width * (1.0 - 2.0 * los) * rate_integral, GainRegime::General};
    }

    GainBound ergodic_gain_lb_centerline(const SystemParams &params, double length)
    {
        const double phi = params.blockage_phi;
        const double d2 = params.height * params.height;
        const double rate = log2_1p(params.snr_scale() / d2);
        return {(1.0 - 2.0 * std::exp(-phi * d2) * t1(phi, length)) * rate, GainRegime::Centerline};
    }

    GainBound ergodic_gain_lb_centerline_asymptotic(const SystemParams &params, double length, GainRegime regime)
    {
        const double phi = params.blockage_phi;
        const double d2 = params.height * params.height;
        const double rate = log2_1p(params.snr_scale() / d2);
        const double e = std::exp(-phi * d2);
        switch (regime)
        {
        case GainRegime::AsymptoticLarge:
            // T1 -> 2 / (phi L^2)
            return {(1.0 - 4.0 * e / (phi * length * length)) * rate, regime};
        case GainRegime::AsymptoticSmall:
            // T1 -> 1
            return {(1.0 - 2.0 * e) * rate, regime};
        default:
            throw std::invalid_argument("ergodic_gain_lb_centerline_asymptotic: not an asymptotic regime");
        }
    }

    SeparationThreshold nu_threshold(double phi, double height)
    {
        if (!(phi > 0.0))
            throw std::invalid_argument("nu_threshold: phi must be positive");
        const double arg = std::numbers::ln2 / phi - height * height;
        if (arg < 0.0)
            return {true, 0.0};
        return {false, std::sqrt(arg)};
    }

    double win_probability_lb(double phi, double height, double length)
    {
        const SeparationThreshold nu = nu_threshold(phi, height);
        if (nu.always_wins)
            return 1.0;
        if (nu.value > length)
            throw std::domain_error("win_probability_lb: nu exceeds the area length");
        return separation_tail(nu.value, length);
    }

    SeparationThreshold centerline_win_separation(const SystemParams &params)
    {
        // Two users on the axis separated by z, antennas above them.
        auto gain = [&](double z)
        {
            UserLayout users{{{0.0, 0.0}, {z, 0.0}}};
            const AntennaLayout antennas = AntennaLayout::at_users(users);
            SystemParams p = params;
            p.adjacent_only = true;
            return edma_sum_rate(Link::Uplink, users, antennas, p, RateModel::BlockAveraged).sum -
                   tdma_pinch_sum_rate(users, p);
        };

        if (gain(0.0) >= 0.0)
            return {true, 0.0};

        // gain is increasing in z; bracket then bisect
        double lo = 0.0;
        double hi = 1.0;
        while (gain(hi) < 0.0)
        {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e7)
                throw std::runtime_error("centerline_win_separation: no crossing found");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (gain(mid) < 0.0 ? lo : hi) = mid;
        }
        return {false, 0.5 * (lo + hi)};
    }
}
