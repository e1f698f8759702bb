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

#ifndef EDMA_ANALYTICS_HPP
#define EDMA_ANALYTICS_HPP

#include "edma/model.hpp"

namespace edma
{
    // Closed-form results for two users on two equal half-segments with antennas above the users.

    enum class GainRegime
    {
        General,
        Centerline,
        AsymptoticLarge,
        AsymptoticSmall
    };

    struct GainBound
    {
        double value = 0.0; // bits/s/Hz
        GainRegime regime = GainRegime::General;
    };

    /// Density of x2 - x1 for users uniform on [-L/2, 0] and [0, L/2]: triangular on [0, L].
    double separation_pdf(double z, double length);

    /// P(x2 - x1 >= threshold) for the triangular separation density.
    double separation_tail(double threshold, double length);

    /// E[exp(-phi (x2 - x1)^2)] under the separation density; equals 1 at phi = 0.
    double t1(double phi, double length);

    /// E[exp(-phi y^2)] for y uniform on [-width/2, width/2].
    double mean_lateral_los(double phi, double width);

    /// integral_0^{width/2} log2(y^2 + a) dy. Throws std::domain_error for a <= 0.
    double g1(double a, double width);

    /// Lower bound on the ergodic sum-rate gain of EDMA over pinching TDMA (uniform lateral offsets).
    GainBound ergodic_gain_lb(const SystemParams &params, double length, double width);

    /// Same bound with every user on the waveguide axis (y = 0).
    GainBound ergodic_gain_lb_centerline(const SystemParams &params, double length);

    /// Leading behaviour of the centerline bound for phi L^2 -> infinity (AsymptoticLarge) or -> 0 (AsymptoticSmall).
    GainBound ergodic_gain_lb_centerline_asymptotic(const SystemParams &params, double length, GainRegime regime);

    struct SeparationThreshold
    {
        bool always_wins = false; // EDMA beats TDMA for every separation
        double value = 0.0;       // m, meaningful when !always_wins
    };

    /// Smallest separation nu = sqrt(log(2)/phi - d^2) for which the all-blocked term beats TDMA.
    SeparationThreshold nu_threshold(double phi, double height);

    /// Lower bound on P(EDMA sum rate >= TDMA sum rate), two users on the axis.
    /// Throws std::domain_error when nu exceeds the area length.
    double win_probability_lb(double phi, double height, double length);

    /// Separation at which the block-averaged two-user EDMA sum on the axis equals the pinching TDMA sum.
    /// Uses the exact interference terms, so it lies at or below nu_threshold.
    SeparationThreshold centerline_win_separation(const SystemParams &params);
}

#endif
