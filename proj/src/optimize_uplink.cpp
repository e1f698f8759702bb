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

#include "edma/optimize_uplink.hpp"

#include "edma/rates.hpp"

#include <algorithm>
#include <cmath>

namespace edma
{
    GoldenSectionResult golden_section_search(const std::function<double(double)> &objective, double lower,
                                              double upper, double epsilon)
    {
        if (!(lower < upper) || !(epsilon > 0.0))
            throw std::invalid_argument("golden_section_search: need lower < upper and epsilon > 0");

        auto eval = [&](double x)
        {
            const double v = objective(x);
            if (!std::isfinite(v))
                throw SearchError("golden_section_search: objective is not finite");
            return v;
        };

        GoldenSectionResult r;
        r.lower = lower;
        r.upper = upper;
        while (r.upper - r.lower > epsilon)
        {
            ++r.iterations;
            const double span = r.upper - r.lower;
            const double left = r.upper - golden_ratio_conjugate * span;
            const double right = r.lower + golden_ratio_conjugate * span;
            if (eval(right) > eval(left))
                r.lower = left;
            else
                r.upper = right;
        }
        r.x = 0.5 * (r.lower + r.upper);
        return r;
    }

    PlacementResult evaluate_placement(Link link, const UserLayout &users, const AntennaLayout &antennas,
                                       const SystemParams &params)
    {
        PlacementResult result;
        result.antennas = antennas;
        result.per_user_rate = edma_sum_rate(link, users, antennas, params, RateModel::BlockAveraged).per_user;
        result.objective = result.per_user_rate.empty()
                               ? 0.0
                               : *std::min_element(result.per_user_rate.begin(), result.per_user_rate.end());
        return result;
    }

    PlacementResult optimize_uplink_placements(const UserLayout &users, const ServiceArea &area,
                                               const SystemParams &params, double epsilon)
    {
        users.validate(area);

        AntennaLayout antennas = AntennaLayout::at_users(users);
        int iterations = 0;
        for (std::size_t m = 0; m < users.size(); ++m)
        {
            AntennaLayout trial = antennas;
            auto rate = [&](double x)
            {
                trial.x_pin[m] = x;
                return uplink_rate_blockavg(m, users, trial, params);
            };
            const Segment &seg = area.segments[m];
            const GoldenSectionResult g = golden_section_search(rate, seg.x_start, seg.x_end, epsilon);
            antennas.x_pin[m] = g.x;
            iterations = std::max(iterations, g.iterations);
        }

        PlacementResult result = evaluate_placement(Link::Uplink, users, antennas, params);
        result.iterations = iterations;
        return result;
    }

    AntennaLayout midpoint_heuristic(const UserLayout &users, const ServiceArea &area)
    {
        users.validate(area);

        AntennaLayout antennas = AntennaLayout::at_users(users);
        const std::size_t M = users.size();
        for (std::size_t m = 1; m + 1 < M; ++m)
        {
            const double mid = 0.5 * (users[m - 1].x + users[m + 1].x);
            antennas.x_pin[m] = area.segments[m].clamp(mid);
        }
        return antennas;
    }

    UnimodalityCertificate unimodality_certificate(double x_prev, double x_next, double phi)
    {
        if (x_next < x_prev)
            throw std::invalid_argument("unimodality_certificate: neighbours out of order");
        UnimodalityCertificate c;
        c.delta = 0.5 * (x_next - x_prev);
        c.satisfied = c.delta * c.delta * phi / 2.0 >= 1.0;
        return c;
    }

    double neighbor_blockage_product(double w, double delta, double phi, double height)
    {
        const double d2 = height * height;
        auto nlos = [&](double y) { return -std::expm1(-phi * (y * y + d2)); };
        return nlos(delta - w) * nlos(delta + w);
    }
}
