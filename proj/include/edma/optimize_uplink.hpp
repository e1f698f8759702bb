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

#ifndef EDMA_OPTIMIZE_UPLINK_HPP
#define EDMA_OPTIMIZE_UPLINK_HPP

#include "edma/model.hpp"
#include "edma/rates.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace edma
{
    // (sqrt(5) - 1) / 2
    inline constexpr double golden_ratio_conjugate = 0.6180339887498949;

    struct SearchError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct GoldenSectionResult
    {
        double x = 0.0;     // midpoint of the final bracket
        double lower = 0.0; // final bracket
        double upper = 0.0;
        int iterations = 0;
    };

    /// Maximizes a unimodal function on [lower, upper] until the bracket is at most epsilon wide.
    /// Each step probes upper - c (upper - lower) and lower + c (upper - lower) with c the golden ratio
    /// conjugate; equal probe values shrink the bracket from the upper side.
    /// Throws SearchError if the objective returns a non-finite value.
    GoldenSectionResult golden_section_search(const std::function<double(double)> &objective, double lower,
                                              double upper, double epsilon);

    struct PlacementResult
    {
        AntennaLayout antennas;
        std::vector<double> per_user_rate; // bits/s/Hz
        double objective = 0.0;            // min of per_user_rate
        int iterations = 0;
        bool converged = true;
    };

    inline constexpr double default_placement_epsilon = 1e-3; // m

    /// Places each uplink antenna independently by golden-section search of the user's block-averaged rate
    /// over its own segment. Segment m's rate does not depend on the other antennas.
    PlacementResult optimize_uplink_placements(const UserLayout &users, const ServiceArea &area,
                                               const SystemParams &params,
                                               double epsilon = default_placement_epsilon);

    /// Antenna m at the midpoint of its two neighbours, clamped to the segment; edge users keep x_m.
    AntennaLayout midpoint_heuristic(const UserLayout &users, const ServiceArea &area);

    /// Sufficient condition delta^2 phi / 2 >= 1 for a single interior maximum of the placement objective.
    struct UnimodalityCertificate
    {
        double delta = 0.0; // m, half the neighbour spacing
        bool satisfied = false;
    };

    UnimodalityCertificate unimodality_certificate(double x_prev, double x_next, double phi);

    /// Product of the two neighbour non-LoS probabilities at offset w from the neighbour midpoint:
    /// (1 - exp(-phi((delta - w)^2 + d^2))) (1 - exp(-phi((delta + w)^2 + d^2))). Even in w.
    double neighbor_blockage_product(double w, double delta, double phi, double height);

    /// Per-user rates of a given uplink antenna layout (block-averaged) packed as a PlacementResult.
    PlacementResult evaluate_placement(Link link, const UserLayout &users, const AntennaLayout &antennas,
                                       const SystemParams &params);
}

#endif
