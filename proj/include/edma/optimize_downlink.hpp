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

#ifndef EDMA_OPTIMIZE_DOWNLINK_HPP
#define EDMA_OPTIMIZE_DOWNLINK_HPP

#include "edma/model.hpp"
#include "edma/optimize_uplink.hpp"
#include "edma/rates.hpp"

#include <cstddef>
#include <vector>

namespace edma
{
    /// log(1 - exp(-phi (z^2 + y^2 + d^2))): log non-LoS probability of an interfering link at axial offset z.
    double f_m1(double z, double y, const SystemParams &params);
    double f_m1_derivative(double z, double y, const SystemParams &params);
    double f_m1_second_derivative(double z, double y, const SystemParams &params);

    /// Half-width of the convex region of f_m1 around z = 0, via the Lambert W0 root of
    /// 1 - exp(-phi (z^2 + y^2 + d^2)) - 2 phi z^2. Requires phi > 0.
    double beta_star(double y, const SystemParams &params);

    /// log(ln(1 + rho eta / ((z - x)^2 + y^2 + d^2))): log of the natural-log serving rate.
    /// Throws std::domain_error when the inner rate underflows to zero.
    double f_m2(double z, double x, double y, const SystemParams &params);
    double f_m2_derivative(double z, double x, double y, const SystemParams &params);
    double f_m2_second_derivative(double z, double x, double y, const SystemParams &params);

    /// Tangent of f_m1 for the link between victim m and interfering antenna j.
    struct LinearizedTerm
    {
        std::size_t antenna = 0;
        double anchor = 0.0; // linearization point of x_pin[antenna]
        double value = 0.0;  // f_m1 at the anchor
        double slope = 0.0;  // f_m1' at the anchor
    };

    struct UserConstraint
    {
        std::vector<LinearizedTerm> interference; // affine in the neighbours' antennas
    };

    // Concave minorant of the per-user downlink log-rate constraints about a linearization point.
    struct SurrogateModel
    {
        UserLayout users;
        SystemParams params;
        AntennaLayout linearization_point;
        std::vector<UserConstraint> constraints;

        std::size_t size() const { return constraints.size(); }

        /// g_m(x): tangents of the interference terms plus the exact serving term.
        double value(std::size_t m, const AntennaLayout &x) const;
        /// Sparse gradient of g_m, written into a dense vector of length M.
        void gradient(std::size_t m, const AntennaLayout &x, std::vector<double> &grad) const;
        /// d^2 g_m / d x_m^2 (the only non-zero Hessian entry).
        double curvature(std::size_t m, const AntennaLayout &x) const;
        double min_value(const AntennaLayout &x) const;
    };

    /// The untouched constraint g_m(x) = sum_j f_m1(x_j - x_m) + f_m2(x_pin[m]).
    double original_constraint(std::size_t m, const UserLayout &users, const AntennaLayout &x,
                               const SystemParams &params);
    double original_min_constraint(const UserLayout &users, const AntennaLayout &x, const SystemParams &params);

    SurrogateModel build_surrogate(const UserLayout &users, const AntennaLayout &linearization_point,
                                   const SystemParams &params);

    struct SurrogateSolution
    {
        AntennaLayout antennas;
        double u = 0.0; // min_m g_m at the returned point
    };

    /// Maximizes min_m g_m(x) over the segment box.
    SurrogateSolution solve_surrogate(const SurrogateModel &model, const ServiceArea &area);

    struct ScaOptions
    {
        double tolerance = 1e-5; // on successive surrogate optima u
        int max_iterations = 100;
        int max_halvings = 20;
        bool refine = true; // finish with a local ascent on the exact rates
    };

    struct ScaResult : PlacementResult
    {
        std::vector<double> u_history; // surrogate optimum per accepted iteration
        bool regime_valid = true;      // every accepted iterate stayed in the convex/concave region
        double sca_objective = 0.0;    // true minimum rate of the best iterate before refinement
    };

    /// True when the neighbours' antennas lie within beta* of x_m and each antenna within
    /// sqrt((y_m^2 + d^2) / 2) of its user, i.e. the surrogate is a valid minorant.
    bool surrogate_regime_valid(const UserLayout &users, const AntennaLayout &x, const SystemParams &params);

    /// Successive convex approximation of the max-min downlink placement, started from x_pin = x_m.
    /// The reported objective is the true block-averaged minimum rate of the best iterate.
    ScaResult sca_optimize(const UserLayout &users, const ServiceArea &area, const SystemParams &params,
                           const ScaOptions &options = {});

    /// Local max-min ascent on the exact block-averaged downlink log-rates, started from `start`.
    /// Never returns a layout with a lower minimum rate than the start.
    AntennaLayout refine_downlink_placement(const UserLayout &users, const ServiceArea &area,
                                            const SystemParams &params, const AntennaLayout &start);

    inline constexpr double max_exhaustive_points = 1e8;

    /// Grid search at the given resolution. Downlink: joint search for M <= 3 maximizing the minimum rate.
    /// Uplink: independent per-segment search. Throws std::invalid_argument if the grid is too large.
    PlacementResult exhaustive_placement(const UserLayout &users, const ServiceArea &area,
                                         const SystemParams &params, double resolution, Link link);
}

#endif
