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

#ifndef EDMA_MONTECARLO_HPP
#define EDMA_MONTECARLO_HPP

#include "edma/model.hpp"
#include "edma/rates.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace edma
{
    struct McEstimate
    {
        double mean = 0.0;
        double stderr_ = 0.0; // sample standard deviation / sqrt(trials)
        std::size_t trials = 0;
        std::uint64_t seed = 0;
    };

    /// Order-independent pairwise sum.
    double pairwise_sum(std::span<const double> values);

    /// Mean and standard error of per-trial samples.
    McEstimate summarize(std::span<const double> samples, std::uint64_t seed);

    /// Runs `trial(i, rng)` for i in [0, trials) with rng = substream(seed, i), on up to `threads` workers.
    /// The result does not depend on the thread count. threads = 0 uses the hardware concurrency.
    std::vector<double> run_trials(std::size_t trials, std::uint64_t seed,
                                   const std::function<double(std::size_t, Rng &)> &trial, unsigned threads = 0);

    /// Users uniform on their own segment and across the area width.
    UserLayout sample_user_layout(const ServiceArea &area, Rng &rng);

    enum class AntennaRule
    {
        AtUser,      // x_pin = x_m
        Midpoint,    // neighbour midpoint, clamped
        Golden,      // per-segment golden-section (uplink objective)
        Sca,         // successive convex approximation (downlink objective)
        FixedCenter, // segment centres
        Exhaustive   // grid search on the evaluated link
    };

    std::string_view to_string(AntennaRule rule);
    AntennaRule antenna_rule_from_string(std::string_view name); // throws std::invalid_argument

    enum class Metric
    {
        SumRate,
        MinRate
    };

    struct McOptions
    {
        RateModel model = RateModel::BlockAveraged;
        Metric metric = Metric::SumRate;
        bool centerline = false; // force y_m = 0
        double golden_epsilon = 1e-3;
        double exhaustive_resolution = 1e-2;
        unsigned threads = 0;
    };

    AntennaLayout apply_antenna_rule(AntennaRule rule, Link link, const UserLayout &users, const ServiceArea &area,
                                     const SystemParams &params, const McOptions &options = {});

    /// Ergodic rate of one scheme; TDMA schemes ignore the antenna rule.
    McEstimate ergodic_sum_rate(Scheme scheme, AntennaRule rule, const SystemParams &params,
                                const ServiceArea &area, std::size_t trials, std::uint64_t seed,
                                const McOptions &options = {});

    /// Ergodic EDMA-minus-pinching-TDMA sum-rate difference with common random layouts.
    McEstimate ergodic_gain(Link link, AntennaRule rule, const SystemParams &params, const ServiceArea &area,
                            std::size_t trials, std::uint64_t seed, const McOptions &options = {});

    /// Fraction of layouts in which the EDMA uplink sum (antennas above the users, rate model from options)
    /// is at least the pinching TDMA sum.
    McEstimate win_probability(const SystemParams &params, const ServiceArea &area, std::size_t trials,
                               std::uint64_t seed, const McOptions &options = {});

    struct Table1Row
    {
        std::size_t users = 0;
        McEstimate edma;
        McEstimate tdma_pinch;
        McEstimate tdma_conv;
    };

    /// Uplink ergodic sums versus the number of users on a fixed area split into equal segments.
    std::vector<Table1Row> table1_sweep(const SystemParams &params, double length, double width,
                                        std::span<const std::size_t> user_counts, std::size_t trials,
                                        std::uint64_t seed, const McOptions &options = {});
}

#endif
