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

#ifndef EDMA_RATES_HPP
#define EDMA_RATES_HPP

#include "edma/model.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace edma
{
    enum class Link
    {
        Uplink,
        Downlink
    };

    enum class Scheme
    {
        EdmaUplink,
        EdmaDownlink,
        TdmaPinch,
        TdmaConv
    };

    enum class RateModel
    {
        Sampled,
        BlockAveraged,
        LowerBound
    };

    std::string_view to_string(Link link);
    std::string_view to_string(Scheme scheme);
    std::string_view to_string(RateModel model);

    Scheme edma_scheme(Link link);

    // Per-user and sum rates in bits/s/Hz.
    struct RateReport
    {
        Scheme scheme = Scheme::EdmaUplink;
        RateModel model = RateModel::BlockAveraged;
        std::vector<double> per_user;
        double sum = 0.0;

        double min() const;
    };

    /// log2(1 + x) without cancellation for small x.
    double log2_1p(double x);

    // Instantaneous rates for a fixed LoS realization.
    double uplink_rate_sampled(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                               const BlockageRealization &blockage, const SystemParams &params);
    double downlink_rate_sampled(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                 const BlockageRealization &blockage, const SystemParams &params);
    double rate_sampled(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                        const BlockageRealization &blockage, const SystemParams &params);

    /// Interfering link seen by one receiver: received power |h|^2 and its LoS probability.
    struct InterferenceLink
    {
        std::size_t source = 0;
        double power = 0.0;
        double los_probability = 0.0;
    };

    /// Interferers of user m considered under the adjacency flag.
    std::vector<InterferenceLink> interference_links(Link link, std::size_t m, const UserLayout &users,
                                                     const AntennaLayout &antennas, const SystemParams &params);

    /// Serving-link power |h_mm|^2.
    double serving_power(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                         const SystemParams &params);

    // Expectation over every LoS state of the interfering links (exact enumeration, at most 20 links).
    double uplink_rate_blockavg(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                const SystemParams &params);
    double downlink_rate_blockavg(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                  const SystemParams &params);
    double rate_blockavg(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                         const SystemParams &params);

    /// Only the all-interference-blocked term of the block-averaged rate.
    double rate_lower_bound(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                            const SystemParams &params);

    /// Sum over users of the per-user rate selected by `model`; `blockage` is required for Sampled.
    RateReport edma_sum_rate(Link link, const UserLayout &users, const AntennaLayout &antennas,
                             const SystemParams &params, RateModel model,
                             const BlockageRealization *blockage = nullptr);

    double edma_sum_rate_lower_bound(const UserLayout &users, const AntennaLayout &antennas,
                                     const SystemParams &params, Link link = Link::Uplink);

    // TDMA baselines with 1/M time sharing; identical for uplink and downlink.
    RateReport tdma_pinch_report(const UserLayout &users, const SystemParams &params);
    RateReport tdma_conv_report(const UserLayout &users, const SystemParams &params);
    double tdma_pinch_sum_rate(const UserLayout &users, const SystemParams &params);
    double tdma_conv_sum_rate(const UserLayout &users, const SystemParams &params);
}

#endif
