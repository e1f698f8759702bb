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

#include "edma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edma
{
    std::string_view to_string(Link link)
    {
        return link == Link::Uplink ? "ul" : "dl";
    }

    std::string_view to_string(Scheme scheme)
    {
        switch (scheme)
        {
        case Scheme::EdmaUplink:
            return "EDMA_UL";
        case Scheme::EdmaDownlink:
            return "EDMA_DL";
        case Scheme::TdmaPinch:
            return "TDMA_PINCH";
        case Scheme::TdmaConv:
            return "TDMA_CONV";
        }
        return "?";
    }

    std::string_view to_string(RateModel model)
    {
        switch (model)
        {
        case RateModel::Sampled:
            return "SAMPLED";
        case RateModel::BlockAveraged:
            return "BLOCK_AVERAGED";
        case RateModel::LowerBound:
            return "LOWER_BOUND";
        }
        return "?";
    }

    Scheme edma_scheme(Link link)
    {
        return link == Link::Uplink ? Scheme::EdmaUplink : Scheme::EdmaDownlink;
    }

    double RateReport::min() const
    {
        if (per_user.empty())
            return 0.0;
        return *std::min_element(per_user.begin(), per_user.end());
    }

    double log2_1p(double x)
    {
        return std::log1p(x) / std::numbers::ln2;
    }

    namespace
    {
        void check_sizes(std::size_t m, const UserLayout &users, const AntennaLayout &antennas)
        {
            if (antennas.size() != users.size())
                throw std::invalid_argument("rate: user and antenna layouts differ in size");
            if (m >= users.size())
                throw std::out_of_range("rate: user index out of range");
        }

        // Receiver-side geometry of link (source -> victim m).
        double link_power(Link link, std::size_t source, std::size_t m, const UserLayout &users,
                          const AntennaLayout &antennas, const SystemParams &params)
        {
            return link == Link::Uplink ? channel_power(users[source], antennas[m], params)
                                        : channel_power(users[m], antennas[source], params);
        }

        double link_los_probability(Link link, std::size_t source, std::size_t m, const UserLayout &users,
                                    const AntennaLayout &antennas, const SystemParams &params)
        {
            return link == Link::Uplink ? blockage_probability(users[source], antennas[m], params)
                                        : blockage_probability(users[m], antennas[source], params);
        }

        double serving_los_probability(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                       const SystemParams &params)
        {
            return params.assume_serving_los ? 1.0 : blockage_probability(users[m], antennas[m], params);
        }

        constexpr std::size_t max_enumerated_links = 20;
    }

    double serving_power(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                         const SystemParams &params)
    {
        check_sizes(m, users, antennas);
        return channel_power(users[m], antennas[m], params);
    }

    double rate_sampled(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                        const BlockageRealization &blockage, const SystemParams &params)
    {
        check_sizes(m, users, antennas);
        if (blockage.size() != users.size())
            throw std::invalid_argument("rate: blockage realization size mismatch");

        if (!blockage(m, m))
            return 0.0;

        double interference = 0.0;
        for (std::size_t i = 0; i < users.size(); ++i)
        {
            if (i == m || !link_considered(i, m, params))
                continue;
            const bool los = link == Link::Uplink ? blockage(i, m) : blockage(m, i);
            if (los)
                interference += link_power(link, i, m, users, antennas, params);
        }
        const double signal = channel_power(users[m], antennas[m], params);
        return log2_1p(params.rho * signal / (params.rho * interference + 1.0));
    }

    double uplink_rate_sampled(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                               const BlockageRealization &blockage, const SystemParams &params)
    {
        return rate_sampled(Link::Uplink, m, users, antennas, blockage, params);
    }

    double downlink_rate_sampled(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                 const BlockageRealization &blockage, const SystemParams &params)
    {
        return rate_sampled(Link::Downlink, m, users, antennas, blockage, params);
    }

    std::vector<InterferenceLink> interference_links(Link link, std::size_t m, const UserLayout &users,
                                                     const AntennaLayout &antennas, const SystemParams &params)
    {
        check_sizes(m, users, antennas);
        std::vector<InterferenceLink> links;
        for (std::size_t i = 0; i < users.size(); ++i)
        {
            if (i == m || !link_considered(i, m, params))
                continue;
            links.push_back({i, link_power(link, i, m, users, antennas, params),
                             link_los_probability(link, i, m, users, antennas, params)});
        }
        return links;
    }

    double rate_blockavg(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                         const SystemParams &params)
    {
        const std::vector<InterferenceLink> links = interference_links(link, m, users, antennas, params);
        if (links.size() > max_enumerated_links)
            throw std::invalid_argument("rate_blockavg: too many interfering links to enumerate");

        const double snr = params.rho * channel_power(users[m], antennas[m], params);
        const std::size_t states = std::size_t{1} << links.size();
        double expected = 0.0;
        for (std::size_t state = 0; state < states; ++state)
        {
            double probability = 1.0;
            double inr = 0.0;
            for (std::size_t k = 0; k < links.size(); ++k)
            {
                if (state & (std::size_t{1} << k))
                {
                    probability *= links[k].los_probability;
                    inr += params.rho * links[k].power;
                }
                else
                {
                    probability *= 1.0 - links[k].los_probability;
                }
            }
            if (probability > 0.0)
                expected += probability * log2_1p(snr / (inr + 1.0));
        }
        return serving_los_probability(m, users, antennas, params) * expected;
    }

    double uplink_rate_blockavg(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                const SystemParams &params)
    {
        return rate_blockavg(Link::Uplink, m, users, antennas, params);
    }

    double downlink_rate_blockavg(std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                                  const SystemParams &params)
    {
        return rate_blockavg(Link::Downlink, m, users, antennas, params);
    }

    double rate_lower_bound(Link link, std::size_t m, const UserLayout &users, const AntennaLayout &antennas,
                            const SystemParams &params)
    {
        double all_blocked = serving_los_probability(m, users, antennas, params);
        for (const InterferenceLink &l : interference_links(link, m, users, antennas, params))
            all_blocked *= 1.0 - l.los_probability;
        return all_blocked * log2_1p(params.rho * channel_power(users[m], antennas[m], params));
    }

    RateReport edma_sum_rate(Link link, const UserLayout &users, const AntennaLayout &antennas,
                             const SystemParams &params, RateModel model, const BlockageRealization *blockage)
    {
        if (model == RateModel::Sampled && blockage == nullptr)
            throw std::invalid_argument("edma_sum_rate: sampled model needs a blockage realization");

        RateReport report;
        report.scheme = edma_scheme(link);
        report.model = model;
        report.per_user.reserve(users.size());
        for (std::size_t m = 0; m < users.size(); ++m)
        {
            double r = 0.0;
            switch (model)
            {
            case RateModel::Sampled:
                r = rate_sampled(link, m, users, antennas, *blockage, params);
                break;
            case RateModel::BlockAveraged:
                r = rate_blockavg(link, m, users, antennas, params);
                break;
            case RateModel::LowerBound:
                r = rate_lower_bound(link, m, users, antennas, params);
                break;
            }
            report.per_user.push_back(r);
            report.sum += r;
        }
        return report;
    }

    double edma_sum_rate_lower_bound(const UserLayout &users, const AntennaLayout &antennas,
                                     const SystemParams &params, Link link)
    {
        return edma_sum_rate(link, users, antennas, params, RateModel::LowerBound).sum;
    }

    namespace
    {
        RateReport tdma_report(const UserLayout &users, const SystemParams &params, Scheme scheme)
        {
            RateReport report;
            report.scheme = scheme;
            report.model = RateModel::BlockAveraged;
            const double share = users.size() == 0 ? 0.0 : 1.0 / static_cast<double>(users.size());
            for (const Position &u : users.positions)
            {
                const double x_antenna = scheme == Scheme::TdmaPinch ? u.x : 0.0;
                const double r = share * log2_1p(params.rho * channel_power(u, x_antenna, params));
                report.per_user.push_back(r);
                report.sum += r;
            }
            return report;
        }
    }

    RateReport tdma_pinch_report(const UserLayout &users, const SystemParams &params)
    {
        return tdma_report(users, params, Scheme::TdmaPinch);
    }

    RateReport tdma_conv_report(const UserLayout &users, const SystemParams &params)
    {
        return tdma_report(users, params, Scheme::TdmaConv);
    }

    double tdma_pinch_sum_rate(const UserLayout &users, const SystemParams &params)
    {
        return tdma_pinch_report(users, params).sum;
    }

    double tdma_conv_sum_rate(const UserLayout &users, const SystemParams &params)
    {
        return tdma_conv_report(users, params).sum;
    }
}
