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

#include "edma/montecarlo.hpp"

#include "edma/optimize_downlink.hpp"
#include "edma/optimize_uplink.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace edma
{
    double pairwise_sum(std::span<const double> values)
    {
        if (values.size() <= 64)
        {
            double s = 0.0;
            for (double v : values)
                s += v;
            return s;
        }
        const std::size_t half = values.size() / 2;
        return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
    }

    McEstimate summarize(std::span<const double> samples, std::uint64_t seed)
    {
        if (samples.empty())
            throw std::invalid_argument("summarize: need at least one trial");

        McEstimate e;
        e.trials = samples.size();
        e.seed = seed;
        const double n = static_cast<double>(samples.size());
        e.mean = pairwise_sum(samples) / n;
        if (samples.size() > 1)
        {
            std::vector<double> dev(samples.size());
            std::transform(samples.begin(), samples.end(), dev.begin(),
                           [&](double v) { return (v - e.mean) * (v - e.mean); });
            e.stderr_ = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
        }
        return e;
    }

    std::vector<double> run_trials(std::size_t trials, std::uint64_t seed,
                                   const std::function<double(std::size_t, Rng &)> &trial, unsigned threads)
    {
        std::vector<double> out(trials);
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(trials, 1)));

        auto work = [&](std::size_t begin, std::size_t end)
        {
            for (std::size_t i = begin; i < end; ++i)
            {
                Rng rng = substream(seed, i);
                out[i] = trial(i, rng);
            }
        };

        if (threads <= 1)
        {
            work(0, trials);
            return out;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (trials + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t)
            {
                const std::size_t begin = std::min(trials, chunk * t);
                const std::size_t end = std::min(trials, begin + chunk);
                pool.emplace_back(
                    [&, begin, end]
                    {
                        try
                        {
                            work(begin, end);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(error_mutex);
                            if (!error)
                                error = std::current_exception();
                        }
                    });
            }
        }
        if (error)
            std::rethrow_exception(error);
        return out;
    }

    UserLayout sample_user_layout(const ServiceArea &area, Rng &rng)
    {
        UserLayout users;
        users.positions.reserve(area.size());
        for (const Segment &s : area.segments)
        {
            const double x = s.x_start + s.width() * uniform01(rng);
            const double y = area.width * (uniform01(rng) - 0.5);
            users.positions.push_back({x, y});
        }
        return users;
    }

    std::string_view to_string(AntennaRule rule)
    {
        switch (rule)
        {
        case AntennaRule::AtUser:
            return "AT_USER";
        case AntennaRule::Midpoint:
            return "MIDPOINT";
        case AntennaRule::Golden:
            return "GOLDEN";
        case AntennaRule::Sca:
            return "SCA";
        case AntennaRule::FixedCenter:
            return "FIXED_CENTER";
        case AntennaRule::Exhaustive:
            return "EXHAUSTIVE";
        }
        return "?";
    }

    AntennaRule antenna_rule_from_string(std::string_view name)
    {
        for (AntennaRule r : {AntennaRule::AtUser, AntennaRule::Midpoint, AntennaRule::Golden, AntennaRule::Sca,
                              AntennaRule::FixedCenter, AntennaRule::Exhaustive})
            if (to_string(r) == name)
                return r;
        throw std::invalid_argument("unknown antenna rule '" + std::string(name) + "'");
    }

    AntennaLayout apply_antenna_rule(AntennaRule rule, Link link, const UserLayout &users, const ServiceArea &area,
                                     const SystemParams &params, const McOptions &options)
    {
        switch (rule)
        {
        case AntennaRule::AtUser:
            return AntennaLayout::at_users(users);
        case AntennaRule::Midpoint:
            return midpoint_heuristic(users, area);
        case AntennaRule::Golden:
            return optimize_uplink_placements(users, area, params, options.golden_epsilon).antennas;
        case AntennaRule::Sca:
            return sca_optimize(users, area, params).antennas;
        case AntennaRule::FixedCenter:
        {
            AntennaLayout a;
            for (const Segment &s : area.segments)
                a.x_pin.push_back(s.center());
            return a;
        }
        case AntennaRule::Exhaustive:
            return exhaustive_placement(users, area, params, options.exhaustive_resolution, link).antennas;
        }
        throw std::invalid_argument("apply_antenna_rule: unknown rule");
    }

    namespace
    {
        UserLayout draw_users(const ServiceArea &area, Rng &rng, const McOptions &options)
        {
            UserLayout users = sample_user_layout(area, rng);
            if (options.centerline)
                for (Position &p : users.positions)
                    p.y = 0.0;
            return users;
        }

        double reduce(const RateReport &r, Metric metric)
        {
            return metric == Metric::SumRate ? r.sum : r.min();
        }

        RateReport edma_trial(Link link, AntennaRule rule, const UserLayout &users, const ServiceArea &area,
                              const SystemParams &params, const McOptions &options, Rng &rng)
        {
            const AntennaLayout antennas = apply_antenna_rule(rule, link, users, area, params, options);
            if (options.model == RateModel::Sampled)
            {
                const BlockageRealization alpha = sample_blockage(users, antennas, params, rng);
                return edma_sum_rate(link, users, antennas, params, RateModel::Sampled, &alpha);
            }
            return edma_sum_rate(link, users, antennas, params, options.model);
        }
    }

    McEstimate ergodic_sum_rate(Scheme scheme, AntennaRule rule, const SystemParams &params,
                                const ServiceArea &area, std::size_t trials, std::uint64_t seed,
                                const McOptions &options)
    {
        const auto samples = run_trials(
            trials, seed,
            [&](std::size_t, Rng &rng)
            {
                const UserLayout users = draw_users(area, rng, options);
                switch (scheme)
                {
                case Scheme::TdmaPinch:
                    return reduce(tdma_pinch_report(users, params), options.metric);
                case Scheme::TdmaConv:
                    return reduce(tdma_conv_report(users, params), options.metric);
                case Scheme::EdmaUplink:
                    return reduce(edma_trial(Link::Uplink, rule, users, area, params, options, rng), options.metric);
                case Scheme::EdmaDownlink:
                    return reduce(edma_trial(Link::Downlink, rule, users, area, params, options, rng),
                                  options.metric);
                }
                return 0.0;
            },
            options.threads);
        return summarize(samples, seed);
    }

    McEstimate ergodic_gain(Link link, AntennaRule rule, const SystemParams &params, const ServiceArea &area,
                            std::size_t trials, std::uint64_t seed, const McOptions &options)
    {
        const auto samples = run_trials(
            trials, seed,
            [&](std::size_t, Rng &rng)
            {
                const UserLayout users = draw_users(area, rng, options);
                return edma_trial(link, rule, users, area, params, options, rng).sum -
                       tdma_pinch_sum_rate(users, params);
            },
            options.threads);
        return summarize(samples, seed);
    }

    McEstimate win_probability(const SystemParams &params, const ServiceArea &area, std::size_t trials,
                               std::uint64_t seed, const McOptions &options)
    {
        const auto samples = run_trials(
            trials, seed,
            [&](std::size_t, Rng &rng)
            {
                const UserLayout users = draw_users(area, rng, options);
                const double edma =
                    edma_trial(Link::Uplink, AntennaRule::AtUser, users, area, params, options, rng).sum;
                return edma - tdma_pinch_sum_rate(users, params) >= 0.0 ? 1.0 : 0.0;
            },
            options.threads);
        return summarize(samples, seed);
    }

    std::vector<Table1Row> table1_sweep(const SystemParams &params, double length, double width,
                                        std::span<const std::size_t> user_counts, std::size_t trials,
                                        std::uint64_t seed, const McOptions &options)
    {
        if (!std::is_sorted(user_counts.begin(), user_counts.end()))
            throw std::invalid_argument("table1_sweep: user counts must be sorted");

        std::vector<Table1Row> rows;
        for (std::size_t M : user_counts)
        {
            const ServiceArea area = ServiceArea::equal_split(length, width, M);
            Table1Row row;
            row.users = M;
            row.edma = ergodic_sum_rate(Scheme::EdmaUplink, AntennaRule::AtUser, params, area, trials, seed, options);
            row.tdma_pinch =
                ergodic_sum_rate(Scheme::TdmaPinch, AntennaRule::AtUser, params, area, trials, seed, options);
            row.tdma_conv =
                ergodic_sum_rate(Scheme::TdmaConv, AntennaRule::AtUser, params, area, trials, seed, options);
            rows.push_back(row);
        }
        return rows;
    }
}
