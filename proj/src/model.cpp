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

#include "edma/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace edma
{
    double dbm_to_watts(double dbm)
    {
        return std::pow(10.0, (dbm - 30.0) / 10.0);
    }

    SystemParams SystemParams::make(double carrier_hz, double height_m, double phi, double tx_dbm, double noise_dbm,
                                    double effective_index)
    {
        if (!(effective_index > 0.0))
            throw std::invalid_argument("SystemParams: effective index must be positive");

        SystemParams p;
        p.carrier_frequency = carrier_hz;
        p.wavelength = speed_of_light / carrier_hz;
        p.waveguide_wavelength = p.wavelength / effective_index;
        p.eta = p.wavelength * p.wavelength / (16.0 * std::numbers::pi * std::numbers::pi);
        p.height = height_m;
        p.blockage_phi = phi;
        p.tx_power = dbm_to_watts(tx_dbm);
        p.noise_power = dbm_to_watts(noise_dbm);
        p.rho = p.tx_power / p.noise_power;
        p.validate();
        return p;
    }

    void SystemParams::validate() const
    {
        if (!(carrier_frequency > 0.0))
            throw std::invalid_argument("SystemParams: carrier frequency must be positive");
        if (!(height > 0.0))
            throw std::invalid_argument("SystemParams: waveguide height must be positive");
        if (!(blockage_phi >= 0.0))
            throw std::invalid_argument("SystemParams: blockage parameter must be non-negative");
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw std::invalid_argument("SystemParams: transmit SNR must be positive");
        const double expected = wavelength * wavelength / (16.0 * std::numbers::pi * std::numbers::pi);
        if (!(std::abs(eta - expected) <= 1e-12 * expected))
            throw std::invalid_argument("SystemParams: eta inconsistent with wavelength");
    }

    double Segment::clamp(double x) const
    {
        return std::clamp(x, x_start, x_end);
    }

    ServiceArea ServiceArea::equal_split(double length, double width, std::size_t users)
    {
        if (users == 0)
            throw std::invalid_argument("ServiceArea: at least one segment required");

        ServiceArea area;
        area.length = length;
        area.width = width;
        const double step = length / static_cast<double>(users);
        for (std::size_t m = 0; m < users; ++m)
        {
            const double start = -0.5 * length + step * static_cast<double>(m);
            const double end = (m + 1 == users) ? 0.5 * length : start + step;
            area.segments.push_back({start, end});
        }
        area.validate();
        return area;
    }

    ServiceArea ServiceArea::from_widths(double length, double width, std::span<const double> widths)
    {
        if (widths.empty())
            throw std::invalid_argument("ServiceArea: at least one segment required");

        double total = 0.0;
        for (double w : widths)
            total += w;

        ServiceArea area;
        area.length = length;
        area.width = width;
        double x = -0.5 * total;
        for (double w : widths)
        {
            area.segments.push_back({x, x + w});
            x += w;
        }
        area.segments.back().x_end = 0.5 * total;
        area.validate();
        return area;
    }

    void ServiceArea::validate() const
    {
        if (!(length > 0.0) || !(width > 0.0))
            throw std::invalid_argument("ServiceArea: dimensions must be positive");
        if (segments.empty())
            throw std::invalid_argument("ServiceArea: no segments");

        const double half = 0.5 * length;
        const double slack = 1e-9 * length;
        for (std::size_t m = 0; m < segments.size(); ++m)
        {
            const Segment &s = segments[m];
            if (!(s.x_end > s.x_start))
                throw std::invalid_argument("ServiceArea: empty segment " + std::to_string(m));
            if (s.x_start < -half - slack || s.x_end > half + slack)
                throw std::invalid_argument("ServiceArea: segment " + std::to_string(m) + " leaves the area");
            if (m > 0 && s.x_start < segments[m - 1].x_end - slack)
                throw std::invalid_argument("ServiceArea: segments overlap or are unsorted");
        }
    }

    void UserLayout::validate(const ServiceArea &area) const
    {
        if (positions.size() != area.size())
            throw std::invalid_argument("UserLayout: need exactly one user per segment");

        const double slack = 1e-9 * area.length;
        for (std::size_t m = 0; m < positions.size(); ++m)
        {
            const Position &p = positions[m];
            const Segment &s = area.segments[m];
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("UserLayout: non-finite coordinate");
            if (p.x < s.x_start - slack || p.x > s.x_end + slack)
                throw std::invalid_argument("UserLayout: user " + std::to_string(m) + " outside its segment");
            if (std::abs(p.y) > 0.5 * area.width + slack)
                throw std::invalid_argument("UserLayout: user " + std::to_string(m) + " outside the area width");
            if (m > 0 && p.x < positions[m - 1].x)
                throw std::invalid_argument("UserLayout: users not sorted by x");
        }
    }

    AntennaLayout AntennaLayout::at_users(const UserLayout &users)
    {
        AntennaLayout a;
        a.x_pin.reserve(users.size());
        for (const Position &p : users.positions)
            a.x_pin.push_back(p.x);
        return a;
    }

    BlockageRealization::BlockageRealization(std::size_t users, bool value)
        : size_(users), alpha_(users * users, value ? 1 : 0)
    {
    }

    Rng substream(std::uint64_t seed, std::uint64_t stream)
    {
        // splitmix64 finaliser over (seed, stream)
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return Rng(z);
    }

    double squared_distance(const Position &user, double x_pin, double height)
    {
        const double dx = user.x - x_pin;
        return dx * dx + user.y * user.y + height * height;
    }

    double link_distance(const Position &user, double x_pin, double height)
    {
        return std::sqrt(squared_distance(user, x_pin, height));
    }

    std::complex<double> channel_gain(const Position &user, double x_pin, double feed_x, const SystemParams &params)
    {
        const double dist = link_distance(user, x_pin, params.height);
        if (!(dist > 0.0))
            throw std::domain_error("channel_gain: zero link distance");

        const double in_guide = std::abs(x_pin - feed_x);
        double phase = -2.0 * std::numbers::pi * (dist / params.wavelength + in_guide / params.waveguide_wavelength);
        phase = std::remainder(phase, 2.0 * std::numbers::pi);
        return std::polar(std::sqrt(params.eta) / dist, phase);
    }

    double channel_power(const Position &user, double x_pin, const SystemParams &params)
    {
        return params.eta / squared_distance(user, x_pin, params.height);
    }

    double blockage_probability(double squared_dist, double phi)
    {
        return std::exp(-phi * squared_dist);
    }

    double blockage_probability(const Position &user, double x_pin, const SystemParams &params)
    {
        return blockage_probability(squared_distance(user, x_pin, params.height), params.blockage_phi);
    }

    bool link_considered(std::size_t user, std::size_t antenna, const SystemParams &params)
    {
        if (!params.adjacent_only)
            return true;
        const std::size_t gap = user > antenna ? user - antenna : antenna - user;
        return gap < 2;
    }

    BlockageRealization sample_blockage(const UserLayout &users, const AntennaLayout &antennas,
                                        const SystemParams &params, Rng &rng)
    {
        const std::size_t M = users.size();
        if (antennas.size() != M)
            throw std::invalid_argument("sample_blockage: layout size mismatch");

        BlockageRealization alpha(M, false);
        for (std::size_t i = 0; i < M; ++i)
        {
            for (std::size_t m = 0; m < M; ++m)
            {
                // draw for every entry so the stream position does not depend on the flags
                const double u = uniform01(rng);
                bool los = u < blockage_probability(users[i], antennas[m], params);
                if (i == m && params.assume_serving_los)
                    los = true;
                if (!link_considered(i, m, params))
                    los = false;
                alpha.set(i, m, los);
            }
        }
        return alpha;
    }
}
