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

#ifndef EDMA_MODEL_HPP
#define EDMA_MODEL_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace edma
{
    inline constexpr double speed_of_light = 299792458.0; // m/s

    double dbm_to_watts(double dbm);

    // Physical constants and link budget of the segmented-waveguide system.
    struct SystemParams
    {
        double carrier_frequency = 28e9;       // Hz
        double wavelength = 0.0;               // m
        double waveguide_wavelength = 0.0;     // m
        double eta = 0.0;                      // m^2, c^2 / (16 pi^2 fc^2)
        double height = 3.0;                   // m, waveguide height d
        double blockage_phi = 0.02;            // 1/m^2
        double tx_power = 1.0;                 // W
        double noise_power = 1e-12;            // W
        double rho = 1e12;                     // tx_power / noise_power
        bool assume_serving_los = true;        // alpha_mm forced to 1
        bool adjacent_only = true;             // links two or more segments away are blocked

        /// Derives wavelength, eta and rho from the primary quantities.
        /// Powers are given in dBm; the waveguide wavelength is wavelength / effective_index.
        static SystemParams make(double carrier_hz, double height_m, double phi, double tx_dbm, double noise_dbm,
                                 double effective_index = 1.4);

        /// rho * eta, the receive SNR at unit distance.
        double snr_scale() const { return rho * eta; }

        void validate() const; // throws std::invalid_argument
    };

    struct Segment
    {
        double x_start = 0.0;
        double x_end = 0.0;

        double width() const { return x_end - x_start; }
        double center() const { return 0.5 * (x_start + x_end); }
        double clamp(double x) const;
    };

    // Rectangular service area [-length/2, length/2] x [-width/2, width/2] split into segments along x.
    struct ServiceArea
    {
        double length = 0.0; // D_L
        double width = 0.0;  // D_W
        std::vector<Segment> segments;

        /// M equal segments covering the whole length.
        static ServiceArea equal_split(double length, double width, std::size_t users);
        /// Contiguous segments with the given widths, centred on x = 0.
        static ServiceArea from_widths(double length, double width, std::span<const double> widths);

        std::size_t size() const { return segments.size(); }
        void validate() const;
    };

    struct Position
    {
        double x = 0.0;
        double y = 0.0; // z = 0 implicitly
    };

    // One user per segment, sorted by x.
    struct UserLayout
    {
        std::vector<Position> positions;

        std::size_t size() const { return positions.size(); }
        const Position &operator[](std::size_t m) const { return positions[m]; }
        void validate(const ServiceArea &area) const;
    };

    // One pinching antenna per segment at (x_pin[m], 0, d).
    struct AntennaLayout
    {
        std::vector<double> x_pin;

        std::size_t size() const { return x_pin.size(); }
        double operator[](std::size_t m) const { return x_pin[m]; }

        /// Antenna directly above each user.
        static AntennaLayout at_users(const UserLayout &users);
    };

    // Binary LoS indicators; entry (i, m) refers to user i and antenna m.
    class BlockageRealization
    {
    public:
        explicit BlockageRealization(std::size_t users = 0, bool value = true);

        std::size_t size() const { return size_; }
        bool operator()(std::size_t user, std::size_t antenna) const { return alpha_[user * size_ + antenna] != 0; }
        void set(std::size_t user, std::size_t antenna, bool los) { alpha_[user * size_ + antenna] = los ? 1 : 0; }

    private:
        std::size_t size_;
        std::vector<std::uint8_t> alpha_;
    };

    using Rng = std::mt19937_64;

    /// Independent generator for trial `stream` of an experiment seeded with `seed`.
    Rng substream(std::uint64_t seed, std::uint64_t stream);

    /// Uniform draw in [0, 1) from the top 53 bits of one engine output.
    inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    double squared_distance(const Position &user, double x_pin, double height);
    double link_distance(const Position &user, double x_pin, double height);

    /// Complex LoS channel between a user and an antenna fed from feed_x along the waveguide.
    /// Throws std::domain_error for zero distance.
    std::complex<double> channel_gain(const Position &user, double x_pin, double feed_x, const SystemParams &params);

    /// |h|^2 = eta / distance^2.
    double channel_power(const Position &user, double x_pin, const SystemParams &params);

    /// P(alpha = 1) = exp(-phi * squared distance).
    double blockage_probability(double squared_dist, double phi);
    double blockage_probability(const Position &user, double x_pin, const SystemParams &params);

    /// True when the (user, antenna) link can carry LoS at all under the adjacency assumption.
    bool link_considered(std::size_t user, std::size_t antenna, const SystemParams &params);

    BlockageRealization sample_blockage(const UserLayout &users, const AntennaLayout &antennas,
                                        const SystemParams &params, Rng &rng);
}

#endif
