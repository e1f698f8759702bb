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

#ifndef EDMA_CLI_HPP
#define EDMA_CLI_HPP

#include "edma/model.hpp"
#include "edma/montecarlo.hpp"
#include "edma/rates.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edma::cli
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_validation = 1,
        exit_usage = 2
    };

    // Malformed input (config or layout); maps to exit_usage.
    struct ParseError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Well-formed input that violates a model invariant; maps to exit_validation.
    struct ValidationError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct SweepSpec
    {
        std::string parameter; // tx_dbm | phi | dl_m | m_users | segment_width
        double from = 0.0;
        double to = 0.0;
        int steps = 1;
        std::vector<double> values() const;
    };

    struct ScenarioConfig
    {
        double fc_ghz = 28.0;
        double d_m = 3.0;
        double dw_m = 10.0;
        double dl_m = 40.0;
        std::size_t m_users = 2;
        std::vector<double> segment_widths; // empty: equal split of dl_m
        double phi = 0.02;
        double tx_dbm = 30.0;
        double noise_dbm = -90.0;
        bool adjacent_only = true;
        bool assume_serving_los = true;
        AntennaRule antenna_rule = AntennaRule::AtUser;
        Link link = Link::Uplink;
        std::size_t trials = 100000;
        std::uint64_t seed = 1;

        RateModel rate_model = RateModel::BlockAveraged;
        Metric metric = Metric::SumRate;
        bool centerline = false;
        std::size_t focus_user = 1; // 1-based, for per-user series
        double golden_epsilon_m = 1e-3;
        double exhaustive_resolution_m = 1e-2;
        std::string method = "fixed"; // optimize: golden | sca | midpoint | fixed | center | exhaustive

        std::optional<SweepSpec> sweep;
        std::vector<std::string> series;
        std::vector<std::size_t> curve_m_users;

        SystemParams params() const;
        ServiceArea area() const;
        void validate() const; // throws ValidationError
    };

    /// Flat `key = value` lines; `#` starts a comment. Unknown keys and malformed values throw ParseError.
    ScenarioConfig parse_config(std::string_view text);
    ScenarioConfig load_config(const std::string &path);

    /// One `x y` pair per line; blank lines and `#` comments are skipped.
    /// Errors name the offending line.
    UserLayout parse_layout(std::string_view text);
    UserLayout load_layout(const std::string &path);

    /// Directory holding the preset files (`<name>.cfg`); EDMA_CONFIG_DIR overrides the built-in path.
    std::string preset_directory();
    std::vector<std::string> preset_names();
    ScenarioConfig load_preset(const std::string &name); // ParseError listing the presets if unknown

    /// `%.9g` in the C locale.
    std::string format_number(double value);

    // Quantities the validation suites check; tests swap entries to inject faults.
    struct ValidationHooks
    {
        std::function<double(double, double)> t1;
        std::function<double(double, double)> g1;
        std::function<double(double, const SystemParams &)> beta_star;
        static ValidationHooks library();
    };

    int cmd_validate(std::ostream &out, const ValidationHooks &hooks = ValidationHooks::library());
    int cmd_rates(const ScenarioConfig &config, const UserLayout &users, std::ostream &out);
    int cmd_sweep(const ScenarioConfig &config, std::ostream &out);
    int cmd_optimize(const ScenarioConfig &config, const UserLayout &users, std::ostream &out);
}

#endif
