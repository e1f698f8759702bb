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

#include "edma/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace edma::cli;

    struct Inputs
    {
        std::string config_path;
        std::string layout_path;
        std::string preset;
        std::string out_path;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
    };

    ScenarioConfig resolve_config(const Inputs &in)
    {
        if (!in.config_path.empty() && !in.preset.empty())
            throw ParseError("give either --config or --preset, not both");
        ScenarioConfig c;
        if (!in.preset.empty())
            c = load_preset(in.preset);
        else if (!in.config_path.empty())
            c = load_config(in.config_path);
        if (in.seed)
            c.seed = *in.seed;
        if (in.trials)
            c.trials = *in.trials;
        return c;
    }

    edma::UserLayout resolve_layout(const Inputs &in)
    {
        if (in.layout_path.empty())
            throw ParseError("--layout is required");
        return load_layout(in.layout_path);
    }

    int emit(const Inputs &in, const std::string &text)
    {
        if (in.out_path.empty())
        {
            std::cout << text;
            return exit_ok;
        }
        std::ofstream f(in.out_path, std::ios::binary);
        if (!f || !(f << text))
        {
            std::cerr << "error: cannot write " << in.out_path << '\n';
            return exit_usage;
        }
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Pinching-antenna EDMA experiment runner"};
    app.require_subcommand(1);
    Inputs in;

    auto add_common = [&](CLI::App *cmd, bool layout)
    {
        cmd->add_option("--config", in.config_path, "scenario config file");
        cmd->add_option("--preset", in.preset, "named preset from the config directory");
        cmd->add_option("--out", in.out_path, "write CSV here instead of stdout");
        cmd->add_option("--seed", in.seed, "override the config seed");
        cmd->add_option("--trials", in.trials, "override the config trial count")->check(CLI::PositiveNumber);
        if (layout)
            cmd->add_option("--layout", in.layout_path, "user positions, one 'x y' per line");
    };

    CLI::App *validate = app.add_subcommand("validate", "run the numerical validation suites");
    validate->add_option("--out", in.out_path, "write the table here instead of stdout");
    CLI::App *rates = app.add_subcommand("rates", "per-user rates for a fixed layout");
    add_common(rates, true);
    CLI::App *sweep = app.add_subcommand("sweep", "Monte Carlo sweep of a figure recipe");
    add_common(sweep, false);
    CLI::App *optimize = app.add_subcommand("optimize", "antenna placement for a fixed layout");
    add_common(optimize, true);
    app.add_subcommand("presets", "list the available presets");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        std::ostringstream out;
        int code = exit_ok;
        if (validate->parsed())
            code = cmd_validate(out);
        else if (rates->parsed())
            code = cmd_rates(resolve_config(in), resolve_layout(in), out);
        else if (sweep->parsed())
            code = cmd_sweep(resolve_config(in), out);
        else if (optimize->parsed())
            code = cmd_optimize(resolve_config(in), resolve_layout(in), out);
        else
            for (const std::string &name : preset_names())
                out << name << '\n';
        const int written = emit(in, out.str());
        return code != exit_ok ? code : written;
    }
    catch (const ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const ValidationError &e)
    {
        std::cerr << "invalid: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "invalid: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }
}
