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

#include "edma/analytics.hpp"
#include "edma/optimize_downlink.hpp"
#include "edma/optimize_uplink.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#ifndef EDMA_DEFAULT_CONFIG_DIR
#define EDMA_DEFAULT_CONFIG_DIR "configs"
#endif

namespace edma::cli
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto ws = " \t\r\n";
            const auto b = s.find_first_not_of(ws);
            if (b == std::string_view::npos)
                return {};
            return s.substr(b, s.find_last_not_of(ws) - b + 1);
        }

        std::string lower(std::string_view s)
        {
            std::string out(s);
            std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
            return out;
        }

        std::string upper(std::string_view s)
        {
            std::string out(s);
            std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
            return out;
        }

        std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> parts;
            std::size_t start = 0;
            while (true)
            {
                const std::size_t pos = s.find(sep, start);
                parts.push_back(trim(s.substr(start, pos - start)));
                if (pos == std::string_view::npos)
                    return parts;
                start = pos + 1;
            }
        }

        [[noreturn]] void fail_line(std::size_t line, const std::string &what)
        {
            throw ParseError("line " + std::to_string(line) + ": " + what);
        }

        bool to_double(std::string_view s, double &out)
        {
            if (!s.empty() && s.front() == '+')
                s.remove_prefix(1);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
        }

        template <class Int>
        bool to_integer(std::string_view s, Int &out)
        {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && ptr == s.data() + s.size();
        }

        std::string read_file(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw ParseError("cannot open " + path);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        // Series vocabulary for sweeps; an optional "@RULE" picks the antenna rule.
        const std::set<std::string, std::less<>> series_names = {
            "EDMA", "EDMA_UL", "EDMA_DL", "TDMA_PINCH", "TDMA_CONV", "GAIN", "GAIN_LB_MC",
            "GAIN_LB", "WIN", "WIN_LB", "USER_RATE_FULL", "USER_RATE_ADJ"};

        struct SeriesSpec
        {
            std::string name;
            std::optional<AntennaRule> rule;
        };

        SeriesSpec parse_series(std::string_view token)
        {
            SeriesSpec s;
            const auto at = token.find('@');
            s.name = std::string(trim(token.substr(0, at)));
            if (!series_names.count(s.name))
                throw ParseError("unknown series '" + s.name + "'");
            if (at != std::string_view::npos)
            {
                try
                {
                    s.rule = antenna_rule_from_string(upper(trim(token.substr(at + 1))));
                }
                catch (const std::invalid_argument &e)
                {
                    throw ParseError(e.what());
                }
            }
            return s;
        }

        const std::set<std::string, std::less<>> sweep_parameters = {"tx_dbm", "phi", "dl_m", "m_users",
                                                                      "segment_width"};
        const std::set<std::string, std::less<>> methods = {"golden", "sca", "midpoint", "fixed", "center",
                                                            "exhaustive"};
    }

    std::vector<double> SweepSpec::values() const
    {
        if (steps < 1)
            throw ValidationError("sweep_steps must be at least 1");
        if (steps == 1)
            return {from};
        std::vector<double> v(static_cast<std::size_t>(steps));
        for (int k = 0; k < steps; ++k)
            v[static_cast<std::size_t>(k)] = from + (to - from) * k / (steps - 1);
        v.back() = to;
        return v;
    }

    SystemParams ScenarioConfig::params() const
    {
        SystemParams p = SystemParams::make(fc_ghz * 1e9, d_m, phi, tx_dbm, noise_dbm);
        p.adjacent_only = adjacent_only;
        p.assume_serving_los = assume_serving_los;
        return p;
    }

    ServiceArea ScenarioConfig::area() const
    {
        if (segment_widths.empty())
            return ServiceArea::equal_split(dl_m, dw_m, m_users);
        return ServiceArea::from_widths(dl_m, dw_m, segment_widths);
    }

    void ScenarioConfig::validate() const
    {
        auto positive = [](double v, const char *name)
        {
            if (!(v > 0.0))
                throw ValidationError(std::string(name) + " must be positive");
        };
        positive(fc_ghz, "fc_ghz");
        positive(d_m, "d_m");
        positive(dw_m, "dw_m");
        positive(dl_m, "dl_m");
        positive(phi, "phi");
        positive(golden_epsilon_m, "golden_epsilon_m");
        positive(exhaustive_resolution_m, "exhaustive_resolution_m");
        if (m_users == 0)
            throw ValidationError("m_users must be positive");
        if (trials == 0)
            throw ValidationError("trials must be positive");
        if (!segment_widths.empty())
        {
            if (segment_widths.size() != m_users)
                throw ValidationError("segment_widths lists " + std::to_string(segment_widths.size()) +
                                      " widths for " + std::to_string(m_users) + " users");
            double total = 0.0;
            for (double w : segment_widths)
            {
                positive(w, "each segment width");
                total += w;
            }
            if (total > dl_m * (1.0 + 1e-12))
                throw ValidationError("segment_widths sum " + format_number(total) + " exceeds dl_m " +
                                      format_number(dl_m));
        }
        if (focus_user < 1 || focus_user > m_users)
            throw ValidationError("focus_user must lie in 1..m_users");
        if (!methods.count(method))
            throw ValidationError("unknown method '" + method + "'");
        if (sweep)
        {
            if ((sweep->parameter == "m_users" || sweep->parameter == "segment_width") && !segment_widths.empty())
                throw ValidationError("sweeping " + sweep->parameter + " needs an equal split (no segment_widths)");
            if (sweep->parameter == "m_users")
                for (double v : sweep->values())
                    if (v < 1.0 || v != std::round(v))
                        throw ValidationError("m_users sweep values must be positive integers");
        }
        if (!curve_m_users.empty() && !segment_widths.empty())
            throw ValidationError("curve_m_users needs an equal split (no segment_widths)");
        for (std::size_t m : curve_m_users)
            if (m == 0)
                throw ValidationError("curve_m_users entries must be positive");
        params().validate();
    }

    ScenarioConfig parse_config(std::string_view text)
    {
        ScenarioConfig c;
        std::set<std::string, std::less<>> seen;
        std::optional<double> sweep_from, sweep_to;
        std::optional<int> sweep_steps;
        std::optional<std::string> sweep_param;
        std::size_t line_no = 0;

        std::istringstream in{std::string(text)};
        for (std::string raw; std::getline(in, raw);)
        {
            ++line_no;
            std::string_view line = raw;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                fail_line(line_no, "expected key = value");
            const std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (value.empty())
                fail_line(line_no, "missing value for '" + key + "'");
            if (!seen.insert(key).second)
                fail_line(line_no, "duplicate key '" + key + "'");

            auto number = [&]
            {
                double v = 0.0;
                if (!to_double(value, v))
                    fail_line(line_no, "'" + key + "' expects a number, got '" + std::string(value) + "'");
                return v;
            };
            auto count = [&]
            {
                std::size_t v = 0;
                if (!to_integer(value, v))
                    fail_line(line_no, "'" + key + "' expects a non-negative integer, got '" + std::string(value) + "'");
                return v;
            };
            auto flag = [&]
            {
                const std::string v = lower(value);
                if (v == "true" || v == "1" || v == "yes")
                    return true;
                if (v == "false" || v == "0" || v == "no")
                    return false;
                fail_line(line_no, "'" + key + "' expects true or false, got '" + std::string(value) + "'");
            };

            if (key == "fc_ghz")
                c.fc_ghz = number();
            else if (key == "d_m")
                c.d_m = number();
            else if (key == "dw_m")
                c.dw_m = number();
            else if (key == "dl_m")
                c.dl_m = number();
            else if (key == "m_users")
                c.m_users = count();
            else if (key == "segment_widths")
            {
                for (std::string_view item : split(value, ','))
                {
                    double w = 0.0;
                    if (!to_double(item, w))
                        fail_line(line_no, "bad segment width '" + std::string(item) + "'");
                    c.segment_widths.push_back(w);
                }
            }
            else if (key == "phi")
                c.phi = number();
            else if (key == "tx_dbm")
                c.tx_dbm = number();
            else if (key == "noise_dbm")
                c.noise_dbm = number();
            else if (key == "adjacent_only")
                c.adjacent_only = flag();
            else if (key == "assume_serving_los")
                c.assume_serving_los = flag();
            else if (key == "antenna_rule")
            {
                try
                {
                    c.antenna_rule = antenna_rule_from_string(upper(value));
                }
                catch (const std::invalid_argument &e)
                {
                    fail_line(line_no, e.what());
                }
            }
            else if (key == "link")
            {
                const std::string v = lower(value);
                if (v == "ul")
                    c.link = Link::Uplink;
                else if (v == "dl")
                    c.link = Link::Downlink;
                else
                    fail_line(line_no, "link must be ul or dl");
            }
            else if (key == "trials")
                c.trials = count();
            else if (key == "seed")
            {
                if (!to_integer(value, c.seed))
                    fail_line(line_no, "seed expects a non-negative integer");
            }
            else if (key == "rate_model")
            {
                const std::string v = lower(value);
                if (v == "sampled")
                    c.rate_model = RateModel::Sampled;
                else if (v == "block_averaged")
                    c.rate_model = RateModel::BlockAveraged;
                else if (v == "lower_bound")
                    c.rate_model = RateModel::LowerBound;
                else
                    fail_line(line_no, "rate_model must be sampled, block_averaged or lower_bound");
            }
            else if (key == "metric")
            {
                const std::string v = lower(value);
                if (v == "sum")
                    c.metric = Metric::SumRate;
                else if (v == "min")
                    c.metric = Metric::MinRate;
                else
                    fail_line(line_no, "metric must be sum or min");
            }
            else if (key == "centerline")
                c.centerline = flag();
            else if (key == "focus_user")
                c.focus_user = count();
            else if (key == "golden_epsilon_m")
                c.golden_epsilon_m = number();
            else if (key == "exhaustive_resolution_m")
                c.exhaustive_resolution_m = number();
            else if (key == "method")
            {
                c.method = lower(value);
                if (!methods.count(c.method))
                    fail_line(line_no, "unknown method '" + c.method + "'");
            }
            else if (key == "sweep_param")
            {
                sweep_param = std::string(value);
                if (!sweep_parameters.count(*sweep_param))
                    fail_line(line_no, "cannot sweep '" + *sweep_param + "'");
            }
            else if (key == "sweep_from")
                sweep_from = number();
            else if (key == "sweep_to")
                sweep_to = number();
            else if (key == "sweep_steps")
            {
                int s = 0;
                if (!to_integer(value, s) || s < 1)
                    fail_line(line_no, "sweep_steps expects a positive integer");
                sweep_steps = s;
            }
            else if (key == "series")
            {
                for (std::string_view item : split(value, ','))
                {
                    try
                    {
                        parse_series(item);
                    }
                    catch (const ParseError &e)
                    {
                        fail_line(line_no, e.what());
                    }
                    c.series.emplace_back(item);
                }
            }
            else if (key == "curve_m_users")
            {
                for (std::string_view item : split(value, ','))
                {
                    std::size_t m = 0;
                    if (!to_integer(item, m))
                        fail_line(line_no, "bad user count '" + std::string(item) + "'");
                    c.curve_m_users.push_back(m);
                }
            }
            else
                fail_line(line_no, "unknown key '" + key + "'");
        }

        if (sweep_param || sweep_from || sweep_to || sweep_steps)
        {
            if (!(sweep_param && sweep_from && sweep_to && sweep_steps))
                throw ParseError("sweep needs sweep_param, sweep_from, sweep_to and sweep_steps together");
            c.sweep = SweepSpec{*sweep_param, *sweep_from, *sweep_to, *sweep_steps};
        }
        return c;
    }

    ScenarioConfig load_config(const std::string &path)
    {
        try
        {
            return parse_config(read_file(path));
        }
        catch (const ParseError &e)
        {
            throw ParseError(path + ": " + e.what());
        }
    }

    UserLayout parse_layout(std::string_view text)
    {
        UserLayout users;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text)};
        for (std::string raw; std::getline(in, raw);)
        {
            ++line_no;
            std::string_view line = raw;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            std::vector<std::string_view> fields;
            for (std::size_t pos = 0; pos < line.size();)
            {
                const std::size_t b = line.find_first_not_of(" \t,", pos);
                if (b == std::string_view::npos)
                    break;
                const std::size_t e = std::min(line.find_first_of(" \t,", b), line.size());
                fields.push_back(line.substr(b, e - b));
                pos = e;
            }
            Position p;
            if (fields.size() != 2 || !to_double(fields[0], p.x) || !to_double(fields[1], p.y))
                fail_line(line_no, "expected two numbers 'x y', got '" + std::string(line) + "'");
            users.positions.push_back(p);
        }
        if (users.positions.empty())
            throw ParseError("layout has no user positions");
        return users;
    }

    UserLayout load_layout(const std::string &path)
    {
        try
        {
            return parse_layout(read_file(path));
        }
        catch (const ParseError &e)
        {
            throw ParseError(path + ": " + e.what());
        }
    }

    std::string preset_directory()
    {
        if (const char *env = std::getenv("EDMA_CONFIG_DIR"); env && *env)
            return env;
        return EDMA_DEFAULT_CONFIG_DIR;
    }

    std::vector<std::string> preset_names()
    {
        std::vector<std::string> names;
        std::error_code ec;
        for (const auto &entry : std::filesystem::directory_iterator(preset_directory(), ec))
            if (entry.is_regular_file() && entry.path().extension() == ".cfg")
                names.push_back(entry.path().stem().string());
        std::sort(names.begin(), names.end());
        return names;
    }

    ScenarioConfig load_preset(const std::string &name)
    {
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), name) == names.end())
        {
            std::string msg = "unknown preset '" + name + "'; available:";
            for (const auto &n : names)
                msg += " " + n;
            if (names.empty())
                msg += " (none found in " + preset_directory() + ")";
            throw ParseError(msg);
        }
        return load_config((std::filesystem::path(preset_directory()) / (name + ".cfg")).string());
    }

    std::string format_number(double value)
    {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
        return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
    }

    // ---------------------------------------------------------------- validate

    ValidationHooks ValidationHooks::library()
    {
        return {[](double phi, double L) { return edma::t1(phi, L); },
                [](double a, double W) { return edma::g1(a, W); },
                [](double y, const SystemParams &p) { return edma::beta_star(y, p); }};
    }

    namespace
    {
        struct SuiteResult
        {
            std::string name;
            std::size_t cases = 0;
            double max_error = 0.0;
            double tolerance = 0.0;
            bool passed() const { return max_error <= tolerance; }
        };

        template <class F>
        double quad(F f, double a, double b)
        {
            return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
        }

        template <class F>
        double over_separation(F f, double L)
        {
            auto g = [&](double z) { return f(z) * separation_pdf(z, L); };
            return quad(g, 0.0, 0.5 * L) + quad(g, 0.5 * L, L);
        }

        SuiteResult suite_t1(const ValidationHooks &h)
        {
            SuiteResult r{"t1_quadrature", 100, 0.0, 1e-9};
            Rng rng = substream(101, 0);
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                const double phi = 0.001 + 0.2 * uniform01(rng);
                const double L = 5.0 + 95.0 * uniform01(rng);
                const double q = over_separation([&](double z) { return std::exp(-phi * z * z); }, L);
                r.max_error = std::max(r.max_error, std::abs(h.t1(phi, L) - q));
            }
            return r;
        }

        SuiteResult suite_g1(const ValidationHooks &h)
        {
            SuiteResult r{"g1_quadrature", 100, 0.0, 1e-9};
            Rng rng = substream(102, 0);
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                const double a = std::pow(10.0, -1.0 + 7.0 * uniform01(rng));
                const double W = 1.0 + 30.0 * uniform01(rng);
                const double q = quad([&](double y) { return std::log2(y * y + a); }, 0.0, 0.5 * W);
                r.max_error = std::max(r.max_error, std::abs(h.g1(a, W) - q) / std::max(1.0, std::abs(q)));
            }
            return r;
        }

        // Relative error of the two-user gain bound against a nested quadrature of its expectation.
        SuiteResult suite_gain_bound()
        {
            SuiteResult r{"gain_bound_quadrature", 3, 0.0, 1e-6};
            Rng rng = substream(103, 0);
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                const double phi = 0.005 + 0.095 * uniform01(rng);
                const double L = 10.0 + 70.0 * uniform01(rng);
                const double W = 5.0 + 15.0 * uniform01(rng);
                const double d = 2.0 + 3.0 * uniform01(rng);
                const SystemParams p = SystemParams::make(28e9, d, phi, 30.0, -90.0);
                const double d2 = d * d, re = p.snr_scale();
                auto rate = [&](double y) { return std::log2(1.0 + re / (y * y + d2)); };
                auto inner = [&](double z)
                {
                    auto over_y1 = [&](double y1)
                    {
                        auto over_y2 = [&](double y2)
                        {
                            const double b1 = -std::expm1(-phi * (z * z + y2 * y2 + d2));
                            const double b2 = -std::expm1(-phi * (z * z + y1 * y1 + d2));
                            return rate(y1) * (b1 - 0.5) + rate(y2) * (b2 - 0.5);
                        };
                        return quad(over_y2, -0.5 * W, 0.5 * W) / W;
                    };
                    return quad(over_y1, -0.5 * W, 0.5 * W) / W;
                };
                const double ref = over_separation(inner, L);
                const double got = ergodic_gain_lb(p, L, W).value;
                r.max_error = std::max(r.max_error, std::abs(got - ref) / std::max(1e-12, std::abs(ref)));
            }
            return r;
        }

        double los(std::size_t i, std::size_t m, const UserLayout &u, const AntennaLayout &a, const SystemParams &p)
        {
            if (i == m && p.assume_serving_los)
                return 1.0;
            if (!link_considered(i, m, p))
                return 0.0;
            return blockage_probability(u[i], a[m], p);
        }

        // Probability-weighted enumeration of every LoS matrix.
        double enumerate_sum(Link link, const UserLayout &u, const AntennaLayout &a, const SystemParams &p)
        {
            const std::size_t M = u.size(), n = M * M;
            double total = 0.0;
            BlockageRealization alpha(M, false);
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
            {
                double w = 1.0;
                for (std::size_t k = 0; k < n; ++k)
                {
                    const bool on = (mask >> k) & 1u;
                    const double pl = los(k / M, k % M, u, a, p);
                    alpha.set(k / M, k % M, on);
                    w *= on ? pl : 1.0 - pl;
                }
                if (w == 0.0)
                    continue;
                for (std::size_t m = 0; m < M; ++m)
                    total += w * rate_sampled(link, m, u, a, alpha, p);
            }
            return total;
        }

        UserLayout random_layout(const ServiceArea &area, Rng &rng)
        {
            return sample_user_layout(area, rng);
        }

        SuiteResult suite_enumeration()
        {
            SuiteResult r{"enumeration_exact", 40, 0.0, 1e-12};
            Rng rng = substream(104, 0);
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                SystemParams p = SystemParams::make(28e9, 3.0, 0.01 + 0.05 * uniform01(rng), 30.0, -90.0);
                p.adjacent_only = k % 2 == 0;
                p.assume_serving_los = k % 4 < 2;
                const ServiceArea area = ServiceArea::equal_split(12.0, 10.0, 3);
                const UserLayout u = random_layout(area, rng);
                AntennaLayout a;
                for (const Segment &s : area.segments)
                    a.x_pin.push_back(s.x_start + s.width() * uniform01(rng));
                const Link link = k % 8 < 4 ? Link::Uplink : Link::Downlink;
                const double exact = enumerate_sum(link, u, a, p);
                const double averaged = edma_sum_rate(link, u, a, p, RateModel::BlockAveraged).sum;
                r.max_error = std::max(r.max_error, std::abs(exact - averaged) / std::max(1.0, std::abs(exact)));
            }
            return r;
        }

        // Largest |z-score| of the sampled mean against the block average.
        SuiteResult suite_sampling()
        {
            SuiteResult r{"sampling_zscore", 10, 0.0, 4.5};
            Rng rng = substream(105, 0);
            const std::size_t draws = 20000;
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                SystemParams p = SystemParams::make(28e9, 3.0, 0.02, 30.0, -90.0);
                p.adjacent_only = k % 2 == 0;
                const ServiceArea area = ServiceArea::equal_split(12.0, 10.0, 3);
                const UserLayout u = random_layout(area, rng);
                const AntennaLayout a = AntennaLayout::at_users(u);
                const Link link = k < r.cases / 2 ? Link::Uplink : Link::Downlink;
                const double averaged = edma_sum_rate(link, u, a, p, RateModel::BlockAveraged).sum;
                const auto samples = run_trials(draws, 1000 + k,
                                                [&](std::size_t, Rng &g)
                                                {
                                                    const BlockageRealization al = sample_blockage(u, a, p, g);
                                                    return edma_sum_rate(link, u, a, p, RateModel::Sampled, &al).sum;
                                                });
                const McEstimate e = summarize(samples, 1000 + k);
                const double z = e.stderr_ > 0.0 ? std::abs(e.mean - averaged) / e.stderr_
                                                 : (std::abs(e.mean - averaged) > 1e-12 ? 1e9 : 0.0);
                r.max_error = std::max(r.max_error, z);
            }
            return r;
        }

        SuiteResult suite_derivatives()
        {
            SuiteResult r{"derivatives", 1000, 0.0, 1e-6};
            Rng rng = substream(106, 0);
            auto central = [](auto f, double x, double h) { return (f(x + h) - f(x - h)) / (2.0 * h); };
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                const SystemParams p =
                    SystemParams::make(28e9, 3.0, 0.005 + 0.1 * uniform01(rng), 20.0 + 20.0 * uniform01(rng), -90.0);
                const double y = 10.0 * (uniform01(rng) - 0.5);
                const double z = 20.0 * (uniform01(rng) - 0.5);
                const double x = 10.0 * (uniform01(rng) - 0.5);
                const double h = 1e-5 * (1.0 + std::abs(z));
                const double d1 = f_m1_derivative(z, y, p);
                const double fd1 = central([&](double t) { return f_m1(t, y, p); }, z, h);
                const double d2 = f_m2_derivative(z, x, y, p);
                const double fd2 = central([&](double t) { return f_m2(t, x, y, p); }, z, h);
                r.max_error = std::max({r.max_error, std::abs(d1 - fd1) / (std::abs(d1) + 1e-3),
                                        std::abs(d2 - fd2) / (std::abs(d2) + 1e-3)});
            }
            return r;
        }

        SuiteResult suite_beta_star(const ValidationHooks &h)
        {
            SuiteResult r{"beta_star_residual", 200, 0.0, 1e-9};
            Rng rng = substream(107, 0);
            for (std::size_t k = 0; k < r.cases; ++k)
            {
                const double d = 2.0 + 3.0 * uniform01(rng);
                const SystemParams p = SystemParams::make(28e9, d, 0.001 + 0.5 * uniform01(rng), 30.0, -90.0);
                const double y = 10.0 * (uniform01(rng) - 0.5);
                const double b = h.beta_star(y, p);
                const double phi = p.blockage_phi;
                const double residual = -std::expm1(-phi * (b * b + y * y + d * d)) - 2.0 * phi * b * b;
                r.max_error = std::max(r.max_error, std::abs(residual));
            }
            return r;
        }
    }

    int cmd_validate(std::ostream &out, const ValidationHooks &hooks)
    {
        const std::vector<SuiteResult> results = {suite_t1(hooks),      suite_g1(hooks),   suite_gain_bound(),
                                                  suite_enumeration(),  suite_sampling(),  suite_derivatives(),
                                                  suite_beta_star(hooks)};
        bool ok = true;
        out << "suite,cases,max_error,tolerance,status\n";
        for (const SuiteResult &r : results)
        {
            ok = ok && r.passed();
            out << r.name << ',' << r.cases << ',' << format_number(r.max_error) << ','
                << format_number(r.tolerance) << ',' << (r.passed() ? "PASS" : "FAIL") << '\n';
        }
        return ok ? exit_ok : exit_validation;
    }

    // ---------------------------------------------------------------- rates

    namespace
    {
        void header(std::ostream &out, const char *command, const ScenarioConfig &c)
        {
            const SystemParams p = c.params();
            out << "# edma " << command << " seed=" << c.seed << " trials=" << c.trials << '\n';
            out << "# rho=" << format_number(p.rho) << " eta=" << format_number(p.eta)
                << " rho_eta=" << format_number(p.snr_scale()) << " phi=" << format_number(c.phi)
                << " adjacent_only=" << (c.adjacent_only ? "true" : "false")
                << " assume_serving_los=" << (c.assume_serving_los ? "true" : "false") << '\n';
        }

        void check_layout(const ScenarioConfig &c, const UserLayout &users, const ServiceArea &area)
        {
            if (users.size() != c.m_users)
                throw ValidationError("layout has " + std::to_string(users.size()) + " users but m_users = " +
                                      std::to_string(c.m_users));
            try
            {
                users.validate(area);
            }
            catch (const std::invalid_argument &e)
            {
                throw ValidationError(e.what());
            }
        }

        McOptions mc_options(const ScenarioConfig &c)
        {
            McOptions o;
            o.model = c.rate_model;
            o.metric = c.metric;
            o.centerline = c.centerline;
            o.golden_epsilon = c.golden_epsilon_m;
            o.exhaustive_resolution = c.exhaustive_resolution_m;
            return o;
        }
    }

    int cmd_rates(const ScenarioConfig &config, const UserLayout &users, std::ostream &out)
    {
        config.validate();
        const SystemParams p = config.params();
        const ServiceArea area = config.area();
        check_layout(config, users, area);
        const McOptions options = mc_options(config);
        const std::size_t M = users.size();

        struct Column
        {
            std::string scheme, model;
            std::vector<double> per_user;
        };
        std::vector<Column> columns;
        for (Link link : {Link::Uplink, Link::Downlink})
        {
            const AntennaLayout a = apply_antenna_rule(config.antenna_rule, link, users, area, p, options);
            const std::string scheme(to_string(edma_scheme(link)));

            // Sampled rows: mean over independent blockage draws.
            std::vector<double> sampled(M, 0.0);
            for (std::size_t m = 0; m < M; ++m)
            {
                const auto draws = run_trials(config.trials, config.seed + m,
                                              [&](std::size_t, Rng &g)
                                              {
                                                  const BlockageRealization al = sample_blockage(users, a, p, g);
                                                  return rate_sampled(link, m, users, a, al, p);
                                              });
                sampled[m] = summarize(draws, config.seed).mean;
            }
            columns.push_back({scheme, std::string(to_string(RateModel::Sampled)), sampled});
            columns.push_back({scheme, std::string(to_string(RateModel::BlockAveraged)),
                               edma_sum_rate(link, users, a, p, RateModel::BlockAveraged).per_user});
            columns.push_back({scheme, std::string(to_string(RateModel::LowerBound)),
                               edma_sum_rate(link, users, a, p, RateModel::LowerBound).per_user});
        }
        columns.push_back({std::string(to_string(Scheme::TdmaPinch)), "NONE", tdma_pinch_report(users, p).per_user});
        columns.push_back({std::string(to_string(Scheme::TdmaConv)), "NONE", tdma_conv_report(users, p).per_user});

        header(out, "rates", config);
        out << "# antenna_rule=" << to_string(config.antenna_rule) << '\n';
        out << "user,scheme,model,rate_bps_hz\n";
        for (std::size_t m = 0; m < M; ++m)
            for (const Column &col : columns)
                out << m + 1 << ',' << col.scheme << ',' << col.model << ',' << format_number(col.per_user[m]) << '\n';
        return exit_ok;
    }

    // ---------------------------------------------------------------- sweep

    namespace
    {
        ScenarioConfig at_point(const ScenarioConfig &base, const std::string &parameter, double v)
        {
            ScenarioConfig c = base;
            if (parameter == "tx_dbm")
                c.tx_dbm = v;
            else if (parameter == "phi")
                c.phi = v;
            else if (parameter == "dl_m")
            {
                // explicit widths keep their proportions
                for (double &w : c.segment_widths)
                    w *= v / base.dl_m;
                c.dl_m = v;
            }
            else if (parameter == "m_users")
                c.m_users = static_cast<std::size_t>(std::llround(v));
            else if (parameter == "segment_width")
                c.dl_m = v * static_cast<double>(c.m_users);
            return c;
        }

        struct Row
        {
            std::string scheme, rule;
            McEstimate estimate;
        };

        void require_two_users(const ScenarioConfig &c, const std::string &series)
        {
            if (c.m_users != 2)
                throw ValidationError("series " + series + " is defined for two users only");
        }

        Row evaluate(const ScenarioConfig &c, const SeriesSpec &s)
        {
            const SystemParams p = c.params();
            const ServiceArea area = c.area();
            const McOptions o = mc_options(c);
            const AntennaRule rule = s.rule.value_or(c.antenna_rule);
            const std::string rule_name(to_string(rule));
            const std::size_t n = c.trials;

            if (s.name == "EDMA" || s.name == "EDMA_UL" || s.name == "EDMA_DL")
            {
                const Link link = s.name == "EDMA" ? c.link : (s.name == "EDMA_UL" ? Link::Uplink : Link::Downlink);
                return {s.name, rule_name, ergodic_sum_rate(edma_scheme(link), rule, p, area, n, c.seed, o)};
            }
            if (s.name == "TDMA_PINCH")
                return {s.name, "NONE", ergodic_sum_rate(Scheme::TdmaPinch, AntennaRule::AtUser, p, area, n, c.seed, o)};
            if (s.name == "TDMA_CONV")
                return {s.name, "NONE", ergodic_sum_rate(Scheme::TdmaConv, AntennaRule::AtUser, p, area, n, c.seed, o)};
            if (s.name == "GAIN" || s.name == "GAIN_LB_MC")
            {
                McOptions g = o;
                if (s.name == "GAIN_LB_MC")
                    g.model = RateModel::LowerBound;
                return {s.name, rule_name, ergodic_gain(c.link, rule, p, area, n, c.seed, g)};
            }
            if (s.name == "GAIN_LB")
            {
                require_two_users(c, s.name);
                const GainBound b = c.centerline ? ergodic_gain_lb_centerline(p, c.dl_m)
                                                 : ergodic_gain_lb(p, c.dl_m, c.dw_m);
                return {s.name, "ANALYTIC", McEstimate{b.value, 0.0, 0, c.seed}};
            }
            if (s.name == "WIN")
            {
                require_two_users(c, s.name);
                return {s.name, "AT_USER", win_probability(p, area, n, c.seed, o)};
            }
            if (s.name == "WIN_LB")
            {
                require_two_users(c, s.name);
                return {s.name, "ANALYTIC", McEstimate{win_probability_lb(c.phi, c.d_m, c.dl_m), 0.0, 0, c.seed}};
            }
            // USER_RATE_FULL / USER_RATE_ADJ: block-averaged rate of the focus user
            SystemParams q = p;
            q.adjacent_only = s.name == "USER_RATE_ADJ";
            const std::size_t m = c.focus_user - 1;
            const auto samples = run_trials(n, c.seed,
                                            [&](std::size_t, Rng &rng)
                                            {
                                                UserLayout u = sample_user_layout(area, rng);
                                                if (c.centerline)
                                                    for (Position &pos : u.positions)
                                                        pos.y = 0.0;
                                                const AntennaLayout a = apply_antenna_rule(rule, c.link, u, area, q, o);
                                                return rate_blockavg(c.link, m, u, a, q);
                                            });
            return {s.name, rule_name, summarize(samples, c.seed)};
        }
    }

    int cmd_sweep(const ScenarioConfig &config, std::ostream &out)
    {
        config.validate();
        if (config.series.empty())
            throw ValidationError("sweep needs a non-empty series list");
        const SweepSpec spec = config.sweep.value_or(SweepSpec{"tx_dbm", config.tx_dbm, config.tx_dbm, 1});
        std::vector<SeriesSpec> series;
        for (const std::string &token : config.series)
            series.push_back(parse_series(token));

        const std::vector<std::size_t> curves =
            config.curve_m_users.empty() ? std::vector<std::size_t>{0} : config.curve_m_users;

        // Evaluate everything before printing so a failure leaves no partial CSV.
        std::ostringstream body;
        for (double v : spec.values())
        {
            for (std::size_t curve : curves)
            {
                ScenarioConfig point = at_point(config, spec.parameter, v);
                if (curve != 0)
                    point.m_users = curve;
                if (point.focus_user > point.m_users)
                    point.focus_user = (point.m_users + 1) / 2;
                point.validate();
                for (const SeriesSpec &s : series)
                {
                    Row row = evaluate(point, s);
                    if (curve != 0)
                        row.scheme += "_M" + std::to_string(curve);
                    body << format_number(v) << ',' << row.scheme << ',' << row.rule << ','
                         << format_number(row.estimate.mean) << ',' << format_number(row.estimate.stderr_) << ','
                         << row.estimate.trials << ',' << row.estimate.seed << '\n';
                }
            }
        }
        header(out, "sweep", config);
        out << "# sweep " << spec.parameter << " from " << format_number(spec.from) << " to "
            << format_number(spec.to) << " in " << spec.steps << " steps\n";
        out << "swept_value,scheme,antenna_rule,mean,stderr,trials,seed\n" << body.str();
        return exit_ok;
    }

    // ---------------------------------------------------------------- optimize

    int cmd_optimize(const ScenarioConfig &config, const UserLayout &users, std::ostream &out)
    {
        config.validate();
        const SystemParams p = config.params();
        const ServiceArea area = config.area();
        check_layout(config, users, area);
        const Link link = config.link;
        const std::string &method = config.method;

        PlacementResult result;
        std::optional<double> sca_objective;
        if (method == "golden")
        {
            if (link != Link::Uplink)
                throw ValidationError("method golden optimizes the uplink; set link = ul");
            result = optimize_uplink_placements(users, area, p, config.golden_epsilon_m);
        }
        else if (method == "sca")
        {
            if (link != Link::Downlink)
                throw ValidationError("method sca optimizes the downlink; set link = dl");
            const ScaResult r = sca_optimize(users, area, p);
            sca_objective = r.sca_objective;
            result = r;
        }
        else if (method == "exhaustive")
        {
            try
            {
                result = exhaustive_placement(users, area, p, config.exhaustive_resolution_m, link);
            }
            catch (const std::invalid_argument &e)
            {
                throw ValidationError(std::string("exhaustive search refused: ") + e.what());
            }
        }
        else
        {
            AntennaLayout a;
            if (method == "fixed")
                a = AntennaLayout::at_users(users);
            else if (method == "midpoint")
                a = midpoint_heuristic(users, area);
            else
                a = apply_antenna_rule(AntennaRule::FixedCenter, link, users, area, p);
            result = evaluate_placement(link, users, a, p);
        }
        // every method reports the exact block-averaged rates
        const PlacementResult eval = evaluate_placement(link, users, result.antennas, p);

        header(out, "optimize", config);
        out << "# method=" << method << " link=" << to_string(link) << '\n';
        out << "segment,x_user,x_pin,rate_bps_hz\n";
        for (std::size_t m = 0; m < users.size(); ++m)
            out << m + 1 << ',' << format_number(users[m].x) << ',' << format_number(result.antennas[m]) << ','
                << format_number(eval.per_user_rate[m]) << '\n';
        out << "# min_rate=" << format_number(eval.objective) << '\n';
        out << "# iterations=" << result.iterations << '\n';
        out << "# converged=" << (result.converged ? "true" : "false") << '\n';
        if (sca_objective)
            out << "# sca_min_rate_before_refinement=" << format_number(*sca_objective) << '\n';
        return exit_ok;
    }
}
