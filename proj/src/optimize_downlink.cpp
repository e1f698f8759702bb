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

#include "edma/optimize_downlink.hpp"

#include "edma/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace edma
{
    namespace
    {
        double lateral(double y, const SystemParams &params)
        {
            return y * y + params.height * params.height;
        }
    }

    double f_m1(double z, double y, const SystemParams &params)
    {
        return std::log(-std::expm1(-params.blockage_phi * (z * z + lateral(y, params))));
    }

    double f_m1_derivative(double z, double y, const SystemParams &params)
    {
        const double phi = params.blockage_phi;
        return 2.0 * phi * z / std::expm1(phi * (z * z + lateral(y, params)));
    }

    double f_m1_second_derivative(double z, double y, const SystemParams &params)
    {
        const double phi = params.blockage_phi;
        const double e = std::exp(-phi * (z * z + lateral(y, params)));
        const double nlos = -std::expm1(-phi * (z * z + lateral(y, params)));
        return 2.0 * phi * e * (nlos - 2.0 * phi * z * z) / (nlos * nlos);
    }

    double beta_star(double y, const SystemParams &params)
    {
        const double phi = params.blockage_phi;
        if (!(phi > 0.0))
            throw std::invalid_argument("beta_star: phi must be positive");
        const double w = lambert_w0(-0.5 * std::exp(-0.5 - phi * lateral(y, params)));
        return std::sqrt((1.0 + 2.0 * w) / (2.0 * phi));
    }

    namespace
    {
        struct ServingGeometry
        {
            double q;  // squared distance
            double a;  // rho eta
            double u;  // z - x
            double ln; // ln(1 + a / q)
        };

        ServingGeometry serving(double z, double x, double y, const SystemParams &params)
        {
            ServingGeometry s;
            s.u = z - x;
            s.q = s.u * s.u + lateral(y, params);
            s.a = params.snr_scale();
            s.ln = std::log1p(s.a / s.q);
            return s;
        }
    }

    double f_m2(double z, double x, double y, const SystemParams &params)
    {
        const ServingGeometry s = serving(z, x, y, params);
        if (!(s.ln > 0.0))
            throw std::domain_error("f_m2: serving rate underflows");
        return std::log(s.ln);
    }

    double f_m2_derivative(double z, double x, double y, const SystemParams &params)
    {
        const ServingGeometry s = serving(z, x, y, params);
        const double dln = -2.0 * s.a * s.u / (s.q * (s.q + s.a));
        return dln / s.ln;
    }

    double f_m2_second_derivative(double z, double x, double y, const SystemParams &params)
    {
        const ServingGeometry s = serving(z, x, y, params);
        const double den = s.q * s.q + s.a * s.q;
        const double dln = -2.0 * s.a * s.u / den;
        const double d2ln = -2.0 * s.a * (den - 2.0 * s.u * s.u * (2.0 * s.q + s.a)) / (den * den);
        return (d2ln * s.ln - dln * dln) / (s.ln * s.ln);
    }

    namespace
    {
        // Exact serving part of g_m: f_m2 plus the serving-link LoS log-probability when it is random.
        double serving_term(std::size_t m, const UserLayout &users, const AntennaLayout &x, const SystemParams &params)
        {
            double v = f_m2(x[m], users[m].x, users[m].y, params);
            if (!params.assume_serving_los)
                v -= params.blockage_phi * squared_distance(users[m], x[m], params.height);
            return v;
        }

        double serving_slope(std::size_t m, const UserLayout &users, const AntennaLayout &x, const SystemParams &params)
        {
            double v = f_m2_derivative(x[m], users[m].x, users[m].y, params);
            if (!params.assume_serving_los)
                v -= 2.0 * params.blockage_phi * (x[m] - users[m].x);
            return v;
        }

        double serving_curvature(std::size_t m, const UserLayout &users, const AntennaLayout &x,
                                 const SystemParams &params)
        {
            double v = f_m2_second_derivative(x[m], users[m].x, users[m].y, params);
            if (!params.assume_serving_los)
                v -= 2.0 * params.blockage_phi;
            return v;
        }

        // Antennas whose LoS link to user m is modelled (downlink interferers of m).
        std::vector<std::size_t> interferers(std::size_t m, std::size_t M, const SystemParams &params)
        {
            std::vector<std::size_t> out;
            for (std::size_t j = 0; j < M; ++j)
                if (j != m && link_considered(m, j, params))
                    out.push_back(j);
            return out;
        }
    }

    double original_constraint(std::size_t m, const UserLayout &users, const AntennaLayout &x,
                               const SystemParams &params)
    {
        double v = serving_term(m, users, x, params);
        for (std::size_t j : interferers(m, users.size(), params))
            v += f_m1(x[j] - users[m].x, users[m].y, params);
        return v;
    }

    double original_min_constraint(const UserLayout &users, const AntennaLayout &x, const SystemParams &params)
    {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < users.size(); ++m)
            v = std::min(v, original_constraint(m, users, x, params));
        return v;
    }

    SurrogateModel build_surrogate(const UserLayout &users, const AntennaLayout &linearization_point,
                                   const SystemParams &params)
    {
        if (linearization_point.size() != users.size())
            throw std::invalid_argument("build_surrogate: layout size mismatch");

        SurrogateModel model;
        model.users = users;
        model.params = params;
        model.linearization_point = linearization_point;
        model.constraints.resize(users.size());
        for (std::size_t m = 0; m < users.size(); ++m)
        {
            for (std::size_t j : interferers(m, users.size(), params))
            {
                const double z = linearization_point[j] - users[m].x;
                model.constraints[m].interference.push_back(
                    {j, linearization_point[j], f_m1(z, users[m].y, params), f_m1_derivative(z, users[m].y, params)});
            }
        }
        return model;
    }

    double SurrogateModel::value(std::size_t m, const AntennaLayout &x) const
    {
        double v = serving_term(m, users, x, params);
        for (const LinearizedTerm &t : constraints[m].interference)
            v += t.value + t.slope * (x[t.antenna] - t.anchor);
        return v;
    }

    void SurrogateModel::gradient(std::size_t m, const AntennaLayout &x, std::vector<double> &grad) const
    {
        grad.assign(size(), 0.0);
        grad[m] = serving_slope(m, users, x, params);
        for (const LinearizedTerm &t : constraints[m].interference)
            grad[t.antenna] += t.slope;
    }

    double SurrogateModel::curvature(std::size_t m, const AntennaLayout &x) const
    {
        return serving_curvature(m, users, x, params);
    }

    double SurrogateModel::min_value(const AntennaLayout &x) const
    {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < size(); ++m)
            v = std::min(v, value(m, x));
        return v;
    }

    namespace
    {
        void add_hessian(const SurrogateModel &model, std::size_t m, const AntennaLayout &x, double w,
                         Eigen::MatrixXd &hess)
        {
            const auto i = static_cast<Eigen::Index>(m);
            hess(i, i) += w * model.curvature(m, x);
        }

        // Exact per-user downlink log-rates, differentiated numerically.
        struct ExactModel
        {
            const UserLayout &users;
            const SystemParams &params;

            std::size_t size() const { return users.size(); }

            double value(std::size_t m, const AntennaLayout &x) const
            {
                return std::log(downlink_rate_blockavg(m, users, x, params));
            }

            void gradient(std::size_t m, const AntennaLayout &x, std::vector<double> &grad) const
            {
                grad.assign(size(), 0.0);
                AntennaLayout t = x;
                for (std::size_t j = 0; j < size(); ++j)
                {
                    const double h = 1e-6 * (1.0 + std::abs(x[j]));
                    t.x_pin[j] = x[j] + h;
                    const double up = value(m, t);
                    t.x_pin[j] = x[j] - h;
                    const double down = value(m, t);
                    t.x_pin[j] = x[j];
                    grad[j] = (up - down) / (2.0 * h);
                }
            }
        };

        void add_hessian(const ExactModel &model, std::size_t m, const AntennaLayout &x, double w,
                         Eigen::MatrixXd &hess)
        {
            const std::size_t M = model.size();
            AntennaLayout t = x;
            std::vector<double> up, down;
            Eigen::MatrixXd h_m(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
            for (std::size_t j = 0; j < M; ++j)
            {
                const double h = 1e-4 * (1.0 + std::abs(x[j]));
                t.x_pin[j] = x[j] + h;
                model.gradient(m, t, up);
                t.x_pin[j] = x[j] - h;
                model.gradient(m, t, down);
                t.x_pin[j] = x[j];
                for (std::size_t i = 0; i < M; ++i)
                    h_m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (up[i] - down[i]) / (2.0 * h);
            }
            hess += w * 0.5 * (h_m + h_m.transpose());
        }

        // Soft-min -(1/tau) log sum exp(-tau g_m) with its gradient and Hessian.
        struct SmoothedMin
        {
            double value = 0.0;
            Eigen::VectorXd grad;
            Eigen::MatrixXd hess;
        };

        template <class Model>
        SmoothedMin smoothed_min(const Model &model, const AntennaLayout &x, double tau, bool with_hessian)
        {
            const std::size_t M = model.size();
            std::vector<double> g(M);
            for (std::size_t m = 0; m < M; ++m)
                g[m] = model.value(m, x);
            const double gmin = *std::min_element(g.begin(), g.end());

            std::vector<double> w(M);
            double total = 0.0;
            for (std::size_t m = 0; m < M; ++m)
            {
                w[m] = std::exp(-tau * (g[m] - gmin));
                total += w[m];
            }

            SmoothedMin s;
            s.value = gmin - std::log(total) / tau;
            s.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
            if (with_hessian)
                s.hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));

            std::vector<double> gm;
            Eigen::MatrixXd outer;
            if (with_hessian)
                outer = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
            for (std::size_t m = 0; m < M; ++m)
            {
                w[m] /= total;
                if (w[m] == 0.0)
                    continue;
                model.gradient(m, x, gm);
                const Eigen::Map<const Eigen::VectorXd> v(gm.data(), static_cast<Eigen::Index>(M));
                s.grad += w[m] * v;
                if (with_hessian)
                {
                    add_hessian(model, m, x, w[m], s.hess);
                    outer += w[m] * v * v.transpose();
                }
            }
            if (with_hessian)
                s.hess -= tau * (outer - s.grad * s.grad.transpose());
            return s;
        }

        AntennaLayout project(const Eigen::VectorXd &v, const ServiceArea &area)
        {
            AntennaLayout a;
            a.x_pin.resize(area.size());
            for (std::size_t m = 0; m < area.size(); ++m)
                a.x_pin[m] = area.segments[m].clamp(v[static_cast<Eigen::Index>(m)]);
            return a;
        }

        Eigen::VectorXd as_vector(const AntennaLayout &a)
        {
            return Eigen::Map<const Eigen::VectorXd>(a.x_pin.data(), static_cast<Eigen::Index>(a.size()));
        }

        // Projected Newton ascent on the soft-min at a fixed temperature.
        template <class Model>
        AntennaLayout ascend(const Model &model, const ServiceArea &area, AntennaLayout x, double tau)
        {
            const std::size_t M = model.size();
            const auto n = static_cast<Eigen::Index>(M);
            for (int it = 0; it < 100; ++it)
            {
                const SmoothedMin s = smoothed_min(model, x, tau, true);

                std::vector<Eigen::Index> free;
                for (std::size_t m = 0; m < M; ++m)
                {
                    const Segment &seg = area.segments[m];
                    const double gi = s.grad[static_cast<Eigen::Index>(m)];
                    const double slack = 1e-12 * (1.0 + std::abs(x[m]));
                    const bool at_lower = x[m] <= seg.x_start + slack && gi < 0.0;
                    const bool at_upper = x[m] >= seg.x_end - slack && gi > 0.0;
                    if (!at_lower && !at_upper)
                        free.push_back(static_cast<Eigen::Index>(m));
                }
                if (free.empty())
                    break;

                const auto k = static_cast<Eigen::Index>(free.size());
                Eigen::VectorXd g_free(k);
                Eigen::MatrixXd a_free(k, k);
                for (Eigen::Index i = 0; i < k; ++i)
                {
                    g_free[i] = s.grad[free[i]];
                    for (Eigen::Index j = 0; j < k; ++j)
                        a_free(i, j) = -s.hess(free[i], free[j]);
                }
                if (g_free.lpNorm<Eigen::Infinity>() < 1e-13)
                    break;

                // Newton direction on |eigenvalues|, with steepest ascent as fallback
                const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_free);
                const Eigen::VectorXd lambda = eig.eigenvalues().cwiseAbs();
                const double floor = 1e-8 * std::max(1.0, lambda.maxCoeff());
                const Eigen::VectorXd newton =
                    eig.eigenvectors() *
                    (eig.eigenvectors().transpose() * g_free).cwiseQuotient(lambda.cwiseMax(floor));
                const Eigen::VectorXd steepest = g_free / std::max(floor, lambda.maxCoeff());

                const Eigen::VectorXd base = as_vector(x);
                bool moved = false;
                for (const Eigen::VectorXd *dir : {&newton, &steepest})
                {
                    if (!dir->allFinite())
                        continue;
                    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
                    for (Eigen::Index i = 0; i < k; ++i)
                        step[free[i]] = (*dir)[i];

                    for (double t = 1.0; t > 1e-20; t *= 0.5)
                    {
                        AntennaLayout trial = project(base + t * step, area);
                        const double ascent = s.grad.dot(as_vector(trial) - base);
                        const double value = smoothed_min(model, trial, tau, false).value;
                        if (value >= s.value + 1e-4 * ascent && value > s.value)
                        {
                            moved = true;
                            x = std::move(trial);
                            break;
                        }
                    }
                    if (moved)
                        break;
                }
                if (!moved)
                    break;
            }
            return x;
        }

        template <class Model>
        AntennaLayout continuation(const Model &model, const ServiceArea &area, AntennaLayout x)
        {
            for (double tau = 1.0; tau <= 1e8; tau *= 10.0)
                x = ascend(model, area, std::move(x), tau);
            return x;
        }
    }

    SurrogateSolution solve_surrogate(const SurrogateModel &model, const ServiceArea &area)
    {
        const std::size_t M = model.size();
        if (area.size() != M)
            throw std::invalid_argument("solve_surrogate: area does not match the model");
        for (const Segment &s : area.segments)
            if (!(s.x_end >= s.x_start))
                throw std::invalid_argument("solve_surrogate: infeasible box");

        std::vector<AntennaLayout> starts(5);
        for (AntennaLayout &s : starts)
            s.x_pin.resize(M);
        for (std::size_t m = 0; m < M; ++m)
        {
            const Segment &seg = area.segments[m];
            starts[0].x_pin[m] = seg.clamp(model.linearization_point[m]);
            starts[1].x_pin[m] = seg.center();
            starts[2].x_pin[m] = seg.clamp(model.users[m].x);
            starts[3].x_pin[m] = seg.x_start;
            starts[4].x_pin[m] = seg.x_end;
        }

        SurrogateSolution best;
        best.u = -std::numeric_limits<double>::infinity();
        for (AntennaLayout x : starts)
        {
            x = continuation(model, area, std::move(x));
            const double u = model.min_value(x);
            if (u > best.u)
            {
                best.u = u;
                best.antennas = std::move(x);
            }
        }
        if (!std::isfinite(best.u))
            throw std::runtime_error("solve_surrogate: no finite solution");
        return best;
    }

    bool surrogate_regime_valid(const UserLayout &users, const AntennaLayout &x, const SystemParams &params)
    {
        for (std::size_t m = 0; m < users.size(); ++m)
        {
            const double beta = beta_star(users[m].y, params);
            for (std::size_t j : interferers(m, users.size(), params))
                if (std::abs(x[j] - users[m].x) > beta)
                    return false;
            const double offset = x[m] - users[m].x;
            if (2.0 * offset * offset > lateral(users[m].y, params))
                return false;
        }
        return true;
    }

    namespace
    {
        double true_min_rate(const UserLayout &users, const AntennaLayout &x, const SystemParams &params)
        {
            double v = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < users.size(); ++m)
                v = std::min(v, downlink_rate_blockavg(m, users, x, params));
            return v;
        }

        AntennaLayout halfway(const AntennaLayout &a, const AntennaLayout &b)
        {
            AntennaLayout h = a;
            for (std::size_t m = 0; m < a.size(); ++m)
                h.x_pin[m] = 0.5 * (a[m] + b[m]);
            return h;
        }
    }

    AntennaLayout refine_downlink_placement(const UserLayout &users, const ServiceArea &area,
                                            const SystemParams &params, const AntennaLayout &start)
    {
        AntennaLayout x = start;
        for (std::size_t m = 0; m < x.size(); ++m)
            x.x_pin[m] = area.segments[m].clamp(x[m]);
        const ExactModel model{users, params};
        AntennaLayout y = continuation(model, area, x);
        return true_min_rate(users, y, params) > true_min_rate(users, x, params) ? y : x;
    }

    ScaResult sca_optimize(const UserLayout &users, const ServiceArea &area, const SystemParams &params,
                           const ScaOptions &options)
    {
        users.validate(area);

        AntennaLayout x = AntennaLayout::at_users(users);
        for (std::size_t m = 0; m < users.size(); ++m)
            x.x_pin[m] = area.segments[m].clamp(x[m]);

        AntennaLayout best_x = x;
        double best_true = true_min_rate(users, x, params);

        ScaResult result;
        if (!(params.blockage_phi > 0.0))
        {
            // every interfering link is LoS: the all-blocked surrogate is identically zero
            static_cast<PlacementResult &>(result) = evaluate_placement(Link::Downlink, users, x, params);
            result.sca_objective = result.objective;
            return result;
        }

        result.converged = false;
        double u_prev = original_min_constraint(users, x, params);
        for (int k = 1; k <= options.max_iterations; ++k)
        {
            SurrogateModel model = build_surrogate(users, x, params);
            SurrogateSolution sol;
            try
            {
                sol = solve_surrogate(model, area);
            }
            catch (const std::exception &)
            {
                break;
            }

            AntennaLayout candidate = sol.antennas;
            double u_new = sol.u;
            if (!surrogate_regime_valid(users, x, params) || !surrogate_regime_valid(users, candidate, params))
            {
                result.regime_valid = false;
                const double current = true_min_rate(users, x, params);
                int halvings = 0;
                while (true_min_rate(users, candidate, params) <= current && halvings < options.max_halvings)
                {
                    candidate = halfway(x, candidate);
                    ++halvings;
                }
                if (true_min_rate(users, candidate, params) <= current)
                {
                    result.converged = true; // no improving step along the surrogate direction
                    break;
                }
                u_new = model.min_value(candidate);
            }

            x = std::move(candidate);
            result.u_history.push_back(u_new);
            result.iterations = k;

            const double t = true_min_rate(users, x, params);
            if (t > best_true)
            {
                best_true = t;
                best_x = x;
            }
            if (std::abs(u_new - u_prev) < options.tolerance)
            {
                result.converged = true;
                break;
            }
            u_prev = u_new;
        }

        result.sca_objective = best_true;
        if (options.refine)
            best_x = refine_downlink_placement(users, area, params, best_x);

        const PlacementResult eval = evaluate_placement(Link::Downlink, users, best_x, params);
        result.antennas = eval.antennas;
        result.per_user_rate = eval.per_user_rate;
        result.objective = eval.objective;
        return result;
    }

    namespace
    {
        std::vector<double> grid_points(const Segment &seg, double resolution)
        {
            const auto n = static_cast<std::size_t>(std::ceil(seg.width() / resolution - 1e-9)) + 1;
            std::vector<double> pts(n);
            for (std::size_t k = 0; k < n; ++k)
                pts[k] = n == 1 ? seg.x_start
                                : seg.x_start + seg.width() * static_cast<double>(k) / static_cast<double>(n - 1);
            return pts;
        }
    }

    PlacementResult exhaustive_placement(const UserLayout &users, const ServiceArea &area,
                                         const SystemParams &params, double resolution, Link link)
    {
        users.validate(area);
        if (!(resolution > 0.0))
            throw std::invalid_argument("exhaustive_placement: resolution must be positive");

        const std::size_t M = users.size();
        std::vector<std::vector<double>> grids;
        double total = 1.0;
        for (const Segment &seg : area.segments)
        {
            grids.push_back(grid_points(seg, resolution));
            total = link == Link::Downlink ? total * static_cast<double>(grids.back().size())
                                           : total + static_cast<double>(grids.back().size());
        }
        if (total > max_exhaustive_points)
            throw std::invalid_argument("exhaustive_placement: grid exceeds 1e8 points");

        AntennaLayout x = AntennaLayout::at_users(users);
        if (link == Link::Uplink)
        {
            for (std::size_t m = 0; m < M; ++m)
            {
                double best = -std::numeric_limits<double>::infinity();
                double arg = x[m];
                AntennaLayout trial = x;
                for (double p : grids[m])
                {
                    trial.x_pin[m] = p;
                    const double r = uplink_rate_blockavg(m, users, trial, params);
                    if (r > best)
                    {
                        best = r;
                        arg = p;
                    }
                }
                x.x_pin[m] = arg;
            }
            return evaluate_placement(Link::Uplink, users, x, params);
        }

        if (M > 3)
            throw std::invalid_argument("exhaustive_placement: joint downlink search limited to M <= 3");

        std::vector<std::size_t> idx(M, 0);
        AntennaLayout trial = x;
        double best = -std::numeric_limits<double>::infinity();
        while (true)
        {
            for (std::size_t m = 0; m < M; ++m)
                trial.x_pin[m] = grids[m][idx[m]];
            double v = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < M && v > best; ++m)
                v = std::min(v, downlink_rate_blockavg(m, users, trial, params));
            if (v > best)
            {
                best = v;
                x = trial;
            }

            std::size_t m = 0;
            while (m < M && ++idx[m] == grids[m].size())
                idx[m++] = 0;
            if (m == M)
                break;
        }
        return evaluate_placement(Link::Downlink, users, x, params);
    }
}
