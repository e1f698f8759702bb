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

// Independent reference implementations used by the test suites.

#ifndef EDMA_TESTS_ORACLES_HPP
#define EDMA_TESTS_ORACLES_HPP

#include "edma/model.hpp"
#include "edma/rates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle
{
    template <class F>
    double integrate(F f, double a, double b, double tol = 1e-13)
    {
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
    }

    template <class F>
    double integrate_ts(F f, double a, double b)
    {
        static const boost::math::quadrature::tanh_sinh<double> ts;
        return ts.integrate(f, a, b);
    }

    // Maclaurin series of erf in long double, summed until terms vanish.
    inline double erf_series(double xd)
    {
        const long double x = xd;
        long double term = x, sum = x;
        for (int n = 1; n < 400; ++n)
        {
            term *= -x * x / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum))
                break;
        }
        return static_cast<double>(sum * 2.0L / std::sqrt(std::numbers::pi_v<long double>));
    }

    // erfc(x) for x >= 2 by the Laplace continued fraction, evaluated bottom-up.
    inline double erfc_cf(double xd)
    {
        const long double x = xd;
        long double f = x;
        for (int k = 200; k >= 1; --k)
            f = x + (k / 2.0L) / f;
        return static_cast<double>(std::exp(-x * x) / (std::sqrt(std::numbers::pi_v<long double>) * f));
    }

    // Bisection then Newton on w e^w = x in long double, principal branch.
    inline double lambert_w0(double xd)
    {
        const long double x = xd;
        long double lo = -1.0L, hi = 0.0L;
        if (x > 0)
            hi = 1.0L;
        for (int i = 0; i < 200; ++i)
        {
            const long double mid = 0.5L * (lo + hi);
            if (mid * std::exp(mid) < x)
                lo = mid;
            else
                hi = mid;
        }
        long double w = 0.5L * (lo + hi);
        for (int i = 0; i < 5 && w > -1.0L + 1e-9L; ++i)
            w -= (w * std::exp(w) - x) / (std::exp(w) * (w + 1.0L));
        return static_cast<double>(w);
    }

    inline double sqdist(const edma::Position &u, double x_pin, double d)
    {
        return (u.x - x_pin) * (u.x - x_pin) + u.y * u.y + d * d;
    }

    // Probability that link (user i, antenna m) is LoS.
    inline double los_probability(std::size_t i, std::size_t m, const edma::UserLayout &users,
                                  const edma::AntennaLayout &antennas, const edma::SystemParams &p)
    {
        if (i == m && p.assume_serving_los)
            return 1.0;
        const std::size_t gap = i > m ? i - m : m - i;
        if (p.adjacent_only && gap >= 2)
            return 0.0;
        return std::exp(-p.blockage_phi * sqdist(users[i], antennas[m], p.height));
    }

    // Sum rate from the SINR definition for a full LoS matrix alpha[i][m] (user i, antenna m).
    inline double sinr_sum_rate(edma::Link link, const std::vector<std::vector<int>> &alpha,
                                const edma::UserLayout &users, const edma::AntennaLayout &antennas,
                                const edma::SystemParams &p)
    {
        const std::size_t M = users.size();
        const double rho_eta = p.rho * p.eta;
        double sum = 0.0;
        for (std::size_t m = 0; m < M; ++m)
        {
            const double s = alpha[m][m] * rho_eta / sqdist(users[m], antennas[m], p.height);
            double interference = 0.0;
            for (std::size_t i = 0; i < M; ++i)
            {
                if (i == m)
                    continue;
                if (link == edma::Link::Uplink)
                    interference += alpha[i][m] * rho_eta / sqdist(users[i], antennas[m], p.height);
                else
                    interference += alpha[m][i] * rho_eta / sqdist(users[m], antennas[i], p.height);
            }
            sum += std::log2(1.0 + s / (interference + 1.0));
        }
        return sum;
    }

    // Probability-weighted sum over all 2^(M*M) LoS matrices.
    template <class Rate>
    double enumerate_blockage(const edma::UserLayout &users, const edma::AntennaLayout &antennas,
                              const edma::SystemParams &p, Rate rate)
    {
        const std::size_t M = users.size();
        const std::size_t n = M * M;
        double total = 0.0;
        std::vector<std::vector<int>> alpha(M, std::vector<int>(M));
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
        {
            double weight = 1.0;
            for (std::size_t k = 0; k < n && weight > 0.0; ++k)
            {
                const std::size_t i = k / M, m = k % M;
                alpha[i][m] = static_cast<int>((mask >> k) & 1u);
                const double pl = los_probability(i, m, users, antennas, p);
                weight *= alpha[i][m] ? pl : 1.0 - pl;
            }
            if (weight > 0.0)
                total += weight * rate(alpha);
        }
        return total;
    }
}

#endif
