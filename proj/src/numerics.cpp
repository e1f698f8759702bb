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

#include "edma/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace edma
{
    double probability_integral(double x)
    {
        if (!std::isfinite(x))
            throw std::domain_error("probability_integral: non-finite argument");

        // glibc erf: piecewise rational approximations, max error below 1 ulp
        return std::erf(x);
    }

    namespace
    {
        // Series about the branch point in p = sqrt(2 (e x + 1)).
        double branch_point_seed(double x)
        {
            const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
            return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
        }
    }

    double lambert_w0(double x)
    {
        const double branch = -1.0 / std::numbers::e;
        if (!std::isfinite(x) || x > 0.0 || x < branch - 4.0 * std::numeric_limits<double>::epsilon())
            throw std::domain_error("lambert_w0: argument outside [-1/e, 0]");

        if (x == 0.0)
            return 0.0;
        if (x <= branch)
            return -1.0;

        double w = (x < -0.25) ? branch_point_seed(x) : x * (1.0 - x);
        for (int it = 0; it < lambert_max_iterations; ++it)
        {
            const double ew = std::exp(w);
            const double f = w * ew - x;
            const double wp1 = w + 1.0;
            if (wp1 <= 0.0)
                break;
            const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
            w -= step;
            if (w < -1.0)
                w = -1.0;
            if (std::abs(step) <= lambert_tolerance * (1.0 + std::abs(w)))
                break;
        }
        return w;
    }
}
