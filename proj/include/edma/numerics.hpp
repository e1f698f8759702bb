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

#ifndef EDMA_NUMERICS_HPP
#define EDMA_NUMERICS_HPP

namespace edma
{
    /// Probability integral Phi(x) = (2/sqrt(pi)) * integral_0^x exp(-t^2) dt, i.e. the error function.
    /// Throws std::domain_error for non-finite input.
    double probability_integral(double x);

    /// Principal branch W0 of the Lambert function restricted to [-1/e, 0].
    /// The result w satisfies w * exp(w) = x with |residual| <= 1e-12.
    /// Throws std::domain_error outside [-1/e, 0].
    double lambert_w0(double x);

    /// Halley iteration controls used by lambert_w0.
    inline constexpr double lambert_tolerance = 1e-13;
    inline constexpr int lambert_max_iterations = 50;
}

#endif
