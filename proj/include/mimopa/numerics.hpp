// SPDX-License-Identifier: Apache-2.0
//
// mimopa: distortion-aware power allocation for massive-MIMO OFDM downlinks
// Copyright (C) 2026 The mimopa authors
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

#ifndef MIMOPA_NUMERICS_HPP
#define MIMOPA_NUMERICS_HPP

#include <functional>

namespace mimopa::numerics {

/// Tolerances for integrate_semi_infinite. Defaults are tight enough that the
/// quadrature error is invisible on the dB scale used everywhere else.
struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 2000;

    void validate() const;
};

/// Complementary error function, relative error below 1e-12 on |x| <= 10.
double erfc(double x);

/// Scaled complementary error function exp(x^2) * erfc(x) for x >= 0. Stays
/// accurate far beyond x ~ 26 where erfc itself underflows.
double erfcx(double x);

/// Principal branch W0 of the Lambert W function, x >= -1/e.
double lambert_w0(double x);

/// W0(exp(log_x)) without forming exp(log_x). For log_x >= 1 this solves
/// w + ln(w) = log_x directly, so arguments like 1e600 are fine.
double lambert_w0_of_log(double log_x);

/// Integral of f over [0, inf) for integrands with Gaussian-type decay.
/// The range is truncated where exp(-t^2) is far below the absolute
/// tolerance and the remainder is integrated with adaptive Gauss-Kronrod
/// (7/15) subdivision. Throws NumericalFailure when the subdivision budget
/// runs out before the error estimate meets the tolerance.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

/// The finite-interval workhorse behind integrate_semi_infinite.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {});

} // namespace mimopa::numerics

#endif
