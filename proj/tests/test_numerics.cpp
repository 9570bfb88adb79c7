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

#include "mimopa/error.hpp"
#include "mimopa/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mimopa;
using numerics::lambert_w0;
using numerics::lambert_w0_of_log;

namespace {

// erfcx oracle: long double product for moderate x, Laplace continued
// fraction for large x.
long double erfcx_oracle(long double x)
{
    if (x < 20.0L)
        return std::exp(x * x) * std::erfc(x);
    long double f = 0.0L;
    for (int n = 200; n >= 1; --n)
        f = (n / 2.0L) / (x + f);
    return 1.0L / (std::sqrt(std::numbers::pi_v<long double>) * (x + f));
}

// W0 oracle: bisection on w e^w = x in long double.
long double w_oracle(long double x)
{
    long double lo = -1.0L, hi = std::max(1.0L, std::log1p(x) + 1.0L);
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (mid * std::exp(mid) < x ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

} // namespace

TEST_CASE("erfc pinned values")
{
    CHECK(numerics::erfc(0.0) == 1.0);
    CHECK(rel(numerics::erfc(1.0), 0.15729920705028513) < 1e-15);
    CHECK(rel(numerics::erfc(-1.0), 1.8427007929497148) < 1e-15);
    CHECK(numerics::erfc(30.0) == 0.0);
    CHECK(numerics::erfc(-30.0) == 2.0);
}

TEST_CASE("erfc matches libm erfcl over [-6, 26]")
{
    double worst = 0.0;
    for (double x = -6.0; x <= 26.0; x += 0.013)
        worst = std::max(worst, rel(numerics::erfc(x), static_cast<double>(std::erfc(static_cast<long double>(x)))));
    CHECK(worst < 1e-13);
}

TEST_CASE("erfcx agrees with the oracle and the large-x asymptote")
{
    CHECK(rel(numerics::erfcx(1.0), 0.427583576155807) < 1e-14);
    CHECK(rel(numerics::erfcx(50.0), 0.011281536265323772) < 1e-14);
    double worst = 0.0;
    for (double x = 0.0; x <= 200.0; x = x < 5 ? x + 0.01 : x * 1.05)
        worst = std::max(worst, rel(numerics::erfcx(x), static_cast<double>(erfcx_oracle(x))));
    CHECK(worst < 1e-13);
    // 1/(x sqrt(pi)) (1 - 1/(2x^2))
    const double x = 1e4;
    CHECK(rel(numerics::erfcx(x), 1.0 / (x * std::sqrt(std::numbers::pi)) * (1.0 - 0.5 / (x * x))) < 1e-12);
    CHECK(numerics::erfcx(std::numeric_limits<double>::infinity()) == 0.0);
    CHECK_THROWS_AS(numerics::erfcx(-0.5), DomainError);
}

TEST_CASE("erfcx is decreasing")
{
    double prev = numerics::erfcx(0.0);
    for (double x = 0.05; x < 100.0; x *= 1.1) {
        const double v = numerics::erfcx(x);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("Lambert W0 pinned values")
{
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(rel(lambert_w0(1.0), 0.5671432904097838) < 1e-15);
    CHECK(rel(lambert_w0(10.0), 1.7455280027406994) < 1e-15);
    CHECK(rel(lambert_w0(std::numbers::e), 1.0) < 1e-15);
    CHECK(lambert_w0(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
}

TEST_CASE("Lambert W0 matches bisection oracle and defining identity")
{
    double worst = 0.0;
    for (double x = -0.36; x < 1e300; x = x < 1 ? x + 0.0137 : x * 7.3) {
        const double w = lambert_w0(x);
        worst = std::max(worst, std::fabs(w - static_cast<double>(w_oracle(x))) / std::max(1.0, std::fabs(w)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("Lambert W0 in the log domain")
{
    // w + ln w = 100
    CHECK(rel(lambert_w0_of_log(100.0), 95.44148664557583) < 1e-14);
    for (double l = -5.0; l < 600.0; l += 3.7)
        CHECK(rel(lambert_w0_of_log(l), lambert_w0(std::exp(l))) < 1e-13);
    const double w = lambert_w0_of_log(1400.0); // argument ~ 1e608
    CHECK(std::fabs(w + std::log(w) - 1400.0) < 1e-11);
}

TEST_CASE("semi-infinite quadrature on Gaussian moments")
{
    using numerics::integrate_semi_infinite;
    const double half_root_pi = 0.5 * std::sqrt(std::numbers::pi);
    CHECK(rel(integrate_semi_infinite([](double t) { return std::exp(-t * t); }), half_root_pi) < 1e-10);
    CHECK(rel(integrate_semi_infinite([](double t) { return 2 * t * t * t * std::exp(-t * t); }), 1.0) < 1e-10);
    CHECK(rel(integrate_semi_infinite([](double t) { return std::cos(t) * std::exp(-t * t); }),
              half_root_pi * std::exp(-0.25))
          < 1e-10);
}

TEST_CASE("adaptive quadrature handles endpoint singular derivative")
{
    const double v = numerics::integrate_adaptive([](double t) { return std::sqrt(t); }, 0.0, 1.0);
    CHECK(rel(v, 2.0 / 3.0) < 1e-9);
}

TEST_CASE("quadrature budget exhaustion is reported")
{
    numerics::QuadratureSpec tight;
    tight.relative_tolerance = 1e-15;
    tight.absolute_tolerance = 0.0;
    tight.max_subdivisions = 20;
    CHECK_THROWS_AS(
        numerics::integrate_adaptive([](double t) { return std::sin(1.0 / (t + 1e-3)); }, 0.0, 1.0, tight),
        NumericalFailure);
    numerics::QuadratureSpec bad;
    bad.relative_tolerance = -1.0;
    CHECK_THROWS(bad.validate());
}
