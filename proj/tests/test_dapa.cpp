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

#include "mimopa/dapa.hpp"
#include "mimopa/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mimopa;

namespace {

SystemConfig cfg_m(int m, int k, double p_max = 0.1)
{
    SystemConfig c;
    c.num_antennas = m;
    c.num_ues = k;
    c.p_max = p_max;
    c.bandwidth_hz = 18e6;
    return c;
}

// f_k in long double via libm erfcl; root by bisection in log P.
long double f_oracle(long double p, long double sigma2, long double beta, const SystemConfig& c)
{
    const long double psi = c.num_antennas * static_cast<long double>(c.p_max) / p;
    const long double r = std::sqrt(psi);
    return 2 * sigma2 / (std::sqrt(std::numbers::pi_v<long double>) * beta * c.eta * c.num_antennas * c.p_max)
           - std::erfc(r) / r;
}

double root_oracle(double sigma2, double beta, const SystemConfig& c)
{
    long double lo = std::log(1e-12L), hi = std::log(1e12L);
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (f_oracle(std::exp(mid), sigma2, beta, c) > 0 ? lo : hi) = mid;
    }
    return static_cast<double>(std::exp(0.5L * (lo + hi)));
}

// W0 via long double bisection on w + ln w = L.
long double w_of_log(long double l)
{
    long double lo = 1e-30L, hi = std::max(2.0L, l + 2.0L);
    for (int i = 0; i < 400; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (mid + std::log(mid) < l ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

UeSet homogeneous(int k, double beta, double sigma2 = 7.166e-14)
{
    return {std::vector<double>(k, beta), std::vector<double>(k, sigma2), std::nullopt};
}

} // namespace

TEST_CASE("f_k limits and monotonicity")
{
    const auto c = cfg_m(64, 1);
    const double s2 = 7.2e-14, b = 1e-10;
    const double f0 = 2 * s2 / (std::sqrt(std::numbers::pi) * b * c.eta * 64 * 0.1);
    CHECK(dapa::f_k(1e-9, s2, b, c) == doctest::Approx(f0).epsilon(1e-12));
    CHECK(dapa::f_k(1e6, s2, b, c) < 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 1e-6; p < 1e6; p *= 1.05) {
        const double v = dapa::f_k(p, s2, b, c);
        // the erfc term is below double resolution of f(0) for psi >~ 40
        if (6.4 / p < 30.0)
            CHECK(v < prev);
        else
            CHECK(v <= prev);
        prev = v;
    }
    CHECK_THROWS_AS(dapa::f_k(0.0, s2, b, c), DomainError);
}

TEST_CASE("f_k is continuous across the scaled-erfc switch")
{
    const auto c = cfg_m(64, 1);
    const double p_switch = 6.4 / 25.0;
    const double lo = dapa::f_k(p_switch * (1 + 1e-12), 7e-14, 1e-10, c);
    const double hi = dapa::f_k(p_switch * (1 - 1e-12), 7e-14, 1e-10, c);
    CHECK(std::fabs(lo - hi) < 1e-12);
    for (double p = 1e-3; p < 10; p *= 1.3)
        CHECK(dapa::f_k(p, 7e-14, 1e-10, c)
              == doctest::Approx(static_cast<double>(f_oracle(p, 7e-14, 1e-10, c))).epsilon(1e-12));
}

TEST_CASE("Lambert-W bounds: pinned example against a long-double oracle")
{
    const auto c = cfg_m(64, 1);
    const long double s2 = 7.2e-14L, b = 1e-10L, mp = 6.4L;
    const long double a = std::sqrt(std::numbers::pi_v<long double>) * b * c.eta * mp / (2 * s2);
    const long double bb = std::sqrt(std::numbers::e_v<long double>) * b * c.eta * mp / (2 * std::sqrt(2.0L) * s2);
    const double lo_ref = static_cast<double>(2 * mp / w_of_log(std::log(2 * a * a)));
    const double hi_ref = static_cast<double>(4 * mp / w_of_log(std::log(4 * bb * bb)));
    const auto [lo, hi] = dapa::root_bounds(7.2e-14, 1e-10, c);
    CHECK(lo == doctest::Approx(lo_ref).epsilon(1e-12));
    CHECK(hi == doctest::Approx(hi_ref).epsilon(1e-12));
    const double root = root_oracle(7.2e-14, 1e-10, c);
    CHECK(lo <= root);
    CHECK(root <= hi);
}

TEST_CASE("Lambert-W bounds bracket the root on random pairs")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto c = cfg_m(u(gen) < 0.5 ? 64 : 512, 1, u(gen) < 0.5 ? 0.1 : 0.01);
        const double beta = std::pow(10.0, -16.0 + 10.0 * u(gen));
        const double s2 = std::pow(10.0, -15.0 + 3.0 * u(gen));
        const auto [lo, hi] = dapa::root_bounds(s2, beta, c);
        REQUIRE(lo <= hi);
        CHECK(dapa::f_k(lo, s2, beta, c) >= -1e-12);
        CHECK(dapa::f_k(hi, s2, beta, c) <= 1e-12);
    }
}

TEST_CASE("bounds depend on sigma2 / beta only")
{
    const auto c = cfg_m(64, 1);
    const auto a = dapa::root_bounds(7e-14, 1e-10, c);
    const auto b = dapa::root_bounds(7e-11, 1e-7, c);
    CHECK(a.first == doctest::Approx(b.first).epsilon(1e-12));
    CHECK(a.second == doctest::Approx(b.second).epsilon(1e-12));
}

TEST_CASE("derivative matches a finite difference of the sum-rate")
{
    const auto c = cfg_m(64, 3);
    const UeSet ues{{1e-9, 3e-12, 1e-13}, {7e-14, 7e-14, 7e-14}, std::nullopt};
    const std::vector<double> w{0.2, 0.5, 0.3};
    for (double p = 0.05; p < 100.0; p *= 2.3) {
        const double h = 1e-5 * p;
        const double fd = (metrics::objective(c, ues, p + h, w) - metrics::objective(c, ues, p - h, w)) / (2 * h);
        const double an = dapa::sum_rate_derivative(p, ues, w, c);
        CHECK(an == doctest::Approx(fd).epsilon(1e-5).scale(1e-3 * std::fabs(fd) + 1.0));
        CHECK(dapa::sum_rate_derivative_sign(p, ues, w, c) == (an > 0) - (an < 0));
    }
}

TEST_CASE("derivative sign outside the per-UE roots")
{
    const auto c = cfg_m(64, 2);
    const UeSet ues{{1e-9, 1e-12}, {7e-14, 7e-14}, std::nullopt};
    const std::vector<double> w{0.5, 0.5};
    const double r1 = root_oracle(7e-14, 1e-9, c), r2 = root_oracle(7e-14, 1e-12, c);
    CHECK(dapa::sum_rate_derivative_sign(0.5 * std::min(r1, r2), ues, w, c) > 0);
    CHECK(dapa::sum_rate_derivative_sign(2.0 * std::max(r1, r2), ues, w, c) < 0);
}

TEST_CASE("homogeneous DAPA equals the scalar root for any K")
{
    const double beta = 1e-10, s2 = 7.2e-14;
    for (int k : {1, 2, 20, 60}) {
        const auto c = cfg_m(64 + 64 * (k > 20), k);
        const double delta = dapa::default_delta(c);
        const std::vector<double> w(k, 1.0 / k);
        const auto r = dapa::solve_dapa(homogeneous(k, beta, s2), w, c, delta);
        CHECK(std::fabs(r.total_power - root_oracle(s2, beta, c)) <= delta);
        CHECK(r.bracket_lo <= r.total_power);
        CHECK(r.total_power <= r.bracket_hi);
        CHECK(r.bracket_hi - r.bracket_lo <= delta);
        CHECK(r.iterations <= std::ceil(std::log2((r.initial_hi - r.initial_lo) / delta)) + 1);
    }
}

TEST_CASE("worse channels get more power")
{
    const auto c = cfg_m(64, 4);
    const std::vector<double> w(4, 0.25);
    double prev = 0.0;
    for (double pl = 70.0; pl <= 150.0; pl += 10.0) {
        const double p = dapa::solve_dapa(homogeneous(4, std::pow(10.0, -pl / 10)), w, c, 1e-9).total_power;
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("heterogeneous DAPA: root ordering, tolerance contract, ascent")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 60; ++i) {
        const int k = 2 + static_cast<int>(u(gen) * 8);
        const auto c = cfg_m(u(gen) < 0.5 ? 64 : 512, k);
        UeSet ues;
        std::vector<double> w(k);
        double s = 0;
        for (int j = 0; j < k; ++j) {
            ues.beta.push_back(std::pow(10.0, -(70.0 + 85.0 * u(gen)) / 10));
            ues.noise.push_back(7.166e-14);
            w[j] = u(gen) + 0.01;
            s += w[j];
        }
        for (double& x : w)
            x /= s;
        const double delta = dapa::default_delta(c);
        const auto r = dapa::solve_dapa(ues, w, c, delta);
        double rmin = 1e300, rmax = 0;
        for (int j = 0; j < k; ++j) {
            const double rt = root_oracle(ues.noise[j], ues.beta[j], c);
            rmin = std::min(rmin, rt);
            rmax = std::max(rmax, rt);
        }
        CHECK(r.total_power >= rmin - delta);
        CHECK(r.total_power <= rmax + delta);
        const auto fine = dapa::solve_dapa(ues, w, c, delta / 10);
        CHECK(std::fabs(fine.total_power - r.total_power) <= delta);
        const double obj = metrics::objective(c, ues, r.total_power, w);
        CHECK(obj >= metrics::objective(c, ues, r.initial_lo, w));
        CHECK(obj >= metrics::objective(c, ues, r.initial_hi, w));
        CHECK(r.derivative_residual < 1e-3);
    }
}

TEST_CASE("zero-weight UEs are ignored and bad inputs rejected")
{
    const auto c = cfg_m(64, 2);
    const UeSet ues{{1e-9, 1e-15}, {7e-14, 7e-14}, std::nullopt};
    const std::vector<double> only_first{1.0, 0.0};
    const auto r = dapa::solve_dapa(ues, only_first, c, 1e-9);
    CHECK(std::fabs(r.total_power - root_oracle(7e-14, 1e-9, c)) <= 1e-9);
    const std::vector<double> none{0.0, 0.0};
    CHECK_THROWS_AS(dapa::solve_dapa(ues, none, c, 1e-9), DomainError);
    CHECK_THROWS_AS(dapa::solve_dapa(ues, only_first, c, 0.0), DomainError);
    CHECK(dapa::default_delta(c) == doctest::Approx(6.4e-6));
}
