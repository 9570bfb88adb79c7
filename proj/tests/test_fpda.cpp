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
#include "mimopa/fpda.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace mimopa;

namespace {

std::vector<double> random_breakpoints(std::mt19937_64& gen, int k)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> g(k);
    for (double& x : g)
        x = std::pow(10.0, 4.0 * u(gen) - 3.0);
    return g;
}

// Dense simplex search; the last coordinate takes the remainder.
double grid_best(const fpda::WaterfillProblem& p, double step)
{
    const int k = static_cast<int>(p.size());
    const int n = static_cast<int>(std::lround(1.0 / step));
    double best = -1.0;
    std::vector<double> w(k);
    std::vector<int> idx(k - 1, 0);
    for (;;) {
        int used = std::accumulate(idx.begin(), idx.end(), 0);
        if (used <= n) {
            for (int j = 0; j < k - 1; ++j)
                w[j] = idx[j] * step;
            w[k - 1] = (n - used) * step;
            best = std::max(best, fpda::objective(p, w));
        }
        int j = 0;
        while (j < k - 1 && ++idx[j] > n)
            idx[j++] = 0;
        if (j == k - 1)
            break;
    }
    return best;
}

} // namespace

TEST_CASE("closed-form examples")
{
    auto w = fpda::solve_fpda(fpda::make_problem({0.7, 0.7}));
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));

    w = fpda::solve_fpda(fpda::make_problem({0.0, 0.3}));
    CHECK(w[0] == doctest::Approx(0.65));
    CHECK(w[1] == doctest::Approx(0.35));
    CHECK(fpda::water_level(fpda::make_problem({0.0, 0.3})) == doctest::Approx(0.65));

    w = fpda::solve_fpda(fpda::make_problem({0.0, 1.0, 10.0}));
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(w[2] == 0.0);

    CHECK(fpda::solve_fpda(fpda::make_problem({123.0}))[0] == 1.0);
    CHECK(fpda::solve_fpda_bisect(fpda::make_problem({123.0}))[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bisection agrees with the breakpoint method")
{
    std::mt19937_64 gen(3);
    for (int i = 0; i < 1000; ++i) {
        const auto p = fpda::make_problem(random_breakpoints(gen, 1 + i % 20));
        const auto a = fpda::solve_fpda(p), b = fpda::solve_fpda_bisect(p);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(std::fabs(a[k] - b[k]) <= 1e-8);
    }
    for (const auto& g : {std::vector<double>{0.7, 0.7}, {0.0, 0.3}, {0.0, 1.0, 10.0}}) {
        const auto p = fpda::make_problem(g);
        const auto a = fpda::solve_fpda(p), b = fpda::solve_fpda_bisect(p);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(std::fabs(a[k] - b[k]) <= 1e-8);
    }
}

TEST_CASE("simplex, KKT and ordering properties")
{
    std::mt19937_64 gen(9);
    for (int i = 0; i < 300; ++i) {
        const auto g = random_breakpoints(gen, 2 + i % 12);
        const auto p = fpda::make_problem(g);
        const auto w = fpda::solve_fpda(p);
        const double mu = fpda::water_level(p);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t k = 0; k < w.size(); ++k) {
            CHECK(w[k] >= 0.0);
            if (w[k] > 0.0)
                CHECK(std::fabs(mu - g[k] - w[k]) <= 1e-12 * std::max(1.0, mu));
            else
                CHECK(mu <= g[k] + 1e-12);
            for (std::size_t j = 0; j < w.size(); ++j)
                if (g[k] < g[j])
                    CHECK(w[k] >= w[j]);
        }
        // permutation equivariance
        std::vector<std::size_t> perm(g.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> gp(g.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            gp[k] = g[perm[k]];
        const auto wp = fpda::solve_fpda(fpda::make_problem(gp));
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(wp[k] == doctest::Approx(w[perm[k]]).epsilon(1e-12));
    }
}

TEST_CASE("ties receive identical weights")
{
    const auto w = fpda::solve_fpda(fpda::make_problem({0.2, 0.5, 0.2, 0.5}));
    CHECK(w[0] == w[2]);
    CHECK(w[1] == w[3]);
    const auto p = fpda::make_problem({0.5, 0.2, 0.2});
    CHECK(p.order == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("optimal against a dense simplex search")
{
    std::mt19937_64 gen(21);
    for (int i = 0; i < 50; ++i) {
        const int k = 2 + i % 3; // 2..4
        const auto p = fpda::make_problem(random_breakpoints(gen, k));
        const auto w = fpda::solve_fpda(p);
        const double step = k == 4 ? 1e-2 : 1e-3;
        CHECK(fpda::objective(p, w) >= grid_best(p, step) - 1e-9);
    }
}

TEST_CASE("breakpoints from the system model")
{
    SystemConfig cfg;
    cfg.num_antennas = 64;
    cfg.num_ues = 2;
    pa::PaOperatingPoint op{4.0, 0.9, 0.01, 0.02};
    UeSet same{{1e-10, 1e-10}, {7e-14, 7e-14}, std::nullopt};
    auto p = fpda::breakpoints(same, cfg, 2.0, op);
    CHECK(p.breakpoints[0] == p.breakpoints[1]);

    UeSet strong{{1e30, 1e-10}, {7e-14, 7e-14}, std::nullopt};
    p = fpda::breakpoints(strong, cfg, 2.0, op);
    CHECK(p.breakpoints[0] == doctest::Approx(0.02 / (62 * 0.9 * 2.0)));

    pa::PaOperatingPoint lin{4.0, 0.9, 0.0, 0.0};
    UeSet noisy = same;
    noisy.noise[1] *= 2;
    p = fpda::breakpoints(noisy, cfg, 2.0, lin);
    CHECK(p.breakpoints[1] == doctest::Approx(2 * p.breakpoints[0]));
    CHECK_THROWS_AS(fpda::breakpoints(same, cfg, 0.0, op), DomainError);
}

TEST_CASE("failure modes")
{
    CHECK_THROWS_AS(fpda::make_problem({}), DomainError);
    CHECK_THROWS_AS(fpda::make_problem({1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(fpda::solve_fpda_bisect(fpda::make_problem({0.1, 0.4, 0.9}), 1e-12, 1), NumericalFailure);
}
