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

#include "mimopa/fpda.hpp"

#include "mimopa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mimopa::fpda {

namespace {

double min_breakpoint(const WaterfillProblem& p)
{
    return p.breakpoints[p.order.front()];
}

void normalize(std::vector<double>& w)
{
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w)
        x /= s;
}

// Level above the smallest breakpoint; working in shifted coordinates keeps
// precision when all G_k are large and close together.
double shifted_level(const WaterfillProblem& p)
{
    const double g0 = min_breakpoint(p);
    double prefix = 0.0;
    for (std::size_t n = 1; n <= p.size(); ++n) {
        prefix += p.breakpoints[p.order[n - 1]] - g0;
        const double mu = (1.0 + prefix) / static_cast<double>(n);
        const double next = n < p.size() ? p.breakpoints[p.order[n]] - g0 : std::numeric_limits<double>::infinity();
        if (mu <= next)
            return mu;
    }
    return 1.0 + prefix; // unreachable: the last step always qualifies
}

} // namespace

WaterfillProblem make_problem(std::vector<double> g)
{
    if (g.empty())
        throw DomainError("waterfill: empty problem");
    for (double x : g)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DomainError("waterfill: breakpoints must be finite and >= 0");
    WaterfillProblem p;
    p.breakpoints = std::move(g);
    p.order.resize(p.breakpoints.size());
    std::iota(p.order.begin(), p.order.end(), std::size_t{0});
    std::stable_sort(p.order.begin(), p.order.end(),
                     [&](std::size_t a, std::size_t b) { return p.breakpoints[a] < p.breakpoints[b]; });
    return p;
}

WaterfillProblem breakpoints(const UeSet& ues, const SystemConfig& cfg, double total_power,
                             const pa::PaOperatingPoint& op)
{
    if (!(total_power > 0.0))
        throw DomainError("breakpoints: total power must be > 0");
    std::vector<double> g(ues.size());
    const double scale = cfg.precoding_gain() * op.lambda * total_power;
    for (std::size_t k = 0; k < g.size(); ++k)
        g[k] = (ues.noise[k] + ues.beta[k] * op.effective_distortion) / (scale * ues.beta[k]);
    return make_problem(std::move(g));
}

double water_level(const WaterfillProblem& problem)
{
    return min_breakpoint(problem) + shifted_level(problem);
}

std::vector<double> solve_fpda(const WaterfillProblem& problem)
{
    const double g0 = min_breakpoint(problem);
    const double mu = shifted_level(problem);
    std::vector<double> w(problem.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = std::max(0.0, mu - (problem.breakpoints[k] - g0));
    normalize(w);
    return w;
}

std::vector<double> solve_fpda_bisect(const WaterfillProblem& problem, double tol, int max_iters)
{
    const double g0 = min_breakpoint(problem);
    auto fill = [&](double mu) {
        double s = 0.0;
        for (double g : problem.breakpoints)
            s += std::max(0.0, mu - (g - g0));
        return s;
    };
    // fill(0) = 0 < 1 and fill(1) >= 1
    double lo = 0.0, hi = 1.0, mu = 0.5;
    bool done = false;
    for (int it = 0; it < max_iters; ++it) {
        mu = 0.5 * (lo + hi);
        const double s = fill(mu);
        if (std::fabs(s - 1.0) <= tol) {
            done = true;
            break;
        }
        (s < 1.0 ? lo : hi) = mu;
    }
    if (!done)
        throw NumericalFailure("solve_fpda_bisect: tolerance not reached within the iteration cap");
    std::vector<double> w(problem.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = std::max(0.0, mu - (problem.breakpoints[k] - g0));
    normalize(w);
    return w;
}

double objective(const WaterfillProblem& problem, std::span<const double> omega)
{
    double s = 0.0;
    for (std::size_t k = 0; k < problem.size(); ++k)
        s += std::log2(1.0 + omega[k] / problem.breakpoints[k]);
    return s;
}

std::vector<double> fpda_step(const UeSet& ues, const SystemConfig& cfg, double total_power)
{
    SystemConfig soft = cfg;
    soft.pa = pa::PaModel::soft_limiter();
    const auto op = metrics::operating_point(soft, total_power, soft.pa);
    return solve_fpda(breakpoints(ues, cfg, total_power, op));
}

} // namespace mimopa::fpda
