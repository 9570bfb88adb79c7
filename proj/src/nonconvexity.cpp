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

#include "mimopa/nonconvexity.hpp"

#include "mimopa/error.hpp"
#include "mimopa/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mimopa::nonconvexity {

namespace {

struct Stencil {
    double h11, h12, h12_alt, h22, g1, g2;
};

Stencil stencil(const Fn2& f, double x, double y, double h)
{
    const double f0 = f(x, y);
    const double fxp = f(x + h, y), fxm = f(x - h, y);
    const double fyp = f(x, y + h), fym = f(x, y - h);
    const double fpp = f(x + h, y + h), fmm = f(x - h, y - h);
    const double fpm = f(x + h, y - h), fmp = f(x - h, y + h);
    const double h2 = h * h;
    Stencil s;
    s.h11 = (fxp - 2.0 * f0 + fxm) / h2;
    s.h22 = (fyp - 2.0 * f0 + fym) / h2;
    s.h12 = (fpp - fpm - fmp + fmm) / (4.0 * h2);
    s.h12_alt = (fpp - fxp - fyp + 2.0 * f0 - fxm - fym + fmm) / (2.0 * h2);
    s.g1 = (fxp - fxm) / (2.0 * h);
    s.g2 = (fyp - fym) / (2.0 * h);
    return s;
}

int sign(double v)
{
    return (v > 0.0) - (v < 0.0);
}

} // namespace

bool HessianProbe::sign_stable() const
{
    return sign(eigenvalues[0]) == sign(eigenvalues_half[0]) && sign(eigenvalues[1]) == sign(eigenvalues_half[1])
           && sign(eigenvalues[0]) == sign(eigenvalues_wide[0]) && sign(eigenvalues[1]) == sign(eigenvalues_wide[1]);
}

std::array<double, 2> symmetric_eigs(double a, double b, double d)
{
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), b);
    // product form for the smaller-magnitude root avoids cancellation
    const double big = mean >= 0.0 ? mean + r : mean - r;
    const double det = a * d - b * b;
    const double small = big != 0.0 ? det / big : 0.0;
    std::array<double, 2> e{big, small};
    if (e[0] > e[1])
        std::swap(e[0], e[1]);
    return e;
}

HessianProbe probe(const Fn2& f, double x, double y, double step)
{
    const double h = step > 0.0 ? step : 1e-4 * (x + y);
    if (!(x > 2.0 * h) || !(y > 2.0 * h))
        throw DomainError("hessian probe: point too close to the boundary for the stencil");
    HessianProbe p;
    p.p1 = x;
    p.p2 = y;
    p.step = h;
    const Stencil s = stencil(f, x, y, h);
    p.h11 = s.h11;
    p.h12 = s.h12;
    p.h12_alt = s.h12_alt;
    p.h22 = s.h22;
    p.gradient = {s.g1, s.g2};
    p.eigenvalues = symmetric_eigs(s.h11, s.h12, s.h22);
    const Stencil half = stencil(f, x, y, 0.5 * h);
    p.eigenvalues_half = symmetric_eigs(half.h11, half.h12, half.h22);
    const Stencil wide = stencil(f, x, y, 2.0 * h);
    p.eigenvalues_wide = symmetric_eigs(wide.h11, wide.h12, wide.h22);
    p.richardson_error = std::max({std::fabs(s.h11 - wide.h11), std::fabs(s.h12 - wide.h12),
                                   std::fabs(s.h22 - wide.h22)})
                         / 3.0;
    return p;
}

double sum_rate_2ue(double p1, double p2, const SystemConfig& cfg, const UeSet& ues)
{
    if (!(p1 >= 0.0 && p2 >= 0.0 && p1 + p2 > 0.0))
        throw DomainError("sum_rate_2ue: powers must be >= 0 with a positive sum");
    if (cfg.num_ues != 2 || ues.size() != 2)
        throw DomainError("sum_rate_2ue: exactly two UEs expected");
    const double total = p1 + p2;
    const std::array<double, 2> omega{p1 / total, p2 / total};
    return metrics::objective(cfg, ues, total, omega);
}

HessianProbe hessian_eigs(double p1, double p2, const SystemConfig& cfg, const UeSet& ues, double step)
{
    return probe([&](double a, double b) { return sum_rate_2ue(a, b, cfg, ues); }, p1, p2, step);
}

std::pair<SystemConfig, UeSet> reference_setup()
{
    SystemConfig cfg;
    cfg.num_antennas = 64;
    cfg.num_ues = 2;
    cfg.p_max = 0.01;
    cfg.eta = 2.0 / 3.0;
    cfg.bandwidth_hz = 18e6;
    UeSet ues{{1e-11, 1e-7}, {5.97e-14, 5.97e-14}, std::nullopt};
    return {cfg, ues};
}

std::vector<HessianProbe> scan_grid(const SystemConfig& cfg, const UeSet& ues, int n, double lo, double hi,
                                    unsigned workers)
{
    if (n < 2 || !(lo > 0.0) || !(hi > lo))
        throw DomainError("scan_grid: need n >= 2 and 0 < lo < hi");
    std::vector<double> axis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        axis[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    std::vector<std::optional<HessianProbe>> cells(axis.size() * axis.size());
    parallel_for(cells.size(), workers, [&](std::size_t idx) {
        const double x = axis[idx / axis.size()], y = axis[idx % axis.size()];
        const double h = 1e-4 * (x + y);
        if (x > 2.0 * h && y > 2.0 * h)
            cells[idx] = hessian_eigs(x, y, cfg, ues, h);
    });
    std::vector<HessianProbe> out;
    for (auto& c : cells)
        if (c)
            out.push_back(*c);
    return out;
}

std::optional<HessianProbe> find_indefinite(const std::vector<HessianProbe>& scan)
{
    for (const auto& p : scan)
        if (p.indefinite() && p.sign_stable())
            return p;
    return std::nullopt;
}

} // namespace mimopa::nonconvexity
