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

#include "mimopa/allocator.hpp"

#include "mimopa/dapa.hpp"
#include "mimopa/error.hpp"
#include "mimopa/fpda.hpp"

#include <cmath>
#include <string>

namespace mimopa::allocator {

namespace {

double resolve_delta(double delta, const SystemConfig& cfg)
{
    return delta > 0.0 ? delta : dapa::default_delta(cfg);
}

} // namespace

double reference_power(const SystemConfig& cfg)
{
    return cfg.num_antennas * cfg.p_max / std::pow(10.0, 0.6);
}

AoResult alternating_optimize(const UeSet& ues, const SystemConfig& cfg, const AoOptions& opts)
{
    cfg.validate();
    ues.validate(cfg.num_ues);
    if (opts.max_iters < 1)
        throw DomainError("alternating_optimize: max_iters must be >= 1");
    const double delta = resolve_delta(opts.delta, cfg);

    std::vector<double> omega = opts.initial_omega.value_or(
        std::vector<double>(ues.size(), 1.0 / static_cast<double>(ues.size())));
    if (omega.size() != ues.size())
        throw DomainError("alternating_optimize: initial omega size does not match K");

    AoResult out;
    auto& trace = out.trace;
    double p_prev = opts.initial_power.value_or(std::nan(""));
    double rate_prev = std::nan("");

    for (int i = 1; i <= opts.max_iters; ++i) {
        double p = dapa::solve_dapa(ues, omega, cfg, delta).total_power;
        // never step downhill on the P block
        if (std::isfinite(p_prev)
            && metrics::objective(cfg, ues, p, omega) < metrics::objective(cfg, ues, p_prev, omega))
            p = p_prev;
        omega = fpda::fpda_step(ues, cfg, p);
        const double rate = metrics::objective(cfg, ues, p, omega);
        trace.iterates.push_back({p, omega, rate});
        trace.iterations = i;

        const bool warm = opts.initial_power.has_value();
        bool stop = (i >= 2 || warm) && std::fabs(p - p_prev) < delta;
        if (opts.sum_rate_convergence && std::isfinite(rate_prev)
            && std::fabs(rate - rate_prev) <= opts.sum_rate_rel_tol * std::fabs(rate_prev))
            stop = true;
        p_prev = p;
        rate_prev = rate;
        if (stop) {
            trace.converged = true;
            break;
        }
    }

    const AoIterate* pick = &trace.iterates.back();
    if (!trace.converged)
        for (const auto& it : trace.iterates)
            if (it.sum_rate > pick->sum_rate)
                pick = &it;
    out.allocation = {pick->total_power, pick->omega};
    return out;
}

Allocation ref_e(const UeSet& ues, const SystemConfig& cfg)
{
    return Allocation::equal(reference_power(cfg), ues.size());
}

Allocation ref_fpda(const UeSet& ues, const SystemConfig& cfg)
{
    const double p = reference_power(cfg);
    return {p, fpda::fpda_step(ues, cfg, p)};
}

Allocation dapa_e(const UeSet& ues, const SystemConfig& cfg, double delta)
{
    Allocation a = Allocation::equal(0.0, ues.size());
    a.total_power = dapa::solve_dapa(ues, a.omega, cfg, resolve_delta(delta, cfg)).total_power;
    return a;
}

std::string_view label(Algorithm a)
{
    switch (a) {
    case Algorithm::DapaFpda: return "DAPA-FPDA";
    case Algorithm::DapaE: return "DAPA-E";
    case Algorithm::RefE: return "REF-E";
    case Algorithm::RefFpda: return "REF-FPDA";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    for (Algorithm a : kAllAlgorithms)
        if (label(a) == name)
            return a;
    throw DomainError("unknown algorithm: " + std::string(name));
}

Allocation run(Algorithm a, const UeSet& ues, const SystemConfig& cfg, double delta)
{
    switch (a) {
    case Algorithm::DapaFpda: {
        AoOptions opts;
        opts.delta = delta;
        return alternating_optimize(ues, cfg, opts).allocation;
    }
    case Algorithm::DapaE: return dapa_e(ues, cfg, delta);
    case Algorithm::RefE: return ref_e(ues, cfg);
    case Algorithm::RefFpda: return ref_fpda(ues, cfg);
    }
    throw DomainError("unknown algorithm");
}

} // namespace mimopa::allocator
