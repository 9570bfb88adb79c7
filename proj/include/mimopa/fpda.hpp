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

#ifndef MIMOPA_FPDA_HPP
#define MIMOPA_FPDA_HPP

#include "mimopa/metrics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mimopa::fpda {

/// Water-filling over the unit simplex: maximize sum_k log(1 + omega_k / G_k).
struct WaterfillProblem {
    std::vector<double> breakpoints;  ///< G_k, original UE order
    std::vector<std::size_t> order;   ///< indices sorted by G ascending (stable)

    std::size_t size() const { return breakpoints.size(); }
};

/// Zero breakpoints (noise- and distortion-free UEs) are accepted.
WaterfillProblem make_problem(std::vector<double> breakpoints);

/// G_k = (sigma_k^2 + beta_k D) / ((M - K) lambda P beta_k) at the given operating point.
WaterfillProblem breakpoints(const UeSet& ues, const SystemConfig& cfg, double total_power,
                             const pa::PaOperatingPoint& op);

/// Single-pass breakpoint method.
std::vector<double> solve_fpda(const WaterfillProblem& problem);

/// Bisection on the water level; throws NumericalFailure if the cap is hit.
std::vector<double> solve_fpda_bisect(const WaterfillProblem& problem, double tol = 1e-12, int max_iters = 200);

/// mu such that sum_k max(0, mu - G_k) = 1.
double water_level(const WaterfillProblem& problem);

/// sum_k log2(1 + omega_k / G_k), the per-unit-bandwidth subproblem objective.
double objective(const WaterfillProblem& problem, std::span<const double> omega);

/// One FPDA step at total power P under the soft limiter.
std::vector<double> fpda_step(const UeSet& ues, const SystemConfig& cfg, double total_power);

} // namespace mimopa::fpda

#endif
