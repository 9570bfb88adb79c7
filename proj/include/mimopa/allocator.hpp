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

#ifndef MIMOPA_ALLOCATOR_HPP
#define MIMOPA_ALLOCATOR_HPP

#include "mimopa/metrics.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace mimopa::allocator {

struct AoOptions {
    double delta = 0.0;  ///< <= 0 selects dapa::default_delta
    int max_iters = 100;
    bool sum_rate_convergence = false; ///< also stop once the sum-rate stalls
    double sum_rate_rel_tol = 1e-9;
    std::optional<std::vector<double>> initial_omega;
    std::optional<double> initial_power; ///< lets a warm start converge at i = 1
};

struct AoIterate {
    double total_power;
    std::vector<double> omega;
    double sum_rate;
};

struct AoTrace {
    std::vector<AoIterate> iterates;
    bool converged = false;
    int iterations = 0;
};

struct AoResult {
    Allocation allocation;
    AoTrace trace;
};

/// Alternate DAPA (total power) and FPDA (distribution) from equal weights.
AoResult alternating_optimize(const UeSet& ues, const SystemConfig& cfg, const AoOptions& opts = {});

/// Fixed 6 dB back-off, equal split.
Allocation ref_e(const UeSet& ues, const SystemConfig& cfg);
/// Fixed 6 dB back-off, water-filled split.
Allocation ref_fpda(const UeSet& ues, const SystemConfig& cfg);
/// Equal split, DAPA total power.
Allocation dapa_e(const UeSet& ues, const SystemConfig& cfg, double delta = 0.0);

/// P at 6 dB back-off.
double reference_power(const SystemConfig& cfg);

enum class Algorithm { DapaFpda, DapaE, RefE, RefFpda };
inline constexpr std::array<Algorithm, 4> kAllAlgorithms = {Algorithm::DapaFpda, Algorithm::DapaE, Algorithm::RefE,
                                                             Algorithm::RefFpda};

std::string_view label(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

Allocation run(Algorithm a, const UeSet& ues, const SystemConfig& cfg, double delta = 0.0);

} // namespace mimopa::allocator

#endif
