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

#ifndef MIMOPA_DAPA_HPP
#define MIMOPA_DAPA_HPP

#include "mimopa/metrics.hpp"

#include <span>
#include <utility>

namespace mimopa::dapa {

struct DapaResult {
    double total_power = 0.0;
    double bracket_lo = 0.0; ///< final bracket
    double bracket_hi = 0.0;
    double initial_lo = 0.0; ///< Lambert-W bracket on entry
    double initial_hi = 0.0;
    int iterations = 0;
    double derivative_residual = 0.0; ///< |dR/dP| at the result over |dR/dP| at initial_lo
    bool guard_triggered = false;
};

/// Per-UE stationarity function; its single root is where that UE's rate
/// stops growing with total power. Positive below the root, negative above.
double f_k(double total_power, double sigma2, double beta, const SystemConfig& cfg);

/// Lower and upper bounds on the root of f_k, via Lambert W in the log domain.
std::pair<double, double> root_bounds(double sigma2, double beta, const SystemConfig& cfg);

/// d(sum-rate)/dP at fixed omega under the soft limiter, bit/s/W.
double sum_rate_derivative(double total_power, const UeSet& ues, std::span<const double> omega,
                           const SystemConfig& cfg);

/// Sign of the derivative, -1, 0 or +1. Skips the common positive factor.
int sum_rate_derivative_sign(double total_power, const UeSet& ues, std::span<const double> omega,
                             const SystemConfig& cfg);

/// 1e-6 * M * p_max.
double default_delta(const SystemConfig& cfg);

/// Bisection for the stationary total power at fixed omega. `guard` enables
/// the log-grid scan that protects against a multi-root derivative sum.
DapaResult solve_dapa(const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg, double delta,
                      bool guard = true);

} // namespace mimopa::dapa

#endif
