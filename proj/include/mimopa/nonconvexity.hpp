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

#ifndef MIMOPA_NONCONVEXITY_HPP
#define MIMOPA_NONCONVEXITY_HPP

#include "mimopa/metrics.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace mimopa::nonconvexity {

/// Finite-difference curvature of a two-variable function at one point.
struct HessianProbe {
    double p1 = 0.0, p2 = 0.0;
    double step = 0.0;
    double h11 = 0.0, h12 = 0.0, h22 = 0.0;
    double h12_alt = 0.0;            ///< second mixed stencil
    std::array<double, 2> eigenvalues{}; ///< ascending
    std::array<double, 2> gradient{};
    std::array<double, 2> eigenvalues_half{}; ///< at step / 2
    std::array<double, 2> eigenvalues_wide{}; ///< at 2 * step
    double richardson_error = 0.0;   ///< max |H(h) - H(2h)| / 3 over entries

    bool indefinite() const { return eigenvalues[0] < 0.0 && eigenvalues[1] > 0.0; }
    bool sign_stable() const;
};

using Fn2 = std::function<double(double, double)>;

/// Eigenvalues of [[a, b], [b, d]], ascending.
std::array<double, 2> symmetric_eigs(double a, double b, double d);

/// Probe an arbitrary function; step <= 0 selects 1e-4 * (x + y).
HessianProbe probe(const Fn2& f, double x, double y, double step = 0.0);

/// ZF sum-rate with p_k = omega_k P for K = 2 under the soft limiter.
double sum_rate_2ue(double p1, double p2, const SystemConfig& cfg, const UeSet& ues);

HessianProbe hessian_eigs(double p1, double p2, const SystemConfig& cfg, const UeSet& ues, double step = 0.0);

/// 10 mW, M = 64, 18 MHz, sigma^2 = 5.97e-14 W, beta = {1e-11, 1e-7}.
std::pair<SystemConfig, UeSet> reference_setup();

/// n x n log grid over [lo, hi]^2; points too close to the boundary for the
/// stencil are skipped.
std::vector<HessianProbe> scan_grid(const SystemConfig& cfg, const UeSet& ues, int n = 40, double lo = 1e-6,
                                    double hi = 1.0, unsigned workers = 0);

/// First indefinite, step-stable probe of the scan, by grid order.
std::optional<HessianProbe> find_indefinite(const std::vector<HessianProbe>& scan);

} // namespace mimopa::nonconvexity

#endif
