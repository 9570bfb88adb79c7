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

#ifndef MIMOPA_METRICS_HPP
#define MIMOPA_METRICS_HPP

#include "mimopa/numerics.hpp"
#include "mimopa/pa_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mimopa {

/// Fixed physical setup of the base station.
struct SystemConfig {
    int num_antennas = 64;          ///< M
    int num_ues = 1;                ///< K
    double p_max = 0.1;             ///< per-PA saturation power, W
    double eta = 2.0 / 3.0;         ///< in-band fraction of the distortion power
    double bandwidth_hz = 18e6;     ///< B = N_U * delta_f
    pa::PaModel pa = pa::PaModel::soft_limiter();

    /// ZF precoding gain M - K.
    double precoding_gain() const { return static_cast<double>(num_antennas - num_ues); }
    void validate() const;
};

/// Per-UE large-scale gains and full-band noise powers.
struct UeSet {
    std::vector<double> beta;  ///< linear channel gain
    std::vector<double> noise; ///< sigma_k^2 over all N_U sub-carriers, W
    std::optional<std::vector<double>> csi_delta;

    std::size_t size() const { return beta.size(); }
    double noise_to_gain(std::size_t k) const { return noise[k] / beta[k]; }
    void validate(int expected_size) const;
};

/// Total power and its split over UEs; p_k = omega_k * P.
struct Allocation {
    double total_power = 0.0;
    std::vector<double> omega;

    double power(std::size_t k) const { return omega[k] * total_power; }
    void validate() const;
    static Allocation equal(double total_power, std::size_t num_ues);
};

struct EvalReport {
    std::vector<double> sindr;
    std::vector<double> rate; ///< bit/s
    double sum_rate = 0.0;    ///< bit/s
    double ibo_db = 0.0;
    pa::PaOperatingPoint operating_point;
};

enum class SindrModel { ZeroForcing, MaximumRatio, ZeroForcingImperfectCsi };

namespace metrics {

/// Back-off, Bussgang gain and effective distortion of the configured PA at
/// the allocation's total power. P = 0 yields the linear limit (Psi = inf).
pa::PaOperatingPoint operating_point(const SystemConfig& cfg, const Allocation& alloc,
                                     const numerics::QuadratureSpec& spec = {});
pa::PaOperatingPoint operating_point(const SystemConfig& cfg, double total_power, const pa::PaModel& model,
                                     const numerics::QuadratureSpec& spec = {});

std::vector<double> sindr_zf(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                             const pa::PaOperatingPoint& op);
/// Evaluation only; the optimizers never use the MRT expression.
std::vector<double> sindr_mrt(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                              const pa::PaOperatingPoint& op);
/// ZF with an additive MMSE channel-estimation error; requires ues.csi_delta.
std::vector<double> sindr_zf_icsi(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                                  const pa::PaOperatingPoint& op);

struct RateReport {
    std::vector<double> rate;
    double sum_rate = 0.0;
};
RateReport rates(const SystemConfig& cfg, std::span<const double> sindr);

/// Full evaluation with the PA model configured in cfg.
EvalReport evaluate(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                    SindrModel model = SindrModel::ZeroForcing, const numerics::QuadratureSpec& spec = {});

/// ZF sum-rate under the soft limiter for total power P and weights omega.
/// This is the objective every allocator maximizes, independent of cfg.pa.
double objective(const SystemConfig& cfg, const UeSet& ues, double total_power, std::span<const double> omega);

/// delta_k = 1 / (1 + N_p * rho_ul * beta_k); rho_ul is the linear uplink
/// pilot SNR factor per unit channel gain.
double csi_error_factor(double beta, double pilot_len, double rho_ul);

} // namespace metrics
} // namespace mimopa

#endif
