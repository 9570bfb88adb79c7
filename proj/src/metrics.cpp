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

#include "mimopa/metrics.hpp"

#include "mimopa/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mimopa {

void SystemConfig::validate() const
{
    if (num_ues < 1)
        throw DomainError("SystemConfig: need at least one UE");
    if (num_antennas <= num_ues)
        throw DomainError("SystemConfig: ZF needs more antennas than UEs (M > K)");
    if (!(p_max > 0.0))
        throw DomainError("SystemConfig: p_max must be > 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("SystemConfig: eta must lie in (0, 1]");
    if (!(bandwidth_hz > 0.0))
        throw DomainError("SystemConfig: bandwidth must be > 0");
    pa.validate();
}

void UeSet::validate(int expected_size) const
{
    const auto n = static_cast<std::size_t>(expected_size);
    if (beta.size() != n || noise.size() != n)
        throw DomainError("UeSet: expected " + std::to_string(n) + " UEs");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(beta[k] > 0.0) || !std::isfinite(beta[k]))
            throw DomainError("UeSet: beta must be positive and finite");
        if (!(noise[k] > 0.0) || !std::isfinite(noise[k]))
            throw DomainError("UeSet: noise power must be positive and finite");
    }
    if (csi_delta) {
        if (csi_delta->size() != n)
            throw DomainError("UeSet: csi_delta length mismatch");
        for (double d : *csi_delta)
            if (!(d >= 0.0 && d < 1.0))
                throw DomainError("UeSet: csi_delta must lie in [0, 1)");
    }
}

void Allocation::validate() const
{
    if (!(total_power >= 0.0) || !std::isfinite(total_power))
        throw DomainError("Allocation: total power must be finite and >= 0");
    if (omega.empty())
        throw DomainError("Allocation: empty weight vector");
    double sum = 0.0;
    for (double w : omega) {
        if (!(w >= 0.0))
            throw DomainError("Allocation: weights must be >= 0");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw DomainError("Allocation: weights must sum to 1");
}

Allocation Allocation::equal(double total_power, std::size_t num_ues)
{
    return {total_power, std::vector<double>(num_ues, 1.0 / static_cast<double>(num_ues))};
}

namespace metrics {

namespace {

void check_sizes(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc)
{
    const auto k = static_cast<std::size_t>(cfg.num_ues);
    if (ues.size() != k || ues.noise.size() != k || alloc.omega.size() != k)
        throw DomainError("SINDR: UE set / allocation size does not match K");
}

} // namespace

pa::PaOperatingPoint operating_point(const SystemConfig& cfg, double total_power, const pa::PaModel& model,
                                     const numerics::QuadratureSpec& spec)
{
    if (!(total_power >= 0.0))
        throw DomainError("operating_point: total power must be >= 0");
    pa::PaOperatingPoint op;
    if (total_power == 0.0) {
        op.ibo = std::numeric_limits<double>::infinity();
        return op;
    }
    op.ibo = pa::ibo(total_power, cfg.num_antennas, cfg.p_max);
    const auto [lambda, coeff] = pa::bussgang(model, op.ibo, spec);
    op.lambda = lambda;
    op.dist_coeff = coeff;
    op.effective_distortion = pa::effective_distortion(coeff, total_power, cfg.eta);
    return op;
}

pa::PaOperatingPoint operating_point(const SystemConfig& cfg, const Allocation& alloc,
                                     const numerics::QuadratureSpec& spec)
{
    return operating_point(cfg, alloc.total_power, cfg.pa, spec);
}

std::vector<double> sindr_zf(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                             const pa::PaOperatingPoint& op)
{
    check_sizes(cfg, ues, alloc);
    std::vector<double> out(ues.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double signal = cfg.precoding_gain() * op.lambda * alloc.power(k) * ues.beta[k];
        out[k] = signal / (ues.noise[k] + ues.beta[k] * op.effective_distortion);
    }
    return out;
}

std::vector<double> sindr_mrt(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                              const pa::PaOperatingPoint& op)
{
    check_sizes(cfg, ues, alloc);
    double total = 0.0;
    for (std::size_t k = 0; k < ues.size(); ++k)
        total += alloc.power(k);
    std::vector<double> out(ues.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double others = std::max(0.0, total - alloc.power(k));
        const double signal = cfg.num_antennas * op.lambda * alloc.power(k) * ues.beta[k];
        const double denom = ues.noise[k] + ues.beta[k] * op.effective_distortion + ues.beta[k] * op.lambda * others;
        out[k] = signal / denom;
    }
    return out;
}

std::vector<double> sindr_zf_icsi(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc,
                                  const pa::PaOperatingPoint& op)
{
    check_sizes(cfg, ues, alloc);
    if (!ues.csi_delta)
        throw std::invalid_argument("sindr_zf_icsi: UE set carries no CSI error factors");
    const auto& delta = *ues.csi_delta;
    double total = 0.0;
    for (std::size_t k = 0; k < ues.size(); ++k)
        total += alloc.power(k);
    std::vector<double> out(ues.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double others = std::max(0.0, total - alloc.power(k));
        const double signal = cfg.precoding_gain() * op.lambda * alloc.power(k) * ues.beta[k] * (1.0 - delta[k]);
        const double denom = ues.noise[k] + ues.beta[k] * op.effective_distortion
                             + op.lambda * ues.beta[k] * delta[k] * others;
        out[k] = signal / denom;
    }
    return out;
}

RateReport rates(const SystemConfig& cfg, std::span<const double> sindr)
{
    RateReport r;
    r.rate.reserve(sindr.size());
    for (double g : sindr) {
        if (!(g >= 0.0))
            throw DomainError("rates: SINDR must be >= 0");
        const double rate = cfg.bandwidth_hz * std::log1p(g) / std::numbers::ln2;
        r.rate.push_back(rate);
        r.sum_rate += rate;
    }
    return r;
}

EvalReport evaluate(const SystemConfig& cfg, const UeSet& ues, const Allocation& alloc, SindrModel model,
                    const numerics::QuadratureSpec& spec)
{
    EvalReport report;
    report.operating_point = operating_point(cfg, alloc, spec);
    report.ibo_db = report.operating_point.ibo_db();
    switch (model) {
    case SindrModel::ZeroForcing:
        report.sindr = sindr_zf(cfg, ues, alloc, report.operating_point);
        break;
    case SindrModel::MaximumRatio:
        report.sindr = sindr_mrt(cfg, ues, alloc, report.operating_point);
        break;
    case SindrModel::ZeroForcingImperfectCsi:
        report.sindr = sindr_zf_icsi(cfg, ues, alloc, report.operating_point);
        break;
    }
    auto r = rates(cfg, report.sindr);
    report.rate = std::move(r.rate);
    report.sum_rate = r.sum_rate;
    return report;
}

double objective(const SystemConfig& cfg, const UeSet& ues, double total_power, std::span<const double> omega)
{
    if (total_power <= 0.0)
        return 0.0;
    const double psi = pa::ibo(total_power, cfg.num_antennas, cfg.p_max);
    const double lambda = pa::lambda_soft(psi);
    const double d = cfg.eta * pa::dist_coeff_soft(psi) * total_power;
    double sum = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double g = cfg.precoding_gain() * lambda * omega[k] * total_power * ues.beta[k]
                         / (ues.noise[k] + ues.beta[k] * d);
        sum += std::log1p(g);
    }
    return cfg.bandwidth_hz * sum / std::numbers::ln2;
}

double csi_error_factor(double beta, double pilot_len, double rho_ul)
{
    if (!(beta > 0.0) || !(pilot_len > 0.0) || !(rho_ul > 0.0))
        throw DomainError("csi_error_factor: inputs must be positive");
    return 1.0 / (1.0 + pilot_len * rho_ul * beta);
}

} // namespace metrics
} // namespace mimopa
