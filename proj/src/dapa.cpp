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

#include "mimopa/dapa.hpp"

#include "mimopa/error.hpp"
#include "mimopa/numerics.hpp"
#include "mimopa/pa_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mimopa::dapa {

namespace {

constexpr int kGuardSamples = 32;
constexpr int kMaxBisections = 400;

// erfc(sqrt(psi)) / sqrt(psi) without underflow for large psi.
double erfc_over_root(double psi)
{
    const double r = std::sqrt(psi);
    if (psi > 25.0)
        return numerics::erfcx(r) * std::exp(-psi) / r;
    return numerics::erfc(r) / r;
}

double scale(const SystemConfig& cfg)
{
    return cfg.eta * cfg.num_antennas * cfg.p_max;
}

// Per-UE positive factor without the common positive factor: rate sensitivity
// to the SINDR times d(SINDR)/d(numerator-term).
double rate_weight(double total_power, double sigma2, double beta, double omega, const SystemConfig& cfg,
                   double lambda, double d)
{
    const double denom = sigma2 + beta * d;
    const double gamma = cfg.precoding_gain() * lambda * omega * total_power * beta / denom;
    return cfg.bandwidth_hz / (std::numbers::ln2 * (1.0 + gamma)) * cfg.precoding_gain() * omega * beta
           / (denom * denom);
}

double weighted_sum(double total_power, const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg)
{
    const double psi = pa::ibo(total_power, cfg.num_antennas, cfg.p_max);
    const double lambda = pa::lambda_soft(psi);
    const double d = pa::effective_distortion(pa::dist_coeff_soft(psi), total_power, cfg.eta);
    double sum = 0.0;
    for (std::size_t k = 0; k < ues.size(); ++k) {
        if (omega[k] <= 0.0)
            continue;
        // sigma2 - (sqrt(pi)/2) beta eta M p_max erfc(sqrt psi)/sqrt psi, routed through f_k for its underflow-safe erfc path
        const double c = 0.5 * std::sqrt(std::numbers::pi) * ues.beta[k] * scale(cfg)
                         * f_k(total_power, ues.noise[k], ues.beta[k], cfg);
        sum += rate_weight(total_power, ues.noise[k], ues.beta[k], omega[k], cfg, lambda, d) * c;
    }
    return sum;
}

void check_inputs(const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg)
{
    cfg.validate();
    ues.validate(cfg.num_ues);
    if (omega.size() != ues.size())
        throw DomainError("solve_dapa: omega size does not match K");
    if (std::none_of(omega.begin(), omega.end(), [](double w) { return w > 0.0; }))
        throw DomainError("solve_dapa: at least one omega_k must be positive");
}

// Golden-section maximization of the objective over log P in [lo, hi].
double golden_max(double lo, double hi, const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg,
                  double delta)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(lo), b = std::log(hi);
    auto obj = [&](double x) { return metrics::objective(cfg, ues, std::exp(x), omega); };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = obj(x1), f2 = obj(x2);
    for (int i = 0; i < 200 && std::exp(b) - std::exp(a) > delta; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = obj(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = obj(x1);
        }
    }
    return std::exp(0.5 * (a + b));
}

struct Bisection {
    double lo, hi;
    int iterations;
};

Bisection bisect(double lo, double hi, const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg,
                 double delta)
{
    int it = 0;
    while (hi - lo > delta) {
        if (++it > kMaxBisections)
            throw NumericalFailure("solve_dapa: bisection did not reach the tolerance");
        const double mid = 0.5 * lo + 0.5 * hi;
        if (sum_rate_derivative_sign(mid, ues, omega, cfg) > 0)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi, it};
}

} // namespace

double f_k(double total_power, double sigma2, double beta, const SystemConfig& cfg)
{
    if (!(total_power > 0.0))
        throw DomainError("f_k: total power must be > 0");
    const double psi = pa::ibo(total_power, cfg.num_antennas, cfg.p_max);
    return 2.0 * sigma2 / (std::sqrt(std::numbers::pi) * beta * scale(cfg)) - erfc_over_root(psi);
}

std::pair<double, double> root_bounds(double sigma2, double beta, const SystemConfig& cfg)
{
    if (!(sigma2 > 0.0) || !(beta > 0.0))
        throw DomainError("root_bounds: sigma2 and beta must be positive");
    const double mp = cfg.num_antennas * cfg.p_max;
    // ln(beta * eta * M * p_max / (2 sigma2)), shared by both arguments
    const double log_x = std::log(beta) + std::log(scale(cfg)) - std::log(2.0 * sigma2);
    const double log_a = 0.5 * std::log(std::numbers::pi) + log_x;
    const double log_b = 0.5 - 0.5 * std::log(2.0) + log_x;
    const double w_lo = numerics::lambert_w0_of_log(std::log(2.0) + 2.0 * log_a);
    const double w_hi = numerics::lambert_w0_of_log(std::log(4.0) + 2.0 * log_b);
    return {2.0 * mp / w_lo, 4.0 * mp / w_hi};
}

double sum_rate_derivative(double total_power, const UeSet& ues, std::span<const double> omega,
                           const SystemConfig& cfg)
{
    const double psi = pa::ibo(total_power, cfg.num_antennas, cfg.p_max);
    const double e = psi > 700.0 ? 0.0 : std::exp(-psi);
    const double common = std::sqrt(pa::lambda_soft(psi)) * (1.0 - e - psi * e);
    return common * weighted_sum(total_power, ues, omega, cfg);
}

int sum_rate_derivative_sign(double total_power, const UeSet& ues, std::span<const double> omega,
                             const SystemConfig& cfg)
{
    const double s = weighted_sum(total_power, ues, omega, cfg);
    return (s > 0.0) - (s < 0.0);
}

double default_delta(const SystemConfig& cfg)
{
    return 1e-6 * cfg.num_antennas * cfg.p_max;
}

DapaResult solve_dapa(const UeSet& ues, std::span<const double> omega, const SystemConfig& cfg, double delta,
                      bool guard)
{
    check_inputs(ues, omega, cfg);
    if (!(delta > 0.0))
        throw DomainError("solve_dapa: delta must be > 0");

    std::size_t k_min = ues.size(), k_max = ues.size();
    for (std::size_t k = 0; k < ues.size(); ++k) {
        if (omega[k] <= 0.0)
            continue;
        if (k_min == ues.size() || ues.noise_to_gain(k) < ues.noise_to_gain(k_min))
            k_min = k;
        if (k_max == ues.size() || ues.noise_to_gain(k) > ues.noise_to_gain(k_max))
            k_max = k;
    }
    const double lo0 = root_bounds(ues.noise[k_min], ues.beta[k_min], cfg).first;
    const double hi0 = root_bounds(ues.noise[k_max], ues.beta[k_max], cfg).second;

    const int s_lo = sum_rate_derivative_sign(lo0, ues, omega, cfg);
    const int s_hi = sum_rate_derivative_sign(hi0, ues, omega, cfg);
    if (s_lo < 0 || s_hi > 0 || !(lo0 <= hi0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "solve_dapa: invalid bracket [" << lo0 << ", " << hi0 << "], derivative signs " << s_lo << ", "
            << s_hi;
        throw NumericalFailure(msg.str());
    }

    DapaResult res;
    res.initial_lo = lo0;
    res.initial_hi = hi0;
    const Bisection b = bisect(lo0, hi0, ues, omega, cfg, delta);
    res.bracket_lo = b.lo;
    res.bracket_hi = b.hi;
    res.iterations = b.iterations;
    res.total_power = 0.5 * b.lo + 0.5 * b.hi;

    if (guard && hi0 > lo0) {
        double best_obj = metrics::objective(cfg, ues, res.total_power, omega);
        std::array<double, kGuardSamples> grid{};
        int best_j = -1;
        double best_sample = -std::numeric_limits<double>::infinity();
        const double llo = std::log(lo0), lhi = std::log(hi0);
        for (int j = 0; j < kGuardSamples; ++j) {
            grid[j] = std::exp(llo + (lhi - llo) * j / (kGuardSamples - 1));
            const double v = metrics::objective(cfg, ues, grid[j], omega);
            if (v > best_sample) {
                best_sample = v;
                best_j = j;
            }
        }
        if (best_sample > best_obj) {
            res.guard_triggered = true;
            const double sub_lo = grid[std::max(best_j - 1, 0)];
            const double sub_hi = grid[std::min(best_j + 1, kGuardSamples - 1)];
            double cand;
            if (sum_rate_derivative_sign(sub_lo, ues, omega, cfg) >= 0
                && sum_rate_derivative_sign(sub_hi, ues, omega, cfg) <= 0) {
                const Bisection sb = bisect(sub_lo, sub_hi, ues, omega, cfg, delta);
                res.iterations += sb.iterations;
                cand = 0.5 * sb.lo + 0.5 * sb.hi;
                res.bracket_lo = sb.lo;
                res.bracket_hi = sb.hi;
            } else {
                cand = golden_max(sub_lo, sub_hi, ues, omega, cfg, delta);
                res.bracket_lo = std::max(sub_lo, cand - 0.5 * delta);
                res.bracket_hi = std::min(sub_hi, cand + 0.5 * delta);
            }
            const double cand_obj = metrics::objective(cfg, ues, cand, omega);
            if (cand_obj >= best_sample) {
                res.total_power = cand;
                best_obj = cand_obj;
            } else {
                res.total_power = grid[best_j];
                res.bracket_lo = res.bracket_hi = grid[best_j];
                best_obj = best_sample;
            }
        }
    }

    const double ref = sum_rate_derivative(lo0, ues, omega, cfg);
    const double here = sum_rate_derivative(res.total_power, ues, omega, cfg);
    res.derivative_residual = ref != 0.0 ? std::fabs(here / ref) : std::fabs(here);
    return res;
}

} // namespace mimopa::dapa
