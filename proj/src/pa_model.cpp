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

#include "mimopa/pa_model.hpp"

#include "mimopa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mimopa::pa {

namespace {

constexpr double kSqrtPi = 1.77245385090551602730;

// exp(-psi), flushed to exactly zero once it is below double range.
double exp_neg(double psi)
{
    return psi > 700.0 ? 0.0 : std::exp(-psi);
}

// b = 0.5 * sqrt(pi * psi) * erfc(sqrt(psi)), underflow-safe.
double half_sqrt_pi_psi_erfc(double psi)
{
    const double r = std::sqrt(psi);
    if (psi <= 25.0)
        return 0.5 * kSqrtPi * r * numerics::erfc(r);
    return 0.5 * kSqrtPi * r * numerics::erfcx(r) * exp_neg(psi);
}

double softplus(double u)
{
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

// (1 + eta^{2p} / psi^p)^{-1/(exponent_div * p)} * 2 eta^3 exp(-eta^2), with
// the power evaluated in the log domain so p = 200 does not overflow.
double rapp_integrand(double eta, double psi, double p, double exponent_div)
{
    if (eta <= 0.0)
        return 0.0;
    const double u = p * std::log(eta * eta / psi);
    const double shaping = std::exp(-softplus(u) / (exponent_div * p));
    return 2.0 * eta * eta * eta * shaping * std::exp(-eta * eta);
}

void check_rapp_args(double psi, double p)
{
    if (!(psi > 0.0))
        throw DomainError("Rapp model: IBO must be > 0");
    if (!(p > 0.0))
        throw DomainError("Rapp model: smoothness p must be > 0");
}

} // namespace

void PaModel::validate() const
{
    if (kind == PaKind::Rapp && !(smoothness_p > 0.0))
        throw DomainError("PaModel: Rapp smoothness_p must be > 0");
}

std::string to_string(PaKind kind)
{
    return kind == PaKind::SoftLimiter ? "soft_limiter" : "rapp";
}

PaKind parse_pa_kind(const std::string& name)
{
    if (name == "soft_limiter" || name == "soft-limiter" || name == "SoftLimiter")
        return PaKind::SoftLimiter;
    if (name == "rapp" || name == "Rapp")
        return PaKind::Rapp;
    throw DomainError("unknown PA model '" + name + "'");
}

double PaOperatingPoint::ibo_db() const
{
    return 10.0 * std::log10(ibo);
}

double ibo(double total_power, int num_antennas, double p_max)
{
    if (!(total_power > 0.0) || num_antennas < 1 || !(p_max > 0.0))
        throw DomainError("ibo: total power, antenna count and p_max must be positive");
    return num_antennas * p_max / total_power;
}

double lambda_soft(double psi)
{
    if (!(psi >= 0.0))
        throw DomainError("lambda_soft: IBO must be >= 0");
    if (std::isinf(psi))
        return 1.0;
    const double v = 1.0 - exp_neg(psi) + half_sqrt_pi_psi_erfc(psi);
    return v * v;
}

double dist_coeff_soft(double psi)
{
    if (!(psi >= 0.0))
        throw DomainError("dist_coeff_soft: IBO must be >= 0");
    if (std::isinf(psi) || psi > 700.0)
        return 0.0;
    // 1 - a - (1 - a + b)^2 rearranged as (1 - a)(a - 2b) - b^2, where
    // a - 2b = exp(-psi) (1 - sqrt(pi psi) erfcx(sqrt(psi))). The direct form
    // cancels to zero once the coefficient drops below machine epsilon.
    const double a = exp_neg(psi);
    const double b = half_sqrt_pi_psi_erfc(psi);
    const double r = std::sqrt(psi);
    const double a_minus_2b = a * (1.0 - kSqrtPi * r * numerics::erfcx(r));
    const double c = (1.0 - a) * a_minus_2b - b * b;
    return c > 0.0 ? c : 0.0;
}

double lambda_rapp(double psi, double p, const numerics::QuadratureSpec& spec)
{
    check_rapp_args(psi, p);
    if (std::isinf(psi))
        return 1.0;
    const double root = numerics::integrate_semi_infinite(
        [psi, p](double eta) { return rapp_integrand(eta, psi, p, 2.0); }, spec);
    return root * root;
}

double dist_coeff_rapp(double psi, double p, const numerics::QuadratureSpec& spec)
{
    check_rapp_args(psi, p);
    if (std::isinf(psi))
        return 0.0;
    const double output_power = numerics::integrate_semi_infinite(
        [psi, p](double eta) { return rapp_integrand(eta, psi, p, 1.0); }, spec);
    const double c = output_power - lambda_rapp(psi, p, spec);
    return c > 0.0 ? c : 0.0;
}

double effective_distortion(double dist_coeff, double total_power, double eta)
{
    if (!(dist_coeff >= 0.0) || !(total_power >= 0.0))
        throw DomainError("effective_distortion: inputs must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("effective_distortion: in-band fraction must lie in (0, 1]");
    return eta * dist_coeff * total_power;
}

BussgangPair bussgang(const PaModel& model, double psi, const numerics::QuadratureSpec& spec)
{
    model.validate();
    if (model.kind == PaKind::SoftLimiter)
        return {lambda_soft(psi), dist_coeff_soft(psi)};
    if (std::isinf(psi))
        return {1.0, 0.0};
    const double p = model.smoothness_p;
    check_rapp_args(psi, p);
    const double root = numerics::integrate_semi_infinite(
        [psi, p](double eta) { return rapp_integrand(eta, psi, p, 2.0); }, spec);
    const double output_power = numerics::integrate_semi_infinite(
        [psi, p](double eta) { return rapp_integrand(eta, psi, p, 1.0); }, spec);
    const double lambda = root * root;
    return {lambda, std::max(0.0, output_power - lambda)};
}

} // namespace mimopa::pa
