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

#ifndef MIMOPA_PA_MODEL_HPP
#define MIMOPA_PA_MODEL_HPP

#include "mimopa/numerics.hpp"

#include <string>

namespace mimopa::pa {

enum class PaKind { SoftLimiter, Rapp };

/// Memoryless amplifier characteristic. The saturation power lives in
/// SystemConfig; this only selects the shape.
struct PaModel {
    PaKind kind = PaKind::SoftLimiter;
    double smoothness_p = 2.0; ///< Rapp only

    static PaModel soft_limiter() { return {}; }
    static PaModel rapp(double p) { return {PaKind::Rapp, p}; }

    void validate() const;
};

std::string to_string(PaKind kind);
PaKind parse_pa_kind(const std::string& name);

/// Bussgang characterization of one amplifier at a given back-off.
///
/// `lambda` is the fraction of input power surviving as correlated output,
/// `dist_coeff` the per-antenna distortion power per unit of per-antenna input
/// power, and `effective_distortion` the in-band distortion power referenced at
/// the transmitter (watts), which multiplies beta_k at each receiver.
struct PaOperatingPoint {
    double ibo = 0.0;
    double lambda = 1.0;
    double dist_coeff = 0.0;
    double effective_distortion = 0.0;

    double ibo_db() const;
};

/// Input back-off Psi = M * p_max / P.
double ibo(double total_power, int num_antennas, double p_max);

double lambda_soft(double psi);
double dist_coeff_soft(double psi);

double lambda_rapp(double psi, double p, const numerics::QuadratureSpec& spec = {});
double dist_coeff_rapp(double psi, double p, const numerics::QuadratureSpec& spec = {});

/// D = eta * dist_coeff * sum_k p_k.
double effective_distortion(double dist_coeff, double total_power, double eta);

/// lambda and dist_coeff for the given model at back-off psi (psi may be +inf).
struct BussgangPair {
    double lambda;
    double dist_coeff;
};
BussgangPair bussgang(const PaModel& model, double psi, const numerics::QuadratureSpec& spec = {});

} // namespace mimopa::pa

#endif
