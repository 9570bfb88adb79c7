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

#ifndef MIMOPA_LINKLEVEL_HPP
#define MIMOPA_LINKLEVEL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mimopa::linklevel {

enum class Precoder { ZF, MRT };

std::string to_string(Precoder p);
Precoder parse_precoder(const std::string& name);

struct LinkSimConfig {
    int fft_size = 512;          ///< N
    int used_subcarriers = 100;  ///< N_U, bins 1..N_U
    int cp_len = 32;
    int num_antennas = 64;       ///< M
    int num_ues = 4;             ///< K
    Precoder precoder = Precoder::ZF;
    std::vector<double> ibo_grid_db = {-2, 0, 2, 4, 6, 8};
    int n_symbols = 200;
    int psk_order = 16;
    double eta = 2.0 / 3.0;
    std::uint64_t seed = 1;
    unsigned workers = 0;

    void validate() const;
};

struct LinkPoint {
    double ibo_db = 0.0;
    double sdr_meas_db = 0.0;
    double sdr_analytic_db = 0.0;
    double clip_fraction = 0.0;  ///< over all emitted samples, CP included
    double gain_ratio = 0.0;     ///< mean |alpha_k| / sqrt(lambda)
};

struct LinkSimResult {
    LinkSimConfig config;
    std::vector<LinkPoint> points;
    long redraws = 0;                ///< ill-conditioned sub-carrier channels redrawn
    double mean_antenna_power = 0.0; ///< before clipping; Psi is defined against 1.0
    double unclipped_residual_db = 0.0; ///< ZF: leakage over wanted with no clipping
    long samples_per_antenna = 0;
};

/// Analytic in-band SDR for homogeneous UEs with equal power and sigma^2 = 0.
double analytic_sdr(Precoder p, int num_antennas, int num_ues, double psi, double eta);

LinkSimResult simulate_sdr(const LinkSimConfig& cfg);

void write_csv(const LinkSimResult& res, std::ostream& out);

} // namespace mimopa::linklevel

#endif
