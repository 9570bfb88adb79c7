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

#ifndef MIMOPA_SCENARIO_HPP
#define MIMOPA_SCENARIO_HPP

#include "mimopa/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mimopa::scenario {

/// Single-cell downlink setup. Keys of the JSON form match the field names.
struct ScenarioConfig {
    double cell_radius_m = 2000.0;
    double min_distance_m = 10.0;
    double fc_ghz = 3.0;
    int n_subcarriers = 1200;   ///< N_U
    double delta_f_hz = 15e3;
    int num_ues = 60;           ///< K
    int num_antennas = 64;      ///< M
    double p_max = 0.1;         ///< W
    double eta = 2.0 / 3.0;
    std::uint64_t seed = 1;
    std::optional<int> pilot_len;
    std::optional<double> rho_ul; ///< linear pilot factor, see metrics::csi_error_factor
    std::string pa = "soft_limiter"; ///< "soft_limiter" or "rapp"
    double rapp_p = 2.0;

    double bandwidth_hz() const { return n_subcarriers * delta_f_hz; }
    SystemConfig system() const;
    void validate() const;

    static ScenarioConfig baseline();      ///< 3 GHz, 2 km cell, 60 UEs, 64 antennas
    static ScenarioConfig imperfect_csi(); ///< fc = 3.5 GHz, 60 pilots

    static ScenarioConfig from_json(const std::string& text);
    static ScenarioConfig load(const std::string& path);
    std::string to_json() const;
};

/// 22.7 + 36.7 log10(d) + 26 log10(fc), d >= 1 m.
double path_loss_db(double d_m, double fc_ghz);
/// beta = 10^(-PL/10).
double gain_from_db(double pl_db);
/// -174 dBm/Hz over N_U * delta_f, in watts.
double noise_power_w(int n_subcarriers, double delta_f_hz);

/// Counter-based uniform in [0, 1): SplitMix64 finalizer over the key tuple.
double uniform01(std::uint64_t seed, std::uint64_t drop_id, std::uint64_t index, std::uint64_t stream);

/// UE distances for one drop, d^2 uniform on [min^2, R^2].
std::vector<double> drop_distances(const ScenarioConfig& sc, std::uint64_t drop_id);
UeSet drop_ues(const ScenarioConfig& sc, std::uint64_t drop_id);

/// Equal path loss for all K UEs, one set per grid value.
std::vector<UeSet> homogeneous_sweep(const std::vector<double>& pl_db_grid, const ScenarioConfig& sc);

struct TwoUeCell {
    double pl1_db;
    double pl2_db;
    UeSet ues;
};
/// All (pl1, pl2) pairs on lo..hi inclusive; row-major in pl1.
std::vector<TwoUeCell> two_ue_grid(double lo_db, double hi_db, double step_db, const ScenarioConfig& sc);

} // namespace mimopa::scenario

#endif
