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

#include "mimopa/scenario.hpp"

#include "mimopa/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mimopa::scenario {

namespace {

using nlohmann::json;

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class T>
void read_opt(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

SystemConfig ScenarioConfig::system() const
{
    SystemConfig cfg;
    cfg.num_antennas = num_antennas;
    cfg.num_ues = num_ues;
    cfg.p_max = p_max;
    cfg.eta = eta;
    cfg.bandwidth_hz = bandwidth_hz();
    cfg.pa = pa::parse_pa_kind(pa) == pa::PaKind::Rapp ? pa::PaModel::rapp(rapp_p) : pa::PaModel::soft_limiter();
    return cfg;
}

void ScenarioConfig::validate() const
{
    if (!(min_distance_m > 0.0 && min_distance_m < cell_radius_m))
        throw DomainError("scenario: need 0 < min_distance_m < cell_radius_m");
    if (min_distance_m < 1.0)
        throw DomainError("scenario: path-loss model is valid for d >= 1 m");
    if (!(fc_ghz > 0.0) || n_subcarriers < 1 || !(delta_f_hz > 0.0))
        throw DomainError("scenario: carrier and sub-carrier parameters must be positive");
    if (pilot_len.has_value() != rho_ul.has_value())
        throw DomainError("scenario: pilot_len and rho_ul must be given together");
    system().validate();
}

ScenarioConfig ScenarioConfig::baseline()
{
    return {};
}

ScenarioConfig ScenarioConfig::imperfect_csi()
{
    ScenarioConfig sc;
    sc.fc_ghz = 3.5;
    sc.pilot_len = 60;
    sc.rho_ul = std::pow(10.0, 2.3) * 1e-3; // 23 dBm
    return sc;
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text)
{
    const json j = json::parse(text);
    ScenarioConfig sc;
    read_opt(j, "cell_radius_m", sc.cell_radius_m);
    read_opt(j, "min_distance_m", sc.min_distance_m);
    read_opt(j, "fc_ghz", sc.fc_ghz);
    read_opt(j, "n_subcarriers", sc.n_subcarriers);
    read_opt(j, "delta_f_hz", sc.delta_f_hz);
    read_opt(j, "num_ues", sc.num_ues);
    read_opt(j, "num_antennas", sc.num_antennas);
    read_opt(j, "p_max", sc.p_max);
    read_opt(j, "eta", sc.eta);
    read_opt(j, "seed", sc.seed);
    read_opt(j, "pa", sc.pa);
    read_opt(j, "rapp_p", sc.rapp_p);
    if (j.contains("pilot_len") && !j.at("pilot_len").is_null())
        sc.pilot_len = j.at("pilot_len").get<int>();
    if (j.contains("rho_ul") && !j.at("rho_ul").is_null())
        sc.rho_ul = j.at("rho_ul").get<double>();
    sc.validate();
    return sc;
}

ScenarioConfig ScenarioConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string ScenarioConfig::to_json() const
{
    json j = {{"cell_radius_m", cell_radius_m}, {"min_distance_m", min_distance_m},
              {"fc_ghz", fc_ghz},               {"n_subcarriers", n_subcarriers},
              {"delta_f_hz", delta_f_hz},       {"num_ues", num_ues},
              {"num_antennas", num_antennas},   {"p_max", p_max},
              {"eta", eta},                     {"seed", seed},
              {"pa", pa},                       {"rapp_p", rapp_p}};
    j["pilot_len"] = pilot_len ? json(*pilot_len) : json(nullptr);
    j["rho_ul"] = rho_ul ? json(*rho_ul) : json(nullptr);
    return j.dump(2);
}

double path_loss_db(double d_m, double fc_ghz)
{
    if (!(d_m >= 1.0))
        throw DomainError("path_loss_db: distance below 1 m is outside the model");
    if (!(fc_ghz > 0.0))
        throw DomainError("path_loss_db: carrier frequency must be > 0");
    return 22.7 + 36.7 * std::log10(d_m) + 26.0 * std::log10(fc_ghz);
}

double gain_from_db(double pl_db)
{
    return std::pow(10.0, -pl_db / 10.0);
}

double noise_power_w(int n_subcarriers, double delta_f_hz)
{
    if (n_subcarriers < 1 || !(delta_f_hz > 0.0))
        throw DomainError("noise_power_w: inputs must be positive");
    const double dbm = -174.0 + 10.0 * std::log10(n_subcarriers * delta_f_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double uniform01(std::uint64_t seed, std::uint64_t drop_id, std::uint64_t index, std::uint64_t stream)
{
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ drop_id);
    h = splitmix(h ^ index);
    h = splitmix(h ^ stream);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<double> drop_distances(const ScenarioConfig& sc, std::uint64_t drop_id)
{
    const double r0 = sc.min_distance_m * sc.min_distance_m;
    const double r1 = sc.cell_radius_m * sc.cell_radius_m;
    std::vector<double> d(static_cast<std::size_t>(sc.num_ues));
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = std::sqrt(r0 + (r1 - r0) * uniform01(sc.seed, drop_id, k, 0));
    return d;
}

UeSet drop_ues(const ScenarioConfig& sc, std::uint64_t drop_id)
{
    sc.validate();
    const double sigma2 = noise_power_w(sc.n_subcarriers, sc.delta_f_hz);
    UeSet ues;
    for (double d : drop_distances(sc, drop_id)) {
        ues.beta.push_back(gain_from_db(path_loss_db(d, sc.fc_ghz)));
        ues.noise.push_back(sigma2);
    }
    if (sc.pilot_len) {
        std::vector<double> delta;
        for (double b : ues.beta)
            delta.push_back(metrics::csi_error_factor(b, *sc.pilot_len, *sc.rho_ul));
        ues.csi_delta = std::move(delta);
    }
    return ues;
}

std::vector<UeSet> homogeneous_sweep(const std::vector<double>& pl_db_grid, const ScenarioConfig& sc)
{
    const double sigma2 = noise_power_w(sc.n_subcarriers, sc.delta_f_hz);
    const auto k = static_cast<std::size_t>(sc.num_ues);
    std::vector<UeSet> out;
    out.reserve(pl_db_grid.size());
    for (double pl : pl_db_grid)
        out.push_back({std::vector<double>(k, gain_from_db(pl)), std::vector<double>(k, sigma2), std::nullopt});
    return out;
}

std::vector<TwoUeCell> two_ue_grid(double lo_db, double hi_db, double step_db, const ScenarioConfig& sc)
{
    if (!(step_db > 0.0) || !(hi_db >= lo_db))
        throw DomainError("two_ue_grid: need step > 0 and hi >= lo");
    const double sigma2 = noise_power_w(sc.n_subcarriers, sc.delta_f_hz);
    const int n = static_cast<int>(std::floor((hi_db - lo_db) / step_db + 1e-9)) + 1;
    std::vector<TwoUeCell> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = lo_db + i * step_db, b = lo_db + j * step_db;
            out.push_back({a, b, {{gain_from_db(a), gain_from_db(b)}, {sigma2, sigma2}, std::nullopt}});
        }
    return out;
}

} // namespace mimopa::scenario
