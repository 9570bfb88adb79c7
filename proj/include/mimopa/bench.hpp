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

#ifndef MIMOPA_BENCH_HPP
#define MIMOPA_BENCH_HPP

#include "mimopa/allocator.hpp"
#include "mimopa/metrics.hpp"
#include "mimopa/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mimopa::bench {

/// Empirical survival function: probability[i] = P(X > values[i]).
struct CcdfSeries {
    std::string label;
    std::vector<double> values;
    std::vector<double> probability;
};

CcdfSeries ccdf(std::vector<double> values, std::string label = {});

/// Linear-interpolated quantile (type 7), q in [0, 1].
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

struct DropResult {
    std::uint64_t drop_id = 0;
    std::string algorithm;
    double sum_rate = 0.0;
    double total_power = 0.0;
    double ibo_db = 0.0;
    double omega_max = 0.0;
    std::vector<double> rates;
    bool ok = true;
    std::string error;
};

/// Allocations of every requested algorithm for one drop.
struct DropAllocation {
    std::uint64_t drop_id = 0;
    UeSet ues;
    std::vector<allocator::Algorithm> algorithms;
    std::vector<std::optional<Allocation>> allocations; ///< empty on solver failure
    std::vector<std::string> errors;
};

struct RunOptions {
    std::vector<allocator::Algorithm> algorithms{allocator::kAllAlgorithms.begin(), allocator::kAllAlgorithms.end()};
    int n_drops = 100;
    double delta = 0.0; ///< <= 0: default
    unsigned workers = 0;
};

std::vector<DropAllocation> allocate_drops(const scenario::ScenarioConfig& sc, const RunOptions& opts);

/// Evaluates stored allocations; results ordered by (drop, algorithm).
std::vector<DropResult> evaluate_drops(const std::vector<DropAllocation>& drops, const SystemConfig& cfg,
                                       SindrModel model = SindrModel::ZeroForcing);

std::vector<DropResult> run_montecarlo(const scenario::ScenarioConfig& sc, const RunOptions& opts);

struct PairedResults {
    std::vector<DropResult> reference; ///< soft limiter, perfect CSI
    std::vector<DropResult> variant;
};

/// Same allocations evaluated with the soft limiter and with Rapp(p).
PairedResults evaluate_rapp_mode(const scenario::ScenarioConfig& sc, const RunOptions& opts, double rapp_p = 2.0);

/// CSI error factors: a fixed value for every UE, or per-UE from pilots.
struct DeltaPolicy {
    std::optional<double> fixed;
    int pilot_len = 60;
    double rho_ul = 0.0;
};

/// Perfect-CSI allocations re-evaluated with the imperfect-CSI SINDR.
PairedResults evaluate_icsi_mode(const scenario::ScenarioConfig& sc, const RunOptions& opts,
                                 const DeltaPolicy& policy);

/// Results for one algorithm, in drop order.
std::vector<DropResult> select(const std::vector<DropResult>& all, const std::string& algorithm);
std::vector<double> sum_rates(const std::vector<DropResult>& rows);

struct SweepRow {
    double pl_db = 0.0;
    std::vector<std::string> algorithms;
    std::vector<double> sum_rate;
    std::vector<double> ibo_db;
};
std::vector<SweepRow> sweep_homogeneous(const scenario::ScenarioConfig& sc, const std::vector<double>& pl_grid,
                                        const RunOptions& opts);

struct GridCell {
    double pl1_db = 0.0, pl2_db = 0.0;
    double sum_rate = 0.0;     ///< DAPA-FPDA
    double sum_rate_ref = 0.0; ///< REF-E
    double ratio = 0.0;
    double omega1 = 0.0;
    double ibo_db = 0.0;
};
std::vector<GridCell> grid_2ue(const scenario::ScenarioConfig& sc, double lo_db, double hi_db, double step_db,
                               const RunOptions& opts);

void write_drops_csv(const std::vector<DropResult>& rows, std::ostream& out);
void write_ccdf_csv(const CcdfSeries& s, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out);

/// Per-algorithm median and quartiles of sum-rate, IBO and max omega.
std::string summary_json(const std::vector<DropResult>& rows);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Seeded random instances: random system sizes, UE distances and p_max.
struct Instance {
    SystemConfig cfg;
    UeSet ues;
};
Instance random_instance(std::uint64_t seed, std::uint64_t index);

/// Cheap structural checks over random instances (solver cross-checks,
/// bracket validity, dominance ladder, AO monotonicity, CSI reduction).
std::vector<Check> invariant_suite(int instances, std::uint64_t seed, unsigned workers = 0);

} // namespace mimopa::bench

#endif
