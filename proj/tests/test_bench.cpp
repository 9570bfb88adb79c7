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

#include "mimopa/bench.hpp"
#include "mimopa/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace mimopa;

namespace {

scenario::ScenarioConfig small_scenario(int m = 64, int k = 8)
{
    scenario::ScenarioConfig sc;
    sc.num_antennas = m;
    sc.num_ues = k;
    sc.seed = 11;
    return sc;
}

int count_lines(const std::string& s)
{
    int n = 0;
    for (char c : s)
        n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("empirical CCDF")
{
    const auto c = bench::ccdf({3.0, 1.0, 2.0}, "x");
    CHECK(c.label == "x");
    REQUIRE(c.values.size() == 3);
    CHECK(c.values[0] == 1.0);
    CHECK(c.values[2] == 3.0);
    CHECK(c.probability[0] == doctest::Approx(2.0 / 3.0));
    CHECK(c.probability[1] == doctest::Approx(1.0 / 3.0));
    CHECK(c.probability[2] == 0.0);
    // ties share the survival value
    const auto t = bench::ccdf({5.0, 5.0, 5.0});
    for (double p : t.probability)
        CHECK(p == 0.0);
}

TEST_CASE("quantiles")
{
    CHECK(bench::median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(bench::median({7.0}) == 7.0);
    CHECK(bench::quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0));
    CHECK(bench::quantile({10, 20}, 0.9) == doctest::Approx(19.0));
    CHECK_THROWS_AS(bench::median({}), DomainError);
    CHECK_THROWS_AS(bench::quantile({1.0}, 1.5), DomainError);
}

TEST_CASE("Monte-Carlo runs are deterministic and worker independent")
{
    bench::RunOptions o;
    o.n_drops = 6;
    o.workers = 1;
    const auto a = bench::run_montecarlo(small_scenario(), o);
    o.workers = 3;
    const auto b = bench::run_montecarlo(small_scenario(), o);
    REQUIRE(a.size() == 24);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ok);
        CHECK(a[i].algorithm == b[i].algorithm);
        CHECK(a[i].sum_rate == b[i].sum_rate);
    }
    // ordering by (drop, algorithm)
    CHECK(a[0].drop_id == 0);
    CHECK(a[0].algorithm == "DAPA-FPDA");
    CHECK(a[4].drop_id == 1);
    // per-drop dominance
    for (std::size_t d = 0; d < 6; ++d) {
        const auto& r = a;
        CHECK(r[4 * d].sum_rate >= r[4 * d + 1].sum_rate * (1 - 1e-9)); // DAPA-FPDA vs DAPA-E
        CHECK(r[4 * d + 1].sum_rate >= r[4 * d + 2].sum_rate * (1 - 1e-9)); // DAPA-E vs REF-E
    }
    const auto sel = bench::select(a, "REF-E");
    CHECK(sel.size() == 6);
    CHECK(bench::sum_rates(sel).size() == 6);
}

TEST_CASE("homogeneous sweep: DAPA-FPDA reduces to DAPA-E")
{
    bench::RunOptions o;
    const auto rows = bench::sweep_homogeneous(small_scenario(64, 4), {90.0, 120.0}, o);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        REQUIRE(r.algorithms.size() == 4);
        CHECK(r.sum_rate[0] == doctest::Approx(r.sum_rate[1]).epsilon(1e-9));
        CHECK(r.ibo_db[2] == doctest::Approx(6.0));
    }
    std::ostringstream os;
    bench::write_sweep_csv(rows, os);
    CHECK(os.str().rfind("pl_db,sum_rate_DAPA-FPDA,ibo_db_DAPA-FPDA", 0) == 0);
    CHECK(count_lines(os.str()) == 3);
}

TEST_CASE("Rapp re-evaluation loses rate but keeps the ordering")
{
    bench::RunOptions o;
    o.n_drops = 5;
    const auto pr = bench::evaluate_rapp_mode(small_scenario(), o, 2.0);
    REQUIRE(pr.reference.size() == pr.variant.size());
    for (std::size_t i = 0; i < pr.reference.size(); ++i)
        CHECK(pr.variant[i].sum_rate <= pr.reference[i].sum_rate * (1 + 1e-12));
    const auto soft = bench::sum_rates(bench::select(pr.variant, "DAPA-FPDA"));
    const auto ref = bench::sum_rates(bench::select(pr.variant, "REF-E"));
    for (std::size_t d = 0; d < soft.size(); ++d)
        CHECK(soft[d] > ref[d]);
}

TEST_CASE("imperfect CSI with zero error matches perfect CSI")
{
    bench::RunOptions o;
    o.n_drops = 4;
    bench::DeltaPolicy zero;
    zero.fixed = 0.0;
    const auto z = bench::evaluate_icsi_mode(small_scenario(), o, zero);
    for (std::size_t i = 0; i < z.reference.size(); ++i)
        CHECK(z.variant[i].sum_rate == doctest::Approx(z.reference[i].sum_rate).epsilon(1e-14));
    bench::DeltaPolicy tenth;
    tenth.fixed = 0.1;
    const auto t = bench::evaluate_icsi_mode(small_scenario(), o, tenth);
    for (std::size_t i = 0; i < t.reference.size(); ++i)
        CHECK(t.variant[i].sum_rate < t.reference[i].sum_rate);
}

TEST_CASE("two-UE grid")
{
    bench::RunOptions o;
    auto sc = small_scenario(64, 2);
    const auto cells = bench::grid_2ue(sc, 60.0, 150.0, 90.0, o);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].pl1_db == 60.0);
    CHECK(cells[1].pl2_db == 150.0);
    for (const auto& c : cells) {
        CHECK(c.ratio >= 1.0 - 1e-9);
        CHECK(c.omega1 >= 0.0);
        CHECK(c.omega1 <= 1.0);
    }
    CHECK(cells[1].ratio > 1.5);
    std::ostringstream os;
    bench::write_grid_csv(cells, os);
    CHECK(count_lines(os.str()) == 5);
}

TEST_CASE("writers and summary")
{
    bench::RunOptions o;
    o.n_drops = 3;
    o.algorithms = {allocator::Algorithm::DapaFpda, allocator::Algorithm::RefE};
    const auto rows = bench::run_montecarlo(small_scenario(), o);
    std::ostringstream d;
    bench::write_drops_csv(rows, d);
    CHECK(d.str().rfind("drop_id,algorithm,sum_rate_bps,", 0) == 0);
    CHECK(count_lines(d.str()) == 7);
    std::ostringstream c;
    bench::write_ccdf_csv(bench::ccdf(bench::sum_rates(rows)), c);
    CHECK(c.str().rfind("value,ccdf\n", 0) == 0);

    const auto j = nlohmann::json::parse(bench::summary_json(rows));
    REQUIRE(j.contains("DAPA-FPDA"));
    REQUIRE(j.contains("REF-E"));
    CHECK_FALSE(j.contains("DAPA-E"));
    CHECK(j["REF-E"]["drops"] == 3);
    CHECK(j["REF-E"]["failed"] == 0);
    CHECK(j["REF-E"]["ibo_db"]["median"].get<double>() == doctest::Approx(6.0));
    CHECK(j["DAPA-FPDA"]["sum_rate_bps"]["q1"] <= j["DAPA-FPDA"]["sum_rate_bps"]["q3"]);
}

TEST_CASE("invariant suite passes on random instances")
{
    const auto checks = bench::invariant_suite(40, 5);
    CHECK(checks.size() == 6);
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    const auto a = bench::random_instance(5, 7), b = bench::random_instance(5, 7);
    CHECK(a.cfg.num_antennas == b.cfg.num_antennas);
    CHECK(a.ues.beta == b.ues.beta);
    CHECK(a.cfg.num_ues < a.cfg.num_antennas);
}
