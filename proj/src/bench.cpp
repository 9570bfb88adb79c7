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

#include "mimopa/dapa.hpp"
#include "mimopa/error.hpp"
#include "mimopa/fpda.hpp"
#include "mimopa/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mimopa::bench {

namespace {

DropResult make_result(std::uint64_t drop_id, allocator::Algorithm a, const Allocation& alloc,
                       const UeSet& ues, const SystemConfig& cfg, SindrModel model)
{
    const EvalReport rep = metrics::evaluate(cfg, ues, alloc, model);
    DropResult r;
    r.drop_id = drop_id;
    r.algorithm = std::string(allocator::label(a));
    r.sum_rate = rep.sum_rate;
    r.total_power = alloc.total_power;
    r.ibo_db = rep.ibo_db;
    r.omega_max = *std::max_element(alloc.omega.begin(), alloc.omega.end());
    r.rates = rep.rate;
    return r;
}

SystemConfig soft(SystemConfig cfg)
{
    cfg.pa = pa::PaModel::soft_limiter();
    return cfg;
}

} // namespace

CcdfSeries ccdf(std::vector<double> values, std::string label)
{
    if (values.empty())
        throw DomainError("ccdf: empty sample");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    CcdfSeries s;
    s.label = std::move(label);
    s.probability.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto above = values.end() - std::upper_bound(values.begin(), values.end(), values[i]);
        s.probability[i] = static_cast<double>(above) / n;
    }
    s.values = std::move(values);
    return s;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw DomainError("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= values.size())
        return values.back();
    return values[i] + (pos - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

double median(std::vector<double> values)
{
    return quantile(std::move(values), 0.5);
}

std::vector<DropAllocation> allocate_drops(const scenario::ScenarioConfig& sc, const RunOptions& opts)
{
    sc.validate();
    if (opts.n_drops < 1)
        throw DomainError("montecarlo: need at least one drop");
    const SystemConfig cfg = soft(sc.system());
    std::vector<DropAllocation> drops(static_cast<std::size_t>(opts.n_drops));
    parallel_for(drops.size(), opts.workers, [&](std::size_t i) {
        DropAllocation& d = drops[i];
        d.drop_id = i;
        d.ues = scenario::drop_ues(sc, i);
        d.algorithms = opts.algorithms;
        for (auto a : opts.algorithms) {
            try {
                d.allocations.emplace_back(allocator::run(a, d.ues, cfg, opts.delta));
                d.errors.emplace_back();
            } catch (const std::exception& e) {
                d.allocations.emplace_back(std::nullopt);
                d.errors.emplace_back(e.what());
            }
        }
    });
    return drops;
}

std::vector<DropResult> evaluate_drops(const std::vector<DropAllocation>& drops, const SystemConfig& cfg,
                                       SindrModel model)
{
    std::vector<std::vector<DropResult>> per(drops.size());
    parallel_for(drops.size(), 0, [&](std::size_t i) {
        const auto& d = drops[i];
        for (std::size_t j = 0; j < d.algorithms.size(); ++j) {
            if (d.allocations[j]) {
                try {
                    per[i].push_back(make_result(d.drop_id, d.algorithms[j], *d.allocations[j], d.ues, cfg, model));
                    continue;
                } catch (const std::exception& e) {
                    DropResult r;
                    r.drop_id = d.drop_id;
                    r.algorithm = std::string(allocator::label(d.algorithms[j]));
                    r.ok = false;
                    r.error = e.what();
                    per[i].push_back(r);
                    continue;
                }
            }
            DropResult r;
            r.drop_id = d.drop_id;
            r.algorithm = std::string(allocator::label(d.algorithms[j]));
            r.ok = false;
            r.error = d.errors[j];
            per[i].push_back(r);
        }
    });
    std::vector<DropResult> out;
    for (auto& v : per)
        for (auto& r : v)
            out.push_back(std::move(r));
    return out;
}

std::vector<DropResult> run_montecarlo(const scenario::ScenarioConfig& sc, const RunOptions& opts)
{
    return evaluate_drops(allocate_drops(sc, opts), soft(sc.system()));
}

PairedResults evaluate_rapp_mode(const scenario::ScenarioConfig& sc, const RunOptions& opts, double rapp_p)
{
    const auto drops = allocate_drops(sc, opts);
    SystemConfig rapp = sc.system();
    rapp.pa = pa::PaModel::rapp(rapp_p);
    return {evaluate_drops(drops, soft(sc.system())), evaluate_drops(drops, rapp)};
}

PairedResults evaluate_icsi_mode(const scenario::ScenarioConfig& sc, const RunOptions& opts,
                                 const DeltaPolicy& policy)
{
    auto drops = allocate_drops(sc, opts);
    const SystemConfig cfg = soft(sc.system());
    PairedResults out;
    out.reference = evaluate_drops(drops, cfg);
    for (auto& d : drops) {
        std::vector<double> delta(d.ues.size());
        for (std::size_t k = 0; k < delta.size(); ++k)
            delta[k] = policy.fixed ? *policy.fixed
                                    : metrics::csi_error_factor(d.ues.beta[k], policy.pilot_len, policy.rho_ul);
        d.ues.csi_delta = std::move(delta);
        d.ues.validate(cfg.num_ues);
    }
    out.variant = evaluate_drops(drops, cfg, SindrModel::ZeroForcingImperfectCsi);
    return out;
}

std::vector<DropResult> select(const std::vector<DropResult>& all, const std::string& algorithm)
{
    std::vector<DropResult> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [&](const DropResult& r) { return r.algorithm == algorithm; });
    return out;
}

std::vector<double> sum_rates(const std::vector<DropResult>& rows)
{
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.ok)
            v.push_back(r.sum_rate);
    return v;
}

std::vector<SweepRow> sweep_homogeneous(const scenario::ScenarioConfig& sc, const std::vector<double>& pl_grid,
                                        const RunOptions& opts)
{
    sc.validate();
    const SystemConfig cfg = soft(sc.system());
    const auto sets = scenario::homogeneous_sweep(pl_grid, sc);
    std::vector<SweepRow> rows(sets.size());
    parallel_for(sets.size(), opts.workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.pl_db = pl_grid[i];
        for (auto a : opts.algorithms) {
            const Allocation alloc = allocator::run(a, sets[i], cfg, opts.delta);
            const EvalReport rep = metrics::evaluate(cfg, sets[i], alloc);
            row.algorithms.emplace_back(allocator::label(a));
            row.sum_rate.push_back(rep.sum_rate);
            row.ibo_db.push_back(rep.ibo_db);
        }
    });
    return rows;
}

std::vector<GridCell> grid_2ue(const scenario::ScenarioConfig& sc, double lo_db, double hi_db, double step_db,
                               const RunOptions& opts)
{
    scenario::ScenarioConfig two = sc;
    two.num_ues = 2;
    two.validate();
    const SystemConfig cfg = soft(two.system());
    const auto grid = scenario::two_ue_grid(lo_db, hi_db, step_db, two);
    std::vector<GridCell> cells(grid.size());
    parallel_for(grid.size(), opts.workers, [&](std::size_t i) {
        const auto& g = grid[i];
        allocator::AoOptions ao;
        ao.delta = opts.delta;
        const Allocation best = allocator::alternating_optimize(g.ues, cfg, ao).allocation;
        const Allocation ref = allocator::ref_e(g.ues, cfg);
        GridCell& c = cells[i];
        c.pl1_db = g.pl1_db;
        c.pl2_db = g.pl2_db;
        const EvalReport rep = metrics::evaluate(cfg, g.ues, best);
        c.sum_rate = rep.sum_rate;
        c.sum_rate_ref = metrics::evaluate(cfg, g.ues, ref).sum_rate;
        c.ratio = c.sum_rate / c.sum_rate_ref;
        c.omega1 = best.omega[0];
        c.ibo_db = rep.ibo_db;
    });
    return cells;
}

void write_drops_csv(const std::vector<DropResult>& rows, std::ostream& out)
{
    out << "drop_id,algorithm,sum_rate_bps,total_power_w,ibo_db,omega_max,ok,error\n" << std::setprecision(17);
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.drop_id << ',' << r.algorithm << ',' << r.sum_rate << ',' << r.total_power << ',' << r.ibo_db
            << ',' << r.omega_max << ',' << (r.ok ? 1 : 0) << ',' << err << '\n';
    }
}

void write_ccdf_csv(const CcdfSeries& s, std::ostream& out)
{
    out << "value,ccdf\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        out << s.values[i] << ',' << s.probability[i] << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out)
{
    out << "pl_db";
    if (!rows.empty())
        for (const auto& a : rows.front().algorithms)
            out << ",sum_rate_" << a << ",ibo_db_" << a;
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.pl_db;
        for (std::size_t j = 0; j < r.algorithms.size(); ++j)
            out << ',' << r.sum_rate[j] << ',' << r.ibo_db[j];
        out << '\n';
    }
}

void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out)
{
    out << "pl1_db,pl2_db,sum_rate_dapa_fpda,sum_rate_ref_e,ratio,omega1,ibo_db\n" << std::setprecision(17);
    for (const auto& c : cells)
        out << c.pl1_db << ',' << c.pl2_db << ',' << c.sum_rate << ',' << c.sum_rate_ref << ',' << c.ratio << ','
            << c.omega1 << ',' << c.ibo_db << '\n';
}

std::string summary_json(const std::vector<DropResult>& rows)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    std::vector<std::string> labels;
    for (const auto& r : rows)
        if (std::find(labels.begin(), labels.end(), r.algorithm) == labels.end())
            labels.push_back(r.algorithm);
    auto stats = [](const std::vector<double>& v) {
        nlohmann::ordered_json s;
        if (v.empty())
            return s;
        s["q1"] = quantile(v, 0.25);
        s["median"] = quantile(v, 0.5);
        s["q3"] = quantile(v, 0.75);
        return s;
    };
    for (const auto& label : labels) {
        std::vector<double> rate, ibo, wmax;
        int failed = 0;
        for (const auto& r : rows) {
            if (r.algorithm != label)
                continue;
            if (!r.ok) {
                ++failed;
                continue;
            }
            rate.push_back(r.sum_rate);
            ibo.push_back(r.ibo_db);
            wmax.push_back(r.omega_max);
        }
        j[label] = {{"drops", rate.size()}, {"failed", failed}, {"sum_rate_bps", stats(rate)},
                    {"ibo_db", stats(ibo)},  {"omega_max", stats(wmax)}};
    }
    return j.dump(2);
}

Instance random_instance(std::uint64_t seed, std::uint64_t index)
{
    auto u = [&](std::uint64_t stream) { return scenario::uniform01(seed, index, 0, stream); };
    static constexpr int kAntennas[] = {16, 32, 64, 128, 512};
    scenario::ScenarioConfig sc;
    sc.seed = seed ^ 0x5eedULL;
    sc.num_antennas = kAntennas[static_cast<int>(u(1) * 5.0) % 5];
    sc.num_ues = 1 + static_cast<int>(u(2) * std::min(12, sc.num_antennas - 1));
    sc.p_max = u(3) < 0.5 ? 0.01 : 0.1;
    Instance inst{sc.system(), scenario::drop_ues(sc, index)};
    inst.cfg.pa = pa::PaModel::soft_limiter();
    return inst;
}

std::vector<Check> invariant_suite(int instances, std::uint64_t seed, unsigned workers)
{
    if (instances < 1)
        throw DomainError("invariant_suite: need at least one instance");
    const auto n = static_cast<std::size_t>(instances);
    struct Row {
        double wf_diff = 0.0;
        bool bracket = true;
        bool ladder = true;
        bool ao_monotone = true;
        bool ao_converged = true;
        bool icsi_equal = true;
        std::string note;
    };
    std::vector<Row> rows(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Row& r = rows[i];
        const Instance inst = random_instance(seed, i);
        const auto& cfg = inst.cfg;
        const auto& ues = inst.ues;

        // water-filling solvers on a random breakpoint vector
        std::vector<double> g(ues.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            g[k] = std::pow(10.0, 4.0 * scenario::uniform01(seed, i, k, 7) - 2.0);
        const auto prob = fpda::make_problem(g);
        const auto a = fpda::solve_fpda(prob), b = fpda::solve_fpda_bisect(prob);
        for (std::size_t k = 0; k < a.size(); ++k)
            r.wf_diff = std::max(r.wf_diff, std::fabs(a[k] - b[k]));

        // Lambert-W bracket for a random (sigma2, beta) pair
        const double beta = std::pow(10.0, -16.0 + 10.0 * scenario::uniform01(seed, i, 0, 8));
        const double sigma2 = std::pow(10.0, -15.0 + 3.0 * scenario::uniform01(seed, i, 0, 9));
        const auto [lo, hi] = dapa::root_bounds(sigma2, beta, cfg);
        r.bracket = lo <= hi && dapa::f_k(lo, sigma2, beta, cfg) >= -1e-12 && dapa::f_k(hi, sigma2, beta, cfg) <= 1e-12;

        const auto ao = allocator::alternating_optimize(ues, cfg);
        const auto rate = [&](const Allocation& x) { return metrics::objective(cfg, ues, x.total_power, x.omega); };
        const double s_ao = rate(ao.allocation);
        const double s_de = rate(allocator::dapa_e(ues, cfg));
        const double s_rf = rate(allocator::ref_fpda(ues, cfg));
        const double s_re = rate(allocator::ref_e(ues, cfg));
        const double slack = 1e-9;
        r.ladder = s_ao >= s_de * (1 - slack) && s_ao >= s_rf * (1 - slack) && s_rf >= s_re * (1 - slack);
        if (!r.ladder) {
            std::ostringstream os;
            os.precision(10);
            os << "instance " << i << ": DAPA-FPDA " << s_ao << " DAPA-E " << s_de << " REF-FPDA " << s_rf
               << " REF-E " << s_re;
            r.note = os.str();
        }
        const auto& it = ao.trace.iterates;
        for (std::size_t j = 1; j < it.size(); ++j)
            if (it[j].sum_rate < it[j - 1].sum_rate * (1 - slack))
                r.ao_monotone = false;
        r.ao_converged = ao.trace.converged;

        UeSet z = ues;
        z.csi_delta = std::vector<double>(ues.size(), 0.0);
        const auto op = metrics::operating_point(cfg, ao.allocation);
        r.icsi_equal = metrics::sindr_zf(cfg, z, ao.allocation, op) == metrics::sindr_zf_icsi(cfg, z, ao.allocation, op);
    });

    auto count = [&](auto pred) {
        return static_cast<int>(std::count_if(rows.begin(), rows.end(), pred));
    };
    auto mk = [&](std::string name, int bad, std::string extra = {}) {
        std::ostringstream os;
        os << bad << " of " << instances << " instances violate";
        if (!extra.empty())
            os << "; " << extra;
        return Check{std::move(name), bad == 0, os.str()};
    };
    double worst_wf = 0.0;
    for (const auto& r : rows)
        worst_wf = std::max(worst_wf, r.wf_diff);
    std::string first_ladder;
    for (const auto& r : rows)
        if (!r.note.empty()) {
            first_ladder = r.note;
            break;
        }
    std::ostringstream wf;
    wf << "max |closed - bisect| = " << worst_wf;
    return {
        mk("waterfill_solvers_agree", count([](const Row& r) { return r.wf_diff > 1e-8; }), wf.str()),
        mk("root_bounds_bracket", count([](const Row& r) { return !r.bracket; })),
        mk("dominance_ladder", count([](const Row& r) { return !r.ladder; }), first_ladder),
        mk("ao_monotone", count([](const Row& r) { return !r.ao_monotone; })),
        mk("ao_converged", count([](const Row& r) { return !r.ao_converged; })),
        mk("icsi_zero_delta_matches_zf", count([](const Row& r) { return !r.icsi_equal; })),
    };
}

} // namespace mimopa::bench
