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

// mimopa_cli: command-line driver for the solvers and experiments.

#include "mimopa/allocator.hpp"
#include "mimopa/bench.hpp"
#include "mimopa/dapa.hpp"
#include "mimopa/linklevel.hpp"
#include "mimopa/nonconvexity.hpp"
#include "mimopa/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace mimopa;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    unsigned workers = 0;
    double delta = 0.0;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "scenario JSON")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "RNG seed (overrides the config)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--workers", c.workers, "worker threads, 0 = all cores");
    app->add_option("--delta", c.delta, "DAPA tolerance in watts, 0 = 1e-6 M p_max");
}

scenario::ScenarioConfig load_scenario(const Common& c)
{
    auto sc = c.config.empty() ? scenario::ScenarioConfig::baseline() : scenario::ScenarioConfig::load(c.config);
    if (c.seed)
        sc.seed = *c.seed;
    sc.validate();
    return sc;
}

std::ofstream open_out(const Common& c, const std::string& name)
{
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / name);
    if (!f)
        throw std::runtime_error("cannot write " + (fs::path(c.out) / name).string());
    return f;
}

bench::RunOptions run_options(const Common& c, const std::vector<std::string>& algs)
{
    bench::RunOptions o;
    o.workers = c.workers;
    o.delta = c.delta;
    if (!algs.empty()) {
        o.algorithms.clear();
        for (const auto& a : algs)
            o.algorithms.push_back(allocator::parse_algorithm(a));
    }
    return o;
}

std::vector<double> grid(double lo, double hi, double step)
{
    std::vector<double> v;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i)
        v.push_back(lo + i * step);
    return v;
}

int cmd_solve(const Common& c, const std::string& ues_path, std::uint64_t drop, const std::string& alg)
{
    const auto sc = load_scenario(c);
    auto cfg = sc.system();
    UeSet ues;
    if (!ues_path.empty()) {
        std::ifstream in(ues_path);
        if (!in)
            throw std::runtime_error("cannot open " + ues_path);
        const auto j = nlohmann::json::parse(in);
        ues.beta = j.at("beta").get<std::vector<double>>();
        ues.noise = j.contains("noise")
                        ? j.at("noise").get<std::vector<double>>()
                        : std::vector<double>(ues.beta.size(), scenario::noise_power_w(sc.n_subcarriers, sc.delta_f_hz));
        if (j.contains("csi_delta"))
            ues.csi_delta = j.at("csi_delta").get<std::vector<double>>();
        cfg.num_ues = static_cast<int>(ues.beta.size());
    } else {
        ues = scenario::drop_ues(sc, drop);
    }
    cfg.validate();
    ues.validate(cfg.num_ues);

    const auto a = allocator::parse_algorithm(alg);
    ordered_json out;
    out["algorithm"] = alg;
    Allocation alloc;
    if (a == allocator::Algorithm::DapaFpda) {
        allocator::AoOptions opts;
        opts.delta = c.delta;
        const auto res = allocator::alternating_optimize(ues, cfg, opts);
        alloc = res.allocation;
        out["converged"] = res.trace.converged;
        out["iterations"] = res.trace.iterations;
    } else {
        alloc = allocator::run(a, ues, cfg, c.delta);
    }
    const auto rep = metrics::evaluate(cfg, ues, alloc);
    out["total_power_w"] = alloc.total_power;
    out["omega"] = alloc.omega;
    out["ibo_db"] = rep.ibo_db;
    out["lambda"] = rep.operating_point.lambda;
    out["effective_distortion_w"] = rep.operating_point.effective_distortion;
    out["sindr"] = rep.sindr;
    out["rate_bps"] = rep.rate;
    out["sum_rate_bps"] = rep.sum_rate;
    open_out(c, "solve.json") << out.dump(2) << '\n';
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const Common& c, double lo, double hi, double step, const std::vector<std::string>& algs)
{
    const auto sc = load_scenario(c);
    const auto rows = bench::sweep_homogeneous(sc, grid(lo, hi, step), run_options(c, algs));
    auto f = open_out(c, "sweep_homogeneous.csv");
    bench::write_sweep_csv(rows, f);
    return 0;
}

int cmd_grid(const Common& c, double lo, double hi, double step)
{
    const auto sc = load_scenario(c);
    const auto cells = bench::grid_2ue(sc, lo, hi, step, run_options(c, {}));
    auto f = open_out(c, "grid_2ue.csv");
    bench::write_grid_csv(cells, f);
    return 0;
}

void write_run(const Common& c, const std::string& prefix, const std::vector<bench::DropResult>& rows)
{
    std::vector<std::string> labels;
    for (const auto& r : rows)
        if (std::find(labels.begin(), labels.end(), r.algorithm) == labels.end())
            labels.push_back(r.algorithm);
    for (const auto& l : labels) {
        const auto sel = bench::select(rows, l);
        auto f = open_out(c, prefix + "_" + l + ".csv");
        bench::write_drops_csv(sel, f);
        const auto rates = bench::sum_rates(sel);
        if (!rates.empty()) {
            auto g = open_out(c, prefix + "_ccdf_" + l + ".csv");
            bench::write_ccdf_csv(bench::ccdf(rates, l), g);
        }
    }
    open_out(c, prefix + "_summary.json") << bench::summary_json(rows) << '\n';
}

int cmd_montecarlo(const Common& c, int drops, const std::string& mode, double rapp_p, double icsi_delta,
                   const std::vector<std::string>& algs)
{
    const auto sc = load_scenario(c);
    auto opts = run_options(c, algs);
    opts.n_drops = drops;
    if (mode == "soft") {
        write_run(c, "montecarlo", bench::run_montecarlo(sc, opts));
    } else if (mode == "rapp") {
        const auto p = bench::evaluate_rapp_mode(sc, opts, rapp_p);
        write_run(c, "montecarlo", p.reference);
        write_run(c, "rapp", p.variant);
    } else if (mode == "icsi") {
        bench::DeltaPolicy policy;
        if (icsi_delta >= 0.0) {
            policy.fixed = icsi_delta;
        } else {
            if (!sc.pilot_len)
                throw std::invalid_argument("icsi mode without --icsi-delta needs pilot_len and rho_ul in the config");
            policy.pilot_len = *sc.pilot_len;
            policy.rho_ul = *sc.rho_ul;
        }
        const auto p = bench::evaluate_icsi_mode(sc, opts, policy);
        write_run(c, "montecarlo", p.reference);
        write_run(c, "icsi", p.variant);
    } else {
        throw std::invalid_argument("unknown mode: " + mode);
    }
    return 0;
}

int cmd_linklevel(const Common& c, linklevel::LinkSimConfig lc, const std::string& precoder)
{
    lc.precoder = linklevel::parse_precoder(precoder);
    lc.workers = c.workers;
    if (c.seed)
        lc.seed = *c.seed;
    const auto res = linklevel::simulate_sdr(lc);
    auto f = open_out(c, "linklevel.csv");
    linklevel::write_csv(res, f);
    ordered_json diag;
    diag["redraws"] = res.redraws;
    diag["mean_antenna_power"] = res.mean_antenna_power;
    diag["unclipped_residual_db"] = res.unclipped_residual_db;
    ordered_json pts = ordered_json::array();
    for (const auto& p : res.points)
        pts.push_back({{"ibo_db", p.ibo_db},
                       {"error_db", p.sdr_meas_db - p.sdr_analytic_db},
                       {"clip_fraction", p.clip_fraction},
                       {"clip_expected", std::exp(-std::pow(10.0, p.ibo_db / 10.0))},
                       {"gain_ratio", p.gain_ratio}});
    diag["points"] = pts;
    open_out(c, "linklevel_diagnostics.json") << diag.dump(2) << '\n';
    return 0;
}

int cmd_hessian(const Common& c, int n)
{
    auto [cfg, ues] = nonconvexity::reference_setup();
    const auto scan = nonconvexity::scan_grid(cfg, ues, n, 1e-6, 1.0, c.workers);
    auto f = open_out(c, "hessian.csv");
    f << "p1_w,p2_w,step_w,h11,h12,h22,eig_lo,eig_hi,eig_lo_half,eig_hi_half,richardson_error\n"
      << std::setprecision(17);
    for (const auto& p : scan)
        f << p.p1 << ',' << p.p2 << ',' << p.step << ',' << p.h11 << ',' << p.h12 << ',' << p.h22 << ','
          << p.eigenvalues[0] << ',' << p.eigenvalues[1] << ',' << p.eigenvalues_half[0] << ','
          << p.eigenvalues_half[1] << ',' << p.richardson_error << '\n';
    const auto hit = nonconvexity::find_indefinite(scan);
    ordered_json out;
    out["indefinite_found"] = hit.has_value();
    if (hit) {
        out["p1_w"] = hit->p1;
        out["p2_w"] = hit->p2;
        out["eigenvalues"] = hit->eigenvalues;
    }
    std::cout << out.dump(2) << '\n';
    return hit ? 0 : 3;
}

int cmd_validate(const Common& c, int instances)
{
    const auto checks = bench::invariant_suite(instances, c.seed.value_or(1), c.workers);
    ordered_json out = ordered_json::array();
    bool ok = true;
    for (const auto& ch : checks) {
        out.push_back({{"check", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        ok = ok && ch.passed;
    }
    open_out(c, "validate.json") << out.dump(2) << '\n';
    std::cout << out.dump(2) << '\n';
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mimopa: distortion-aware power allocation for massive-MIMO OFDM downlinks"};
    app.require_subcommand(1);
    Common common;

    auto* solve = app.add_subcommand("solve", "allocate power for one UE set, print JSON");
    std::string ues_path, alg = "DAPA-FPDA";
    std::uint64_t drop = 0;
    add_common(solve, common);
    solve->add_option("--ues", ues_path, "JSON with beta[], noise[] (optional), csi_delta[] (optional)");
    solve->add_option("--drop", drop, "drop id when --ues is not given");
    solve->add_option("--algorithm", alg, "DAPA-FPDA | DAPA-E | REF-E | REF-FPDA");

    auto* sweep = app.add_subcommand("sweep-homogeneous", "equal path loss sweep");
    double s_lo = 60, s_hi = 160, s_step = 1;
    std::vector<std::string> algs;
    add_common(sweep, common);
    sweep->add_option("--pl-lo", s_lo);
    sweep->add_option("--pl-hi", s_hi);
    sweep->add_option("--pl-step", s_step);
    sweep->add_option("--algorithms", algs);

    auto* grid2 = app.add_subcommand("grid-2ue", "two-UE path-loss grid vs REF-E");
    double g_lo = 60, g_hi = 150, g_step = 1;
    add_common(grid2, common);
    grid2->add_option("--pl-lo", g_lo);
    grid2->add_option("--pl-hi", g_hi);
    grid2->add_option("--pl-step", g_step);

    auto* mc = app.add_subcommand("montecarlo", "random drops, per-algorithm CSVs, CCDFs, summary");
    int drops = 200;
    std::string mode = "soft";
    double rapp_p = 2.0, icsi_delta = 0.1;
    add_common(mc, common);
    mc->add_option("--drops", drops);
    mc->add_option("--mode", mode, "soft | rapp | icsi")->check(CLI::IsMember({"soft", "rapp", "icsi"}));
    mc->add_option("--rapp-p", rapp_p);
    mc->add_option("--icsi-delta", icsi_delta, "fixed delta; negative = from pilots in the config");
    mc->add_option("--algorithms", algs);

    auto* ll = app.add_subcommand("linklevel", "OFDM clipping simulation, measured vs analytic SDR");
    linklevel::LinkSimConfig lc;
    std::string precoder = "ZF";
    add_common(ll, common);
    ll->add_option("--precoder", precoder, "ZF | MRT");
    ll->add_option("-M,--antennas", lc.num_antennas);
    ll->add_option("-K,--ues", lc.num_ues);
    ll->add_option("--symbols", lc.n_symbols);
    ll->add_option("--ibo", lc.ibo_grid_db, "IBO grid in dB");
    ll->add_option("--fft", lc.fft_size);
    ll->add_option("--used", lc.used_subcarriers);
    ll->add_option("--cp", lc.cp_len);

    auto* hc = app.add_subcommand("hessian-check", "finite-difference Hessian scan of the 2-UE sum-rate");
    int hess_n = 40;
    add_common(hc, common);
    hc->add_option("--grid", hess_n, "points per axis");

    auto* val = app.add_subcommand("validate", "run the randomized invariant suite");
    int instances = 200;
    add_common(val, common);
    val->add_option("--instances", instances);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve)
            return cmd_solve(common, ues_path, drop, alg);
        if (*sweep)
            return cmd_sweep(common, s_lo, s_hi, s_step, algs);
        if (*grid2)
            return cmd_grid(common, g_lo, g_hi, g_step);
        if (*mc)
            return cmd_montecarlo(common, drops, mode, rapp_p, icsi_delta, algs);
        if (*ll)
            return cmd_linklevel(common, lc, precoder);
        if (*hc)
            return cmd_hessian(common, hess_n);
        if (*val)
            return cmd_validate(common, instances);
    } catch (const std::exception& e) {
        ordered_json err{{"error", e.what()}, {"subcommand", app.get_subcommands().front()->get_name()}};
        std::cerr << err.dump() << '\n';
        return 1;
    }
    return 1;
}
