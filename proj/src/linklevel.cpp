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

// OFDM link-level check of the Bussgang SDR model: random 16-PSK symbols,
// per-sub-carrier i.i.d. Rayleigh channels, ZF/MRT precoding, soft-limiter
// clipping in the time domain on every antenna.

#include "mimopa/linklevel.hpp"

#include "mimopa/error.hpp"
#include "mimopa/pa_model.hpp"
#include "mimopa/parallel.hpp"

#include <armadillo>

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace mimopa::linklevel {

namespace {

constexpr double kMaxCondition = 1e8;

using cx = std::complex<double>;

// Per-symbol sums, reduced in symbol order afterwards.
struct Accum {
    // [ibo][ue]
    std::vector<std::vector<cx>> ru;
    std::vector<std::vector<double>> rr;
    std::vector<double> uu; // [ue]
    std::vector<double> clipped;  // [ibo]
    double power = 0.0;
    double leak = 0.0;
    double wanted = 0.0;
    long redraws = 0;
};

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

arma::cx_mat rayleigh(int rows, int cols, std::mt19937_64& gen)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    arma::cx_mat h(rows, cols);
    for (arma::uword j = 0; j < h.n_cols; ++j)
        for (arma::uword i = 0; i < h.n_rows; ++i) {
            const double re = n(gen);
            h(i, j) = cx(re, n(gen));
        }
    return h;
}

arma::cx_mat clip(const arma::cx_mat& y, double psi)
{
    arma::cx_mat out = y;
    const double a = std::sqrt(psi);
    out.transform([&](cx v) {
        const double m = std::abs(v);
        return m > a ? v * (a / m) : v;
    });
    return out;
}

// Received per-UE samples r(n, k) = h_{k,n}^T Y_n over the used bins.
arma::cx_mat receive(const std::vector<arma::cx_mat>& h, const arma::cx_mat& tx_time, int used, int fft_size)
{
    arma::cx_mat freq = arma::fft(tx_time) / static_cast<double>(fft_size);
    const auto k = h.front().n_rows;
    arma::cx_mat r(used, k);
    for (int n = 0; n < used; ++n) {
        const arma::cx_vec y = freq.row(n + 1).st();
        r.row(n) = (h[n] * y).st();
    }
    return r;
}

Accum run_symbol(const LinkSimConfig& cfg, int sym)
{
    const int m = cfg.num_antennas, k = cfg.num_ues, nu = cfg.used_subcarriers, nfft = cfg.fft_size;
    std::mt19937_64 gen(mix(mix(cfg.seed) ^ static_cast<std::uint64_t>(sym)));
    std::uniform_int_distribution<int> psk(0, cfg.psk_order - 1);

    Accum acc;
    std::vector<arma::cx_mat> h(nu);
    std::vector<arma::cx_mat> w(nu);
    for (int n = 0; n < nu; ++n) {
        for (;;) {
            h[n] = rayleigh(k, m, gen);
            if (arma::cond(h[n]) <= kMaxCondition)
                break;
            ++acc.redraws;
        }
        w[n] = cfg.precoder == Precoder::ZF ? arma::cx_mat(h[n].t() * arma::inv(h[n] * h[n].t()))
                                            : arma::cx_mat(h[n].t());
    }
    // scale column k so its power over antennas and bins is p_k = M/K
    arma::vec col_power(k, arma::fill::zeros);
    for (int n = 0; n < nu; ++n)
        col_power += arma::sum(arma::square(arma::abs(w[n])), 0).t();
    const arma::vec scale = arma::sqrt((static_cast<double>(m) / k) / col_power);

    arma::cx_mat s(nu, k);
    for (int n = 0; n < nu; ++n)
        for (int j = 0; j < k; ++j)
            s(n, j) = std::polar(1.0, 2.0 * std::numbers::pi * psk(gen) / cfg.psk_order);

    arma::cx_mat freq(nfft, m, arma::fill::zeros);
    arma::cx_mat u(nu, k);
    for (int n = 0; n < nu; ++n) {
        w[n].each_row() %= arma::conv_to<arma::cx_rowvec>::from(scale.t());
        const arma::cx_vec sn = s.row(n).st();
        freq.row(n + 1) = (w[n] * sn).st();
        const arma::cx_mat eff = h[n] * w[n]; // K x K
        u.row(n) = (eff.diag() % sn).st();
    }
    // unnormalized inverse DFT: per-antenna mean power sum_k p_k / M = 1
    const arma::cx_mat time = arma::ifft(freq) * static_cast<double>(nfft);
    arma::cx_mat with_cp(nfft + cfg.cp_len, m);
    with_cp.rows(0, cfg.cp_len - 1) = time.rows(nfft - cfg.cp_len, nfft - 1);
    with_cp.rows(cfg.cp_len, nfft + cfg.cp_len - 1) = time;

    acc.power = arma::mean(arma::mean(arma::square(arma::abs(with_cp)), 0));
    acc.uu.assign(k, 0.0);
    for (int j = 0; j < k; ++j)
        acc.uu[j] = arma::accu(arma::square(arma::abs(u.col(j))));

    {
        const arma::cx_mat r = receive(h, time, nu, nfft);
        acc.leak = arma::accu(arma::square(arma::abs(r - u)));
        acc.wanted = arma::accu(arma::square(arma::abs(u)));
    }

    const auto n_ibo = cfg.ibo_grid_db.size();
    acc.ru.assign(n_ibo, std::vector<cx>(k));
    acc.rr.assign(n_ibo, std::vector<double>(k));
    acc.clipped.assign(n_ibo, 0.0);
    const arma::mat mag2 = arma::square(arma::abs(with_cp));
    for (std::size_t i = 0; i < n_ibo; ++i) {
        const double psi = std::pow(10.0, cfg.ibo_grid_db[i] / 10.0);
        acc.clipped[i] = static_cast<double>(arma::accu(mag2 > psi));
        const arma::cx_mat yc = clip(with_cp, psi);
        const arma::cx_mat r = receive(h, yc.rows(cfg.cp_len, nfft + cfg.cp_len - 1), nu, nfft);
        for (int j = 0; j < k; ++j) {
            acc.ru[i][j] = arma::cdot(u.col(j), r.col(j)); // sum r u*
            acc.rr[i][j] = arma::accu(arma::square(arma::abs(r.col(j))));
        }
    }
    return acc;
}

double to_db(double x)
{
    return 10.0 * std::log10(x);
}

} // namespace

std::string to_string(Precoder p)
{
    return p == Precoder::ZF ? "ZF" : "MRT";
}

Precoder parse_precoder(const std::string& name)
{
    if (name == "ZF" || name == "zf")
        return Precoder::ZF;
    if (name == "MRT" || name == "mrt")
        return Precoder::MRT;
    throw DomainError("unknown precoder: " + name);
}

void LinkSimConfig::validate() const
{
    if (fft_size < 2 || used_subcarriers < 1 || used_subcarriers >= fft_size)
        throw DomainError("linklevel: need 1 <= N_U < N (bins 1..N_U)");
    if (cp_len < 1 || cp_len >= fft_size)
        throw DomainError("linklevel: cyclic prefix must lie in [1, N)");
    if (num_ues < 1 || num_antennas < 1)
        throw DomainError("linklevel: M and K must be positive");
    if (precoder == Precoder::ZF && num_antennas <= num_ues)
        throw DomainError("linklevel: ZF needs M > K");
    if (n_symbols < 1 || psk_order < 2)
        throw DomainError("linklevel: need at least one symbol and PSK order >= 2");
    if (ibo_grid_db.empty())
        throw DomainError("linklevel: empty IBO grid");
}

double analytic_sdr(Precoder p, int num_antennas, int num_ues, double psi, double eta)
{
    const double lambda = pa::lambda_soft(psi);
    const double c = pa::dist_coeff_soft(psi);
    // equal powers p = M/K, D = eta c M, beta = 1
    if (p == Precoder::ZF)
        return (num_antennas - num_ues) * lambda / (num_ues * eta * c);
    return num_antennas * lambda / (num_ues * eta * c + lambda * (num_ues - 1));
}

LinkSimResult simulate_sdr(const LinkSimConfig& cfg)
{
    cfg.validate();
    std::vector<Accum> parts(static_cast<std::size_t>(cfg.n_symbols));
    parallel_for(parts.size(), cfg.workers, [&](std::size_t i) { parts[i] = run_symbol(cfg, static_cast<int>(i)); });

    const auto n_ibo = cfg.ibo_grid_db.size();
    const auto k = static_cast<std::size_t>(cfg.num_ues);
    std::vector<std::vector<cx>> ru(n_ibo, std::vector<cx>(k));
    std::vector<std::vector<double>> rr(n_ibo, std::vector<double>(k));
    std::vector<double> uu(k), clipped(n_ibo);
    LinkSimResult res;
    res.config = cfg;
    double leak = 0.0, wanted = 0.0;
    for (const auto& a : parts) {
        for (std::size_t i = 0; i < n_ibo; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                ru[i][j] += a.ru[i][j];
                rr[i][j] += a.rr[i][j];
            }
            clipped[i] += a.clipped[i];
        }
        for (std::size_t j = 0; j < k; ++j)
            uu[j] += a.uu[j];
        res.mean_antenna_power += a.power / cfg.n_symbols;
        res.redraws += a.redraws;
        leak += a.leak;
        wanted += a.wanted;
    }
    res.unclipped_residual_db = leak > 0.0 ? to_db(leak / wanted) : -std::numeric_limits<double>::infinity();
    res.samples_per_antenna = static_cast<long>(cfg.n_symbols) * (cfg.fft_size + cfg.cp_len);
    const double total_samples = static_cast<double>(res.samples_per_antenna) * cfg.num_antennas;

    for (std::size_t i = 0; i < n_ibo; ++i) {
        const double psi = std::pow(10.0, cfg.ibo_grid_db[i] / 10.0);
        const double lambda = pa::lambda_soft(psi);
        double sdr = 0.0, ratio = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            // alpha = sum r u* / sum |u|^2; distortion = sum |r - alpha u|^2
            const cx alpha = ru[i][j] / uu[j];
            const double want = std::norm(alpha) * uu[j];
            const double dist = std::max(rr[i][j] - want, std::numeric_limits<double>::min());
            sdr += want / dist;
            ratio += std::abs(alpha) / std::sqrt(lambda);
        }
        LinkPoint pt;
        pt.ibo_db = cfg.ibo_grid_db[i];
        pt.sdr_meas_db = to_db(sdr / k);
        pt.sdr_analytic_db = to_db(analytic_sdr(cfg.precoder, cfg.num_antennas, cfg.num_ues, psi, cfg.eta));
        pt.clip_fraction = clipped[i] / total_samples;
        pt.gain_ratio = ratio / k;
        res.points.push_back(pt);
    }
    return res;
}

void write_csv(const LinkSimResult& res, std::ostream& out)
{
    const auto& c = res.config;
    out << "ibo_db,precoder,M,K,sdr_meas_db,sdr_analytic_db,n_symbols,clip_fraction\n";
    out << std::setprecision(17);
    for (const auto& p : res.points)
        out << p.ibo_db << ',' << to_string(c.precoder) << ',' << c.num_antennas << ',' << c.num_ues << ','
            << p.sdr_meas_db << ',' << p.sdr_analytic_db << ',' << c.n_symbols << ',' << p.clip_fraction << '\n';
}

} // namespace mimopa::linklevel
