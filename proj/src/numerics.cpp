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

#include "mimopa/numerics.hpp"

#include "mimopa/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace mimopa::numerics {

void QuadratureSpec::validate() const
{
    if (!(relative_tolerance > 0.0))
        throw DomainError("QuadratureSpec: relative_tolerance must be > 0");
    if (!(absolute_tolerance >= 0.0))
        throw DomainError("QuadratureSpec: absolute_tolerance must be >= 0");
    if (max_subdivisions < 1)
        throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

// ---------------------------------------------------------------------------
// erfc / erfcx
//
// Near-minimax rational approximations from W. J. Cody, "Rational Chebyshev
// approximations for the error function", Math. Comp. 23 (1969) 631-638, with
// the coefficient tables of the netlib SPECFUN routine CALERF (revision of
// March 19, 1990). Three regions: |x| <= 0.46875 (erf), 0.46875 < |x| <= 4 and
// |x| > 4 (erfc / erfcx). The exp(-x^2) factor is split as
// exp(-ysq^2) * exp(-del) with ysq = trunc(16 y) / 16 to keep full relative
// accuracy in the far tail.
// ---------------------------------------------------------------------------
namespace {

constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kThresh = 0.46875;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;
constexpr double kXHuge = 6.71e7;
constexpr double kXMax = 2.53e307;

// exp(-y^2) evaluated without losing the low bits of y^2.
double exp_neg_square(double y)
{
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

enum class ErfKind { Erfc, Erfcx };

// Valid for y = |x| >= 0; the caller handles the sign.
double calerf_nonneg(double y, ErfKind kind)
{
    if (y <= kThresh) {
        const double ysq = y > kXSmall ? y * y : 0.0;
        double xnum = kA[4] * ysq;
        double xden = ysq;
        for (int i = 0; i < 3; ++i) {
            xnum = (xnum + kA[i]) * ysq;
            xden = (xden + kB[i]) * ysq;
        }
        const double erf_y = y * (xnum + kA[3]) / (xden + kB[3]);
        const double result = 1.0 - erf_y;
        return kind == ErfKind::Erfcx ? std::exp(ysq) * result : result;
    }

    if (y <= 4.0) {
        double xnum = kC[8] * y;
        double xden = y;
        for (int i = 0; i < 7; ++i) {
            xnum = (xnum + kC[i]) * y;
            xden = (xden + kD[i]) * y;
        }
        const double scaled = (xnum + kC[7]) / (xden + kD[7]);
        return kind == ErfKind::Erfcx ? scaled : exp_neg_square(y) * scaled;
    }

    if (y >= kXBig) {
        if (kind == ErfKind::Erfc || y >= kXMax)
            return 0.0;
        if (y >= kXHuge)
            return kInvSqrtPi / y;
    }
    const double ysq = 1.0 / (y * y);
    double xnum = kP[5] * ysq;
    double xden = ysq;
    for (int i = 0; i < 4; ++i) {
        xnum = (xnum + kP[i]) * ysq;
        xden = (xden + kQ[i]) * ysq;
    }
    double scaled = ysq * (xnum + kP[4]) / (xden + kQ[4]);
    scaled = (kInvSqrtPi - scaled) / y;
    return kind == ErfKind::Erfcx ? scaled : exp_neg_square(y) * scaled;
}

} // namespace

double erfc(double x)
{
    if (std::isnan(x))
        return x;
    const double r = calerf_nonneg(std::fabs(x), ErfKind::Erfc);
    return x < 0.0 ? 2.0 - r : r;
}

double erfcx(double x)
{
    if (!(x >= 0.0))
        throw DomainError("erfcx: argument must be >= 0");
    if (std::isinf(x))
        return 0.0;
    return calerf_nonneg(x, ErfKind::Erfcx);
}

// ---------------------------------------------------------------------------
// Lambert W, principal branch
// ---------------------------------------------------------------------------

double lambert_w0(double x)
{
    constexpr double inv_e = 0.36787944117144232160;
    if (std::isnan(x))
        throw DomainError("lambert_w0: NaN argument");
    if (x < -inv_e) {
        // Allow the rounding of -1/e itself.
        if (x >= -inv_e * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
            return -1.0;
        throw DomainError("lambert_w0: argument below -1/e");
    }
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return x;

    double w;
    if (x < -0.25) {
        // Series about the branch point.
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
        if (x > 0.0)
            w *= 0.85;
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0)
            break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0 || !std::isfinite(denom))
            break;
        const double next = w - f / denom;
        const bool done = std::fabs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(next));
        w = next;
        if (done)
            break;
    }
    if (w < -1.0)
        w = -1.0;

    const double residual = std::fabs(w * std::exp(w) - x);
    if (!(residual <= 1e-10 * std::max(1.0, std::fabs(x)))) {
        std::ostringstream os;
        os << "lambert_w0: Halley iteration did not converge for x = " << x << " (w = " << w
           << ", residual = " << residual << ")";
        throw NumericalFailure(os.str());
    }
    return w;
}

double lambert_w0_of_log(double log_x)
{
    if (std::isnan(log_x))
        throw DomainError("lambert_w0_of_log: NaN argument");
    if (log_x == std::numeric_limits<double>::infinity())
        return log_x;
    if (log_x < 1.0)
        return lambert_w0(std::exp(log_x));

    // w + ln w = L is concave and increasing in w; starting at L - ln L (which
    // never exceeds the root) Newton steps approach the root monotonically.
    double w = log_x - std::log(log_x);
    for (int it = 0; it < 50; ++it) {
        const double g = w + std::log(w) - log_x;
        const double next = w - g / (1.0 + 1.0 / w);
        const bool done = std::fabs(next - w) <= 2.0 * std::numeric_limits<double>::epsilon() * next;
        w = next;
        if (done)
            break;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------
namespace {

// 15-point Kronrod abscissae/weights and the embedded 7-point Gauss weights
// (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec)
{
    spec.validate();
    if (a == b)
        return 0.0;

    constexpr int initial_panels = 16;
    std::priority_queue<Panel> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (int i = 0; i < initial_panels; ++i) {
        const double lo = a + (b - a) * i / initial_panels;
        const double hi = i + 1 == initial_panels ? b : a + (b - a) * (i + 1) / initial_panels;
        Panel p = gauss_kronrod_15(f, lo, hi);
        total += p.value;
        total_error += p.error;
        heap.push(p);
    }

    int subdivisions = 0;
    const auto target = [&] { return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::fabs(total)); };
    while (total_error > target()) {
        if (subdivisions >= spec.max_subdivisions) {
            std::ostringstream os;
            os << "integrate_adaptive: " << subdivisions << " subdivisions on [" << a << ", " << b
               << "] left error estimate " << total_error << " above target " << target();
            throw NumericalFailure(os.str());
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gauss_kronrod_15(f, worst.a, mid);
        const Panel right = gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum to shed the drift of the running updates.
    double sum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        heap.pop();
    }
    return sum;
}

double integrate_semi_infinite(const std::function<double(double)>& f, const QuadratureSpec& spec)
{
    spec.validate();
    // Beyond this point exp(-t^2) (and any polynomial factor of modest degree
    // times it) sits well below the absolute tolerance.
    const double tol = std::max(spec.absolute_tolerance, 1e-300);
    const double cutoff = std::sqrt(-std::log(tol / 10.0)) + 2.0;
    return integrate_adaptive(f, 0.0, cutoff, spec);
}

} // namespace mimopa::numerics
