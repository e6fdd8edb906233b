#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "strz/grid.hpp"
#include "strz/rng.hpp"
#include "strz/spectral.hpp"

namespace strz {

//----------------------------------------------------------------------------
// Spectral decay toolkit.  The bounded exponent
//
//   F_{mu,eps}(xi) = mu |xi|^2 / (1 + eps |xi|^2)
//
// interpolates between the Gaussian weight mu |xi|^2 (eps = 0) and a flat
// ceiling mu / eps.  e^{F} applied to a spectrum stays in L2 for every
// eps > 0, which is what makes the weighted tail norm H(eps) finite before
// any decay has been established; the eps -> 0 limit then upgrades to the
// honest Gaussian weight.
//
// Spectral L2 norms in this file are reported in physical calibration,
// i.e. divided by 2 pi, so a unit-norm field carries total spectral mass 1
// and bounds phrased against |f|_2 = 1 apply verbatim.
//----------------------------------------------------------------------------

struct WeightParams {
    double mu = 0.0;
    double eps = 0.0;
};

inline double weight_f(double xi1, double xi2, const WeightParams& p) {
    const double r2 = xi1 * xi1 + xi2 * xi2;
    return p.mu * r2 / (1.0 + p.eps * r2);
}

//----------------------------------------------------------------------------
// three-band frequency split at s: |xi| < s, s <= |xi| <= s^2, |xi| > s^2
//----------------------------------------------------------------------------

struct FrequencySplit {
    double s = 0.0;
    ComplexField2D h_low;   // |xi| < s
    ComplexField2D h_mid;   // s <= |xi| <= s^2
    ComplexField2D h_high;  // |xi| > s^2
};

inline FrequencySplit frequency_split(const ComplexField2D& h, double s) {
    if (h.space != Space::Frequency)
        throw std::invalid_argument("frequency_split: field must be a spectrum");
    if (!(s > 1.0)) throw std::invalid_argument("frequency_split: s must exceed 1");
    const Grid2D& g = h.grid;
    FrequencySplit out{s, ComplexField2D(g, Space::Frequency),
                       ComplexField2D(g, Space::Frequency),
                       ComplexField2D(g, Space::Frequency)};
    const double s2 = s * s;
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r < s)
                out.h_low.at(i, j) = h.at(i, j);
            else if (r <= s2)
                out.h_mid.at(i, j) = h.at(i, j);
            else
                out.h_high.at(i, j) = h.at(i, j);
        }
    return out;
}

//----------------------------------------------------------------------------
// H(eps): weighted norm of the far tail |xi| > s^2.  Monotone non-increasing
// in eps (the denominator grows), and as eps -> 0 it rises to the Gaussian-
// weighted tail norm; finiteness of that limit is exactly e^{mu|xi|^2} fhat
// remaining square integrable.
//----------------------------------------------------------------------------
inline double weighted_tail_norm(const ComplexField2D& fhat, double s,
                                 const WeightParams& p) {
    if (fhat.space != Space::Frequency)
        throw std::invalid_argument("weighted_tail_norm: field must be a spectrum");
    if (!(s > 1.0)) throw std::invalid_argument("weighted_tail_norm: s must exceed 1");
    const Grid2D& g = fhat.grid;
    const double s2 = s * s;
    double acc = 0.0;
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double x1 = g.xi(i), x2 = g.xi(j);
            if (std::hypot(x1, x2) <= s2) continue;
            const double w = std::exp(weight_f(x1, x2, p));
            acc += w * w * std::norm(fhat.at(i, j));
        }
    return std::sqrt(acc) * g.dxi() / (2.0 * M_PI);
}

//----------------------------------------------------------------------------
// Gaussian-decay fit: least squares of log|fhat| against -mu |xi|^2 + const
// over an annulus.  The default annulus [2, 0.8 xi_max] excludes the lowest
// shells, where the profile core dominates, and the aliasing band near the
// Nyquist edge; samples below the magnitude floor 1e-13 carry no usable
// log information for a quartic pipeline and are dropped.
//----------------------------------------------------------------------------

struct DecayFit {
    double mu_fit = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double xi_min = 0.0;
    double xi_max = 0.0;
    int n_samples = 0;
};

inline DecayFit fit_gaussian_decay(const ComplexField2D& fhat, double xi_min,
                                   double xi_max) {
    if (fhat.space != Space::Frequency)
        throw std::invalid_argument("fit_gaussian_decay: field must be a spectrum");
    if (!(xi_min >= 0.0 && xi_max > xi_min))
        throw std::invalid_argument("fit_gaussian_decay: bad annulus");
    const Grid2D& g = fhat.grid;
    std::vector<double> u, v;  // (|xi|^2, log|fhat|)
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r < xi_min || r > xi_max) continue;
            const double a = std::abs(fhat.at(i, j));
            if (a <= 1e-13) continue;
            u.push_back(r * r);
            v.push_back(std::log(a));
        }
    if (u.size() < 30)
        throw std::runtime_error(
            "fit_gaussian_decay: fewer than 30 annulus samples above the 1e-13 floor");

    const double n = static_cast<double>(u.size());
    double su = 0.0, sv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) su += u[k], sv += v[k];
    const double mu_u = su / n, mu_v = sv / n;
    double suu = 0.0, suv = 0.0, svv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double du = u[k] - mu_u, dv = v[k] - mu_v;
        suu += du * du;
        suv += du * dv;
        svv += dv * dv;
    }
    DecayFit fit;
    fit.xi_min = xi_min;
    fit.xi_max = xi_max;
    fit.n_samples = static_cast<int>(u.size());
    const double slope = suv / suu;
    fit.mu_fit = -slope;
    fit.intercept = mu_v - slope * mu_u;
    if (svv > 0.0) {
        double ss_res = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double e = v[k] - (fit.intercept + slope * u[k]);
            ss_res += e * e;
        }
        fit.r_squared = std::max(0.0, 1.0 - ss_res / svv);
    } else {
        fit.r_squared = 1.0;  // constant data is fit exactly by slope 0
    }
    return fit;
}

inline DecayFit fit_gaussian_decay(const ComplexField2D& fhat) {
    return fit_gaussian_decay(fhat, 2.0, 0.8 * fhat.grid.xi_max());
}

//----------------------------------------------------------------------------
// The cubic comparison function
//
//   G(x) = (omega/2) x - C x^2 - C x^3,   x >= 0,
//
// rises from G(0) = 0 to its single interior maximum M and then falls to
// -infinity, so the level M/2 is crossed exactly twice.  The critical point
// solves the quadratic G' = 0:
//
//   x_crit = (-1 + sqrt(1 + 1.5 omega / C)) / 3.
//----------------------------------------------------------------------------

struct GAnalysis {
    double omega = 0.0;
    double C = 0.0;
    double M = 0.0;
    double x_crit = 0.0;
    double x0 = 0.0;  // left crossing of G = M/2
    double x1 = 0.0;  // right crossing
};

namespace detail {

inline double g_cubic(double x, double omega, double C) {
    return 0.5 * omega * x - C * x * x - C * x * x * x;
}

// root of g_cubic = level inside [lo, hi]; the bracket must straddle it
inline double g_bisect(double lo, double hi, double level, double omega, double C) {
    double flo = g_cubic(lo, omega, C) - level;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g_cubic(mid, omega, C) - level;
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline GAnalysis g_function_analysis(double omega, double C) {
    if (!(omega > 0.0) || !(C > 0.0))
        throw std::invalid_argument("g_function_analysis: omega and C must be positive");
    GAnalysis r;
    r.omega = omega;
    r.C = C;
    r.x_crit = (-1.0 + std::sqrt(1.0 + 1.5 * omega / C)) / 3.0;
    r.M = detail::g_cubic(r.x_crit, omega, C);
    const double half = 0.5 * r.M;
    r.x0 = detail::g_bisect(0.0, r.x_crit, half, omega, C);
    double hi = 2.0 * r.x_crit;
    while (detail::g_cubic(hi, omega, C) > half) hi *= 2.0;
    r.x1 = detail::g_bisect(r.x_crit, hi, half, omega, C);
    return r;
}

//----------------------------------------------------------------------------
// Norm bounds for the weighted split h = e^{mu |xi|^2} fhat of a unit-norm
// field: on |xi| < s the exponent is at most mu s^2, on |xi| <= s^2 at most
// mu s^4, so
//
//   |h restricted below s |_2  <= e^{mu s^2},
//   |h restricted below s^2|_2 <= e^{mu s^4},
//   |h on the middle band  |_2 <= e^{mu s^4} |f on the middle band|_2.
//
// These are definitional; the value of the report is the recorded slack,
// which quantifies how far from saturation a concrete spectrum sits.
//----------------------------------------------------------------------------

struct SplitBoundsReport {
    double s = 0.0;
    double mu = 0.0;
    double low_norm = 0.0, low_bound = 0.0;      // |xi| < s
    double below_norm = 0.0, below_bound = 0.0;  // |xi| <= s^2
    double mid_norm = 0.0, mid_bound = 0.0;      // s <= |xi| <= s^2
    bool all_hold = false;
};

inline SplitBoundsReport split_norm_bounds(const ComplexField2D& f, double s,
                                           double mu) {
    if (f.space != Space::Physical)
        throw std::invalid_argument("split_norm_bounds: field must be physical");
    if (std::abs(l2_norm(f) - 1.0) > 1e-10)
        throw std::invalid_argument("split_norm_bounds: field must have unit norm");
    if (!(s > 1.0) || !(mu >= 0.0))
        throw std::invalid_argument("split_norm_bounds: need s > 1 and mu >= 0");

    const ComplexField2D fhat = forward_transform(f);
    const Grid2D& g = fhat.grid;
    const double s2 = s * s;
    double low = 0.0, mid = 0.0, mid_raw = 0.0;
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r > s2) continue;
            const double w = std::exp(mu * r * r);
            const double m = std::norm(fhat.at(i, j));
            if (r < s) {
                low += w * w * m;
            } else {
                mid += w * w * m;
                mid_raw += m;
            }
        }
    const double cal = g.dxi() / (2.0 * M_PI);
    SplitBoundsReport rep;
    rep.s = s;
    rep.mu = mu;
    rep.low_norm = std::sqrt(low) * cal;
    rep.mid_norm = std::sqrt(mid) * cal;
    rep.below_norm = std::sqrt(low + mid) * cal;
    rep.low_bound = std::exp(mu * s2);
    rep.below_bound = std::exp(mu * s2 * s2);
    rep.mid_bound = std::exp(mu * s2 * s2) * std::sqrt(mid_raw) * cal;
    rep.all_hold = rep.low_norm <= rep.low_bound &&
                   rep.below_norm <= rep.below_bound && rep.mid_norm <= rep.mid_bound;
    return rep;
}

//----------------------------------------------------------------------------
// Pointwise weight bound on the interaction set.  Quadruples share the
// constraint pair sum(eta) and sum(|eta|^2), so they live on the same circle
// family as the reduced quadrilinear integral: draw eta1, eta2, put
// c = (eta1 + eta2)/2, r0 = |eta1 - eta2|/2, and pick eta3, eta4 antipodal
// on the circle of radius r0 about c.  Concavity of t -> mu t / (1 + eps t)
// forces e^{F(eta1) - F(eta2) - F(eta3) - F(eta4)} <= 1 there.
//----------------------------------------------------------------------------

struct WeightCheckResult {
    double max_weight = 0.0;
};

inline WeightCheckResult constraint_weight_check(const WeightParams& p,
                                                 int n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("constraint_weight_check: need at least one sample");
    Rng rng(seed, 23);
    const double scale = 3.0;
    WeightCheckResult out;
    for (int k = 0; k < n_samples; ++k) {
        const double a1 = scale * rng.normal(), a2 = scale * rng.normal();
        const double b1 = scale * rng.normal(), b2 = scale * rng.normal();
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const double c1 = 0.5 * (a1 + b1), c2 = 0.5 * (a2 + b2);
        const double r0 = 0.5 * std::hypot(a1 - b1, a2 - b2);
        const double e1 = r0 * std::cos(theta), e2 = r0 * std::sin(theta);
        const double w = std::exp(weight_f(a1, a2, p) - weight_f(b1, b2, p) -
                                  weight_f(c1 + e1, c2 + e2, p) -
                                  weight_f(c1 - e1, c2 - e2, p));
        out.max_weight = std::max(out.max_weight, w);
    }
    return out;
}

}  // namespace strz
