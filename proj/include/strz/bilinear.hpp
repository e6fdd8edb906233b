#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "strz/decay.hpp"
#include "strz/detail/circle.hpp"
#include "strz/detail/evolution.hpp"
#include "strz/grid.hpp"
#include "strz/quadrature.hpp"
#include "strz/rng.hpp"
#include "strz/spectral.hpp"

namespace strz {

//----------------------------------------------------------------------------
// Frequency-separated interaction lab.  The object of study is the bilinear
// space-time norm |u1 u2|_{L^2_{t,x}} for pairs whose spectra sit in a low
// ball |xi| <= s and a far ring |xi| >= N s: transversality of the group
// velocities should suppress the product like N^{-1/2}.
//
// The norm is evaluated by the same per-node engine as the quadrilinear
// form (|u1 u2|^2 integrates conj(u1 u2) u1 u2, so it is a Q diagonal), with
// the same route rules: every node runs on the torus or in the chirp frame
// only when the frame demonstrably holds the data, and is skipped otherwise.
// A pair whose physical realization fills the box is therefore integrated
// essentially at t = 0 alone; sweep rows record the evaluated-node fraction
// so such configurations are visible in the output rather than silently
// quantified in a frame that cannot hold them.
//----------------------------------------------------------------------------

struct SeparatedPair {
    ComplexField2D h_low;   // spectrum supported in |xi| <= s
    ComplexField2D h_high;  // spectrum supported in the ring starting at N s
    double s = 0.0;
    double N = 0.0;
};

//----------------------------------------------------------------------------
// flat-spectrum pair: unit-magnitude random phase on every lattice cell of
// the band, the hardest stress for a uniform estimate.  The high band is the
// ring [N s, N s + 2 s] (capped at 0.9 xi_max) so its measure tracks the low
// ball instead of swallowing the whole Nyquist disc.
//----------------------------------------------------------------------------
inline SeparatedPair separated_pair(const Grid2D& g, double s, double N,
                                    std::uint64_t seed) {
    if (!(s > 0.0) || !(N > 1.0))
        throw std::invalid_argument("separated_pair: need s > 0 and N > 1");
    if (!(N * s < 0.8 * g.xi_max()))
        throw std::invalid_argument(
            "separated_pair: N s reaches past 0.8 xi_max, not representable");

    SeparatedPair pair{ComplexField2D(g, Space::Frequency),
                       ComplexField2D(g, Space::Frequency), s, N};
    Rng rng(seed, 31);
    const double top = std::min(N * s + 2.0 * s, 0.9 * g.xi_max());
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r <= s)
                pair.h_low.at(i, j) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
            else if (r >= N * s && r <= top)
                pair.h_high.at(i, j) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
        }
    for (ComplexField2D* h : {&pair.h_low, &pair.h_high}) {
        const double nn = l2_norm(*h);
        if (nn == 0.0)
            throw std::runtime_error("separated_pair: a band holds no lattice cells");
        for (cd& z : h->data) z /= nn;
    }
    return pair;
}

//----------------------------------------------------------------------------
// coherent pair: Gaussian packets of spectral width s/6, the low one at the
// origin and the high one at radius (N + 1) s in a seeded random direction,
// cut to the same bands as the flat pair.  Unlike flat spectra these have
// concentrated physical envelopes, so far-time nodes are evaluable and the
// separation physics is actually visible; the price is that the spectra are
// peaked rather than flat.  The centre separation is (N + 1) s, which is the
// abscissa the packet sweep fits against.
//----------------------------------------------------------------------------
inline SeparatedPair packet_pair(const Grid2D& g, double s, double N,
                                 std::uint64_t seed) {
    if (!(s > 0.0) || !(N > 1.0))
        throw std::invalid_argument("packet_pair: need s > 0 and N > 1");
    if (!(N * s < 0.8 * g.xi_max()))
        throw std::invalid_argument(
            "packet_pair: N s reaches past 0.8 xi_max, not representable");

    SeparatedPair pair{ComplexField2D(g, Space::Frequency),
                       ComplexField2D(g, Space::Frequency), s, N};
    Rng rng(seed, 37);
    const double sigma = s / 6.0;
    const double alpha = rng.uniform(0.0, 2.0 * M_PI);
    const double rho = (N + 1.0) * s;
    const double c1 = rho * std::cos(alpha), c2 = rho * std::sin(alpha);
    const double top = std::min(N * s + 2.0 * s, 0.9 * g.xi_max());
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double x1 = g.xi(i), x2 = g.xi(j);
            const double r = std::hypot(x1, x2);
            if (r <= s)
                pair.h_low.at(i, j) = std::exp(-r * r / (2.0 * sigma * sigma));
            else if (r >= N * s && r <= top) {
                const double d2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
                pair.h_high.at(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
            }
        }
    for (ComplexField2D* h : {&pair.h_low, &pair.h_high}) {
        const double nn = l2_norm(*h);
        if (nn == 0.0)
            throw std::runtime_error("packet_pair: a band holds no lattice cells");
        for (cd& z : h->data) z /= nn;
    }
    return pair;
}

//----------------------------------------------------------------------------
// |u1 u2|_{L^2_{t,x}} for spectra h1, h2
//----------------------------------------------------------------------------
inline double bilinear_norm(const ComplexField2D& h1, const ComplexField2D& h2,
                            const TimeQuadrature& tq,
                            const detail::EngineParams& ep = {}) {
    h1.require_space(Space::Frequency, "bilinear_norm");
    h2.require_space(Space::Frequency, "bilinear_norm");
    if (h1.grid != h2.grid) throw std::invalid_argument("bilinear_norm: grid mismatch");
    tq.validate();
    if (l2_norm(h1) == 0.0 || l2_norm(h2) == 0.0) return 0.0;
    detail::PreparedField p1 = detail::prepare_field(inverse_transform(h1), ep);
    detail::PreparedField p2 = detail::prepare_field(inverse_transform(h2), ep);
    return std::sqrt(std::max(0.0, detail::spacetime_bilinear_sq(p1, p2, tq, ep)));
}

//----------------------------------------------------------------------------
// decay sweeps.  ratio is |u1 u2| itself (the pairs are unit norm), the max
// over seeds per row since the target is a uniform bound; node_coverage is
// the min over seeds of the evaluated-node fraction.  The fitted slope of
// log ratio against log separation is judged against the window below: the
// estimate is one-sided, so faster decay is consistent and slower is not.
//----------------------------------------------------------------------------

inline constexpr double slope_window_lo = -0.75;
inline constexpr double slope_window_hi = -0.45;

struct SweepRow {
    double N = 0.0;         // separation abscissa for the fit
    double ratio = 0.0;     // max over seeds
    double coverage = 0.0;  // min over seeds, evaluated nodes / total nodes
};

struct SweepResult {
    double s = 0.0;
    std::vector<SweepRow> rows;
    double slope = 0.0;
    double intercept = 0.0;
    bool slope_in_window = false;
};

namespace detail {

template <typename PairGen>
inline SweepResult run_decay_sweep(const Grid2D& g, double s,
                                   const std::vector<double>& N_list,
                                   const std::vector<std::uint64_t>& seeds,
                                   const TimeQuadrature& tq, const EngineParams& ep,
                                   PairGen&& make_pair, double abscissa_shift) {
    SweepResult out;
    out.s = s;
    for (double N : N_list) {
        SweepRow row;
        row.N = N + abscissa_shift;
        row.coverage = 1.0;
        for (std::uint64_t seed : seeds) {
            SeparatedPair pair = make_pair(g, s, N, seed);
            PreparedField p1 = prepare_field(inverse_transform(pair.h_low), ep);
            PreparedField p2 = prepare_field(inverse_transform(pair.h_high), ep);
            int used = 0;
            const double v =
                std::sqrt(std::max(0.0, spacetime_bilinear_sq(p1, p2, tq, ep, &used)));
            row.ratio = std::max(row.ratio, v);
            row.coverage =
                std::min(row.coverage, static_cast<double>(used) / tq.size());
        }
        if (!(row.ratio > 0.0) || !std::isfinite(row.ratio))
            throw std::runtime_error("decay_sweep: a ratio vanished or diverged");
        out.rows.push_back(row);
    }

    const double n = static_cast<double>(out.rows.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const SweepRow& r : out.rows) {
        const double x = std::log(r.N), y = std::log(r.ratio);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / n;
    out.slope_in_window = out.slope >= slope_window_lo && out.slope <= slope_window_hi;
    return out;
}

}  // namespace detail

inline SweepResult decay_sweep(const Grid2D& g, double s,
                               const std::vector<double>& N_list,
                               const std::vector<std::uint64_t>& seeds,
                               const TimeQuadrature& tq,
                               const detail::EngineParams& ep = {}) {
    if (N_list.size() < 4)
        throw std::invalid_argument("decay_sweep: need at least 4 values of N");
    for (std::size_t k = 1; k < N_list.size(); ++k)
        if (!(N_list[k] > N_list[k - 1]))
            throw std::invalid_argument(
                "decay_sweep: N values must be strictly increasing");
    if (seeds.size() < 3)
        throw std::invalid_argument("decay_sweep: need at least 3 seeds per N");
    return detail::run_decay_sweep(
        g, s, N_list, seeds, tq, ep,
        [](const Grid2D& gg, double ss, double NN, std::uint64_t seed) {
            return separated_pair(gg, ss, NN, seed);
        },
        0.0);
}

// packet variant: rows fit against the centre separation (N + 1) in units
// of s, since that is the scale the packets are actually apart
inline SweepResult packet_decay_sweep(const Grid2D& g, double s,
                                      const std::vector<double>& N_list,
                                      const std::vector<std::uint64_t>& seeds,
                                      const TimeQuadrature& tq,
                                      const detail::EngineParams& ep = {}) {
    if (N_list.size() < 2)
        throw std::invalid_argument("packet_decay_sweep: need at least 2 values of N");
    for (std::size_t k = 1; k < N_list.size(); ++k)
        if (!(N_list[k] > N_list[k - 1]))
            throw std::invalid_argument(
                "packet_decay_sweep: N values must be strictly increasing");
    if (seeds.empty())
        throw std::invalid_argument("packet_decay_sweep: need at least one seed");
    return detail::run_decay_sweep(
        g, s, N_list, seeds, tq, ep,
        [](const Grid2D& gg, double ss, double NN, std::uint64_t seed) {
            return packet_pair(gg, ss, NN, seed);
        },
        1.0);
}

//----------------------------------------------------------------------------
// Weighted multilinear integral over the constraint set,
//
//   M = integral |h1(eta1)| |h2(eta2)| |h3(eta3)| |h4(eta4)|
//       e^{F(eta1) - F(eta2) - F(eta3) - F(eta4)} ddelta ddelta,
//
// by the same circle reduction as the quadrilinear form, with off-lattice
// factors trig-interpolated and taken in absolute value.  The weighted and
// unweighted integrals share every quadrature node, so the pointwise bound
// weight <= 1 on the constraint set makes weighted <= unweighted exact at
// quadrature level, not merely up to discretization.
//----------------------------------------------------------------------------

struct MfEstimate {
    double weighted = 0.0;
    double unweighted = 0.0;
};

namespace detail {

struct AbsCirclePair {
    double weighted = 0.0;
    double unweighted = 0.0;
};

inline AbsCirclePair abs_circle_integral(const TrigInterpolator& t3,
                                         const TrigInterpolator& t4, double sigma1,
                                         double sigma2, double r0,
                                         const WeightParams& p) {
    const double c1 = 0.5 * sigma1, c2 = 0.5 * sigma2;
    if (r0 == 0.0) {
        const double m = std::abs(t3(c1, c2)) * std::abs(t4(c1, c2));
        const double u = 0.5 * M_PI * m;
        return {u * std::exp(-2.0 * weight_f(c1, c2, p)), u};
    }
    const int M = circle_node_count(r0, t3.grid().half_width);
    AbsCirclePair acc;
    for (int m = 0; m < M; ++m) {
        const double th = 2.0 * M_PI * m / M;
        const double e1 = r0 * std::cos(th), e2 = r0 * std::sin(th);
        const double mag =
            std::abs(t3(c1 + e1, c2 + e2)) * std::abs(t4(c1 - e1, c2 - e2));
        acc.unweighted += mag;
        acc.weighted += mag * std::exp(-weight_f(c1 + e1, c2 + e2, p) -
                                       weight_f(c1 - e1, c2 - e2, p));
    }
    const double scale = 0.25 * 2.0 * M_PI / M;
    acc.weighted *= scale;
    acc.unweighted *= scale;
    return acc;
}

}  // namespace detail

inline MfEstimate mf_estimate(const ComplexField2D& h1, const ComplexField2D& h2,
                              const ComplexField2D& h3, const ComplexField2D& h4,
                              const WeightParams& p) {
    for (const ComplexField2D* h : {&h1, &h2, &h3, &h4})
        h->require_space(Space::Frequency, "mf_estimate");
    if (h1.grid != h2.grid || h1.grid != h3.grid || h1.grid != h4.grid)
        throw std::invalid_argument("mf_estimate: grid mismatch");
    const Grid2D& g = h1.grid;
    if (g.n_points > 32)
        throw std::invalid_argument("mf_estimate: n > 32 (cost guard)");

    const detail::TrigInterpolator t3(h3), t4(h4);
    const int n = g.n_points;
    const double dxi = g.dxi();

    std::map<std::tuple<int, int, long long>, detail::AbsCirclePair> memo;
    MfEstimate acc;
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            const double w1 = std::abs(h1.at(a1, a2));
            if (w1 == 0.0) continue;
            const double fa = weight_f(g.xi(a1), g.xi(a2), p);
            for (int b1 = 0; b1 < n; ++b1)
                for (int b2 = 0; b2 < n; ++b2) {
                    const double w2 = std::abs(h2.at(b1, b2));
                    if (w2 == 0.0) continue;
                    const int s1 = a1 + b1 - n, s2 = a2 + b2 - n;
                    const long long d1 = a1 - b1, d2 = a2 - b2;
                    const long long dsq = d1 * d1 + d2 * d2;
                    const auto key = std::make_tuple(s1, s2, dsq);
                    auto it = memo.find(key);
                    if (it == memo.end()) {
                        const double r0 =
                            0.5 * dxi * std::sqrt(static_cast<double>(dsq));
                        it = memo
                                 .emplace(key, detail::abs_circle_integral(
                                                   t3, t4, s1 * dxi, s2 * dxi, r0, p))
                                 .first;
                    }
                    const double outer =
                        std::exp(fa - weight_f(g.xi(b1), g.xi(b2), p));
                    acc.weighted += w1 * w2 * outer * it->second.weighted;
                    acc.unweighted += w1 * w2 * it->second.unweighted;
                }
        }
    const double cell4 = dxi * dxi * dxi * dxi;
    acc.weighted *= cell4;
    acc.unweighted *= cell4;
    return acc;
}

}  // namespace strz
