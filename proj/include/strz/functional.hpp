#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "strz/detail/circle.hpp"
#include "strz/detail/evolution.hpp"
#include "strz/grid.hpp"
#include "strz/quadrature.hpp"
#include "strz/spectral.hpp"

namespace strz {

//----------------------------------------------------------------------------
// The quadrilinear form
//
//   Q(f1,f2,f3,f4) = integral conj(f1h(xi1) f2h(xi2)) f3h(xi3) f4h(xi4)
//                    delta^2(xi1+xi2-xi3-xi4)
//                    delta(|xi1|^2+|xi2|^2-|xi3|^2-|xi4|^2) dxi1..dxi4
//
// and its space-time realization.  The constant linking the two follows from
// the delta convention delta(xi) = (2pi)^{-d} integral e^{i xi.x} dx:
// expanding each u_j = P_t f_j through the inverse transform contributes
// (2pi)^{-2} four times, the x-integral produces (2pi)^2 delta^2 in momentum,
// and the t-integral produces (2pi) delta in energy, so
//
//   Q = (2pi)^{-8} (2pi)^2 (2pi) ... = (2pi)^5 integral integral
//       conj(u1 u2) u3 u4 dx dt.
//
// Cross-check on f = e^{-|x|^2}: the space-time integral is pi^2/16 and the
// circle-reduced frequency integral evaluates to 2 pi^7 = (2pi)^5 pi^2/16.
//----------------------------------------------------------------------------
inline constexpr double q_constant() {
    return 32.0 * M_PI * M_PI * M_PI * M_PI * M_PI;  // (2 pi)^5
}

enum class QRoute { TimeDomain, CircleReduction, GaussianClosedForm };

struct QuadForm {
    cd value{0.0, 0.0};
    QRoute route = QRoute::TimeDomain;
    Grid2D grid;
    std::size_t n_time_nodes = 0;  // zero for the circle route
};

struct RatioReport {
    double phi = 0.0;
    double sharp_constant_estimate = 0.0;  // phi^{1/4}, estimates R
};

//----------------------------------------------------------------------------
// space-time norms and the ratio
//----------------------------------------------------------------------------

inline double l4_spacetime_norm(const ComplexField2D& f, const TimeQuadrature& tq,
                                const detail::EngineParams& ep = {}) {
    f.require_space(Space::Physical, "l4_spacetime_norm");
    tq.validate();
    detail::PreparedField pf = detail::prepare_field(f, ep);
    return std::pow(detail::spacetime_l4_fourth(pf, tq, ep), 0.25);
}

inline RatioReport strichartz_ratio(const ComplexField2D& f, const TimeQuadrature& tq,
                                    const detail::EngineParams& ep = {}) {
    f.require_space(Space::Physical, "strichartz_ratio");
    tq.validate();
    const double nrm = l2_norm(f);
    if (nrm == 0.0) throw std::invalid_argument("strichartz_ratio: zero field");
    detail::PreparedField pf = detail::prepare_field(f, ep);
    const double l4_fourth = detail::spacetime_l4_fourth(pf, tq, ep);
    RatioReport r;
    r.phi = l4_fourth / (nrm * nrm * nrm * nrm);
    r.sharp_constant_estimate = std::pow(r.phi, 0.25);
    return r;
}

// Phi for f = e^{-a|x|^2}, any a > 0.  The evolved field stays Gaussian:
//   u(t,x) = e^{-a|x|^2/(1-4iat)} / (1-4iat),
// so |u|^4 integrates over x to pi/(4a) * (1+16a^2t^2)^{-1} and over t to
// pi^2/(16 a^2).  With |f|_2^4 = pi^2/(4a^2) the ratio is exactly 1/4,
// independent of a (parabolic rescaling).
inline double gaussian_ratio_closed_form(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("gaussian_ratio_closed_form: a must be positive");
    return 0.25;
}

//----------------------------------------------------------------------------
// Q, time-domain route.  The first two slots are conjugated; the evaluation
// route per node is keyed on the cubic slots 2..4 so that pairings of a test
// function in slot 1 against a cubic term stay exactly adjoint.
//----------------------------------------------------------------------------
inline QuadForm quadrilinear_time_domain(const ComplexField2D& f1, const ComplexField2D& f2,
                                         const ComplexField2D& f3, const ComplexField2D& f4,
                                         const TimeQuadrature& tq,
                                         const detail::EngineParams& ep = {}) {
    if (f1.grid != f2.grid || f1.grid != f3.grid || f1.grid != f4.grid)
        throw std::invalid_argument("quadrilinear_time_domain: grid mismatch");
    tq.validate();
    detail::PreparedField p1 = detail::prepare_field(f1, ep);
    detail::PreparedField p2 = detail::prepare_field(f2, ep);
    detail::PreparedField p3 = detail::prepare_field(f3, ep);
    detail::PreparedField p4 = detail::prepare_field(f4, ep);
    QuadForm q;
    q.route = QRoute::TimeDomain;
    q.grid = f1.grid;
    q.n_time_nodes = tq.size();
    q.value = q_constant() * detail::spacetime_quadrilinear(p1, p2, p3, p4, tq, ep);
    return q;
}

//----------------------------------------------------------------------------
// Q, circle-reduction route: the independent oracle.  Both deltas are
// resolved analytically (see detail/circle.hpp for the measure) leaving
//
//   Q = sum_{xi1, xi2} dxi^4 conj(f1h(xi1) f2h(xi2))
//       * (1/4) integral_0^{2pi} f3h(sigma/2 + r0 e) f4h(sigma/2 - r0 e) dth
//
// with sigma = xi1+xi2 and r0 = |xi1-xi2|/2.  The theta integral depends on
// (xi1, xi2) only through (sigma, r0), which on the lattice is the integer
// key (j1+j1', j2+j2', |j-j'|^2); values are memoized on that key.
//----------------------------------------------------------------------------
inline QuadForm quadrilinear_circle_reduction(const ComplexField2D& f1h, const ComplexField2D& f2h,
                                              const ComplexField2D& f3h, const ComplexField2D& f4h) {
    for (const ComplexField2D* f : {&f1h, &f2h, &f3h, &f4h})
        f->require_space(Space::Frequency, "quadrilinear_circle_reduction");
    if (f1h.grid != f2h.grid || f1h.grid != f3h.grid || f1h.grid != f4h.grid)
        throw std::invalid_argument("quadrilinear_circle_reduction: grid mismatch");
    const Grid2D& g = f1h.grid;
    if (g.n_points > 32)
        throw std::invalid_argument("quadrilinear_circle_reduction: n > 32 (cost guard)");

    const detail::TrigInterpolator t3(f3h), t4(f4h);
    const int n = g.n_points;
    const double dxi = g.dxi();
    const double cell4 = dxi * dxi * dxi * dxi;

    std::map<std::tuple<int, int, long long>, cd> memo;
    cd acc(0.0, 0.0);
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            const cd w1 = std::conj(f1h.at(a1, a2));
            if (w1 == cd(0.0, 0.0)) continue;
            for (int b1 = 0; b1 < n; ++b1)
                for (int b2 = 0; b2 < n; ++b2) {
                    const cd w2 = std::conj(f2h.at(b1, b2));
                    if (w2 == cd(0.0, 0.0)) continue;
                    const int s1 = a1 + b1 - n, s2 = a2 + b2 - n;  // sigma / dxi
                    const long long d1 = a1 - b1, d2 = a2 - b2;
                    const long long dsq = d1 * d1 + d2 * d2;
                    const auto key = std::make_tuple(s1, s2, dsq);
                    auto it = memo.find(key);
                    if (it == memo.end()) {
                        const double r0 = 0.5 * dxi * std::sqrt(static_cast<double>(dsq));
                        const cd v = detail::circle_integral(t3, t4, s1 * dxi, s2 * dxi, r0);
                        it = memo.emplace(key, v).first;
                    }
                    acc += w1 * w2 * it->second;
                }
        }

    QuadForm q;
    q.route = QRoute::CircleReduction;
    q.grid = g;
    q.value = acc * cell4;
    return q;
}

//----------------------------------------------------------------------------
// dual symmetry: with fv(x) = (2pi)^{-2} fhat(-x), the transform of fv is f
// itself, and the L4 space-time norms of the two evolutions differ by a
// universal constant.  fv is evaluated by a direct separable sum
//
//   fv(x_m) = (2pi)^{-2} sum_j f(x_j) e^{+i x_m . x_j} dx^2
//
// (the target lattice is the physical grid, not the dual one, so this is a
// zoom transform rather than an FFT).
//----------------------------------------------------------------------------
struct DualSymmetryReport {
    double lhs = 0.0;    // |P_t f|_{L4}
    double rhs = 0.0;    // |P_t fv|_{L4}
    double ratio = 0.0;  // lhs / rhs
};

inline ComplexField2D dual_partner(const ComplexField2D& f) {
    f.require_space(Space::Physical, "dual_partner");
    const Grid2D& g = f.grid;
    const int n = g.n_points;
    const double dx = g.dx();
    // kernel K[m][j] = e^{+i x_m x_j} dx, applied along each axis
    std::vector<cd> K(static_cast<std::size_t>(n) * n);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            K[static_cast<std::size_t>(m) * n + j] = std::polar(dx, g.x(m) * g.x(j));
    ComplexField2D half(g, Space::Physical), out(g, Space::Physical);
    // contract the second axis, then the first
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) {
            cd s(0.0, 0.0);
            for (int j = 0; j < n; ++j) s += f.at(i, j) * K[static_cast<std::size_t>(m) * n + j];
            half.at(i, m) = s;
        }
    for (int m1 = 0; m1 < n; ++m1)
        for (int m2 = 0; m2 < n; ++m2) {
            cd s(0.0, 0.0);
            for (int i = 0; i < n; ++i) s += K[static_cast<std::size_t>(m1) * n + i] * half.at(i, m2);
            out.at(m1, m2) = s / std::pow(2.0 * M_PI, 2);
        }
    return out;
}

inline DualSymmetryReport dual_symmetry_check(const ComplexField2D& f, const TimeQuadrature& tq,
                                              const detail::EngineParams& ep = {}) {
    if (l2_norm(f) == 0.0) throw std::invalid_argument("dual_symmetry_check: zero field");
    DualSymmetryReport r;
    r.lhs = l4_spacetime_norm(f, tq, ep);
    r.rhs = l4_spacetime_norm(dual_partner(f), tq, ep);
    r.ratio = r.lhs / r.rhs;
    return r;
}

}  // namespace strz
