// Rectangle laboratory.  A field whose logarithm is a scalar quadratic
// satisfies f(x) f(y) = f(w) f(z) on every rectangle with x + y = w + z, and
// conversely: on perpendicular edge pairs the second difference of log f is
// 2 u . M v, which vanishes for all rectangles only when the quadratic form M
// is a multiple of the identity.  The battery here tests fields from both
// ends: pointwise functional-equation residuals, log-space second
// differences, and a quadratic log fit with isotropy diagnostics.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "strz/rng.hpp"
#include "strz/spectral.hpp"

namespace strz {

//----------------------------------------------------------------------------
// constructed rectangles
//----------------------------------------------------------------------------

struct RectangleQuadruple {
    std::array<double, 2> x{}, y{}, w{}, z{};
};

namespace detail {

// snap to the 2^-13 lattice so that vertex sums and the perpendicular dot
// product are exact in double precision
inline double dyadic(double t) { return std::round(t * 8192.0) / 8192.0; }

}  // namespace detail

// x = a, w = a + u, z = a + v, y = a + u + v with v = t rot90(u).  All
// coordinates sit on a dyadic lattice, so x + y equals w + z bit for bit and
// u . v evaluates to exactly zero; the energy identity
// |x|^2 + |y|^2 = |w|^2 + |z|^2 then holds to round-off because its exact
// cross term is 2 u . v.
inline RectangleQuadruple random_rectangle(double center_scale, double edge_scale,
                                           std::uint64_t seed) {
    if (!(center_scale > 0.0) || !(edge_scale > 0.0))
        throw std::invalid_argument("random_rectangle: scales must be positive");
    Rng rng(seed, 41);
    const double a1 = detail::dyadic(rng.uniform(-center_scale, center_scale));
    const double a2 = detail::dyadic(rng.uniform(-center_scale, center_scale));
    double u1 = 0.0, u2 = 0.0;
    while (u1 == 0.0 && u2 == 0.0) {
        u1 = detail::dyadic(rng.uniform(-edge_scale, edge_scale));
        u2 = detail::dyadic(rng.uniform(-edge_scale, edge_scale));
    }
    const double t = detail::dyadic(rng.uniform(0.25, 1.75));
    const double v1 = -t * u2, v2 = t * u1;

    RectangleQuadruple q;
    q.x = {a1, a2};
    q.w = {a1 + u1, a2 + u2};
    q.z = {a1 + v1, a2 + v2};
    q.y = {a1 + u1 + v1, a2 + u2 + v2};
    return q;
}

//----------------------------------------------------------------------------
// off-lattice evaluation
//----------------------------------------------------------------------------

namespace detail {

// Physical twin of the spectrum interpolator in circle.hpp: evaluates the
// band-limited interpolant of a physical field at arbitrary positions,
//
//   f(p) = (2 pi)^{-2} sum_k fhat(xi_k) e^{+i xi_k . p} dxi^2,
//
// which reproduces the lattice samples exactly.  Separable, O(n^2) per point.
class FieldInterpolator {
  public:
    explicit FieldInterpolator(const ComplexField2D& f)
        : grid_(f.grid), spec_(forward_transform(f).data) {}

    const Grid2D& grid() const { return grid_; }

    cd operator()(double p1, double p2) const {
        const int n = grid_.n_points;
        const double scale = grid_.dxi() / (2.0 * M_PI);
        ex1_.resize(n);
        ex2_.resize(n);
        for (int k = 0; k < n; ++k) {
            const double xi = grid_.xi(k);
            ex1_[k] = std::polar(scale, xi * p1);
            ex2_[k] = std::polar(scale, xi * p2);
        }
        cd acc(0.0, 0.0);
        for (int k1 = 0; k1 < n; ++k1) {
            cd row(0.0, 0.0);
            const cd* base = spec_.data() + static_cast<std::size_t>(k1) * n;
            for (int k2 = 0; k2 < n; ++k2) row += base[k2] * ex2_[k2];
            acc += ex1_[k1] * row;
        }
        return acc;
    }

  private:
    Grid2D grid_;
    std::vector<cd> spec_;
    mutable std::vector<cd> ex1_, ex2_;
};

}  // namespace detail

inline cd spectral_interpolate(const ComplexField2D& f, double p1, double p2) {
    f.require_space(Space::Physical, "spectral_interpolate");
    const double L = f.grid.half_width;
    if (!(p1 >= -L && p1 < L && p2 >= -L && p2 < L))
        throw std::invalid_argument("spectral_interpolate: point is outside the box");
    return detail::FieldInterpolator(f)(p1, p2);
}

//----------------------------------------------------------------------------
// quadruple statistics
//----------------------------------------------------------------------------

struct ResidualStats {
    double rms = 0.0;
    double max = 0.0;
    int n_used = 0;
    int n_skipped = 0;
};

struct SecondDiffStats {
    double rms = 0.0;
    int n_used = 0;
    int n_skipped = 0;
};

namespace detail {

inline double max_modulus(const ComplexField2D& f) {
    double m = 0.0;
    for (const cd& z : f.data) m = std::max(m, std::abs(z));
    return m;
}

inline int nearest_index(const Grid2D& g, double p) {
    const int i = static_cast<int>(std::lround(p / g.dx())) + g.n_points / 2;
    return std::min(std::max(i, 0), g.n_points - 1);
}

// connected components of {|f| >= floor} under 4-neighbor adjacency, without
// wraparound; label 0 marks cells below the floor
inline std::vector<int> connected_labels(const ComplexField2D& f, double floor) {
    const int n = f.grid.n_points;
    std::vector<int> label(static_cast<std::size_t>(n) * n, 0);
    std::vector<int> stack;
    int next = 0;
    for (int start = 0; start < n * n; ++start) {
        if (label[start] != 0 || std::abs(f.data[start]) < floor) continue;
        ++next;
        label[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int i = c / n, j = c % n;
            const int nb[4] = {c - n, c + n, c - 1, c + 1};
            const bool ok[4] = {i > 0, i < n - 1, j > 0, j < n - 1};
            for (int d = 0; d < 4; ++d) {
                if (!ok[d] || label[nb[d]] != 0) continue;
                if (std::abs(f.data[nb[d]]) < floor) continue;
                label[nb[d]] = next;
                stack.push_back(nb[d]);
            }
        }
    }
    return label;
}

}  // namespace detail

// Relative residual |f(x) f(y) - f(w) f(z)| / (|f(x) f(y)| + |f(w) f(z)|)
// over a quadruple batch.  Quadruples with a vertex outside the box or below
// the modulus floor 1e-10 max|f| are skipped and counted.
// When per_quad is given it receives one entry per quadruple, -1 for skipped.
inline ResidualStats functional_equation_residual(
    const ComplexField2D& f, const std::vector<RectangleQuadruple>& quads,
    std::vector<double>* per_quad = nullptr) {
    f.require_space(Space::Physical, "functional_equation_residual");
    const double fmax = detail::max_modulus(f);
    if (fmax == 0.0)
        throw std::invalid_argument(
            "functional_equation_residual: field is identically zero");
    const double floor = 1e-10 * fmax;
    const double L = f.grid.half_width;
    detail::FieldInterpolator eval(f);

    ResidualStats st;
    double sumsq = 0.0;
    for (const RectangleQuadruple& q : quads) {
        cd v[4];
        bool usable = true;
        const std::array<double, 2>* vert[4] = {&q.x, &q.y, &q.w, &q.z};
        for (int k = 0; k < 4 && usable; ++k) {
            const double p1 = (*vert[k])[0], p2 = (*vert[k])[1];
            if (!(p1 >= -L && p1 < L && p2 >= -L && p2 < L)) {
                usable = false;
                break;
            }
            v[k] = eval(p1, p2);
            if (std::abs(v[k]) < floor) usable = false;
        }
        if (!usable) {
            ++st.n_skipped;
            if (per_quad) per_quad->push_back(-1.0);
            continue;
        }
        const cd lhs = v[0] * v[1], rhs = v[2] * v[3];
        const double r = std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
        sumsq += r * r;
        st.max = std::max(st.max, r);
        ++st.n_used;
        if (per_quad) per_quad->push_back(r);
    }
    if (st.n_used > 0) st.rms = std::sqrt(sumsq / st.n_used);
    return st;
}

// Second difference of log f over rectangles: the log-modulus part combines
// directly and the phase part is reduced to the principal branch, which is
// enough because a quadratic phase cancels exactly on x + y = w + z.  Logs
// amplify modulus error by 1/|f|, so this test trusts only vertices with six
// digits of modulus headroom, and all four must lie in one connected
// component of that region so the branch reduction is local.
inline SecondDiffStats second_difference_test(
    const ComplexField2D& f, const std::vector<RectangleQuadruple>& quads) {
    f.require_space(Space::Physical, "second_difference_test");
    const double fmax = detail::max_modulus(f);
    if (fmax == 0.0)
        throw std::invalid_argument("second_difference_test: field is identically zero");
    const double floor = 1e-6 * fmax;
    const double L = f.grid.half_width;
    const Grid2D& g = f.grid;
    const std::vector<int> label = detail::connected_labels(f, floor);
    detail::FieldInterpolator eval(f);

    SecondDiffStats st;
    double sumsq = 0.0;
    for (const RectangleQuadruple& q : quads) {
        cd v[4];
        bool usable = true;
        int comp = 0;
        const std::array<double, 2>* vert[4] = {&q.x, &q.y, &q.w, &q.z};
        for (int k = 0; k < 4 && usable; ++k) {
            const double p1 = (*vert[k])[0], p2 = (*vert[k])[1];
            if (!(p1 >= -L && p1 < L && p2 >= -L && p2 < L)) {
                usable = false;
                break;
            }
            const int cell = detail::nearest_index(g, p1) * g.n_points +
                             detail::nearest_index(g, p2);
            if (label[cell] == 0 || (comp != 0 && label[cell] != comp)) {
                usable = false;
                break;
            }
            comp = label[cell];
            v[k] = eval(p1, p2);
            if (std::abs(v[k]) < floor) usable = false;
        }
        if (!usable) {
            ++st.n_skipped;
            continue;
        }
        const double dmod = std::log(std::abs(v[0])) + std::log(std::abs(v[1])) -
                            std::log(std::abs(v[2])) - std::log(std::abs(v[3]));
        const double draw =
            std::arg(v[0]) + std::arg(v[1]) - std::arg(v[2]) - std::arg(v[3]);
        const double dphase = std::remainder(draw, 2.0 * M_PI);
        sumsq += dmod * dmod + dphase * dphase;
        ++st.n_used;
    }
    if (st.n_used > 0) st.rms = std::sqrt(sumsq / st.n_used);
    return st;
}

//----------------------------------------------------------------------------
// quadratic log fit
//----------------------------------------------------------------------------

struct QuadraticFit {
    cd A{};
    std::array<cd, 2> B{};
    cd C{};
    double anisotropy = 0.0;   // |a11 - a22| per unit |A|
    double cross = 0.0;        // |a12| per unit |A|
    double residual_rms = 0.0; // against the isotropic model, not the raw fit
    int n_points = 0;
};

namespace detail {

inline std::array<double, 6> solve6(std::array<std::array<double, 6>, 6> m,
                                    std::array<double, 6> rhs) {
    for (int c = 0; c < 6; ++c) {
        int p = c;
        for (int r = c + 1; r < 6; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        std::swap(m[c], m[p]);
        std::swap(rhs[c], rhs[p]);
        if (m[c][c] == 0.0)
            throw std::runtime_error("quadratic_log_fit: singular normal matrix");
        for (int r = c + 1; r < 6; ++r) {
            const double s = m[r][c] / m[c][c];
            for (int k = c; k < 6; ++k) m[r][k] -= s * m[c][k];
            rhs[r] -= s * rhs[c];
        }
    }
    std::array<double, 6> x{};
    for (int c = 5; c >= 0; --c) {
        double acc = rhs[c];
        for (int k = c + 1; k < 6; ++k) acc -= m[c][k] * x[k];
        x[c] = acc / m[c][c];
    }
    return x;
}

}  // namespace detail

// Least squares of log f against {1, x1, x2, x1^2, x2^2, x1 x2} over the
// region |f| >= threshold max|f|, log-modulus and unwrapped phase fitted
// separately and recombined.  The phase is unwrapped by flood fill from the
// modulus peak, so only the component containing the peak is fitted.  The
// report collapses the quadratic form to its isotropic part,
// A = (a11 + a22) / 2, and residual_rms measures log f against that isotropic
// model: a log-quadratic field with unequal axes fails the residual, and the
// anisotropy and cross diagnostics say why.
inline QuadraticFit quadratic_log_fit(const ComplexField2D& f, double threshold = 1e-6) {
    f.require_space(Space::Physical, "quadratic_log_fit");
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw std::invalid_argument("quadratic_log_fit: threshold must be in (0, 1)");
    const double fmax = detail::max_modulus(f);
    if (fmax == 0.0)
        throw std::invalid_argument("quadratic_log_fit: field is identically zero");
    const Grid2D& g = f.grid;
    const int n = g.n_points;
    const double floor = threshold * fmax;

    int seed = 0;
    for (int c = 0; c < n * n; ++c)
        if (std::abs(f.data[c]) > std::abs(f.data[seed])) seed = c;

    // flood fill from the peak, unwrapping the phase one cell at a time
    std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
    std::vector<int> cells;
    std::vector<double> phase(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> stack{seed};
    seen[seed] = 1;
    phase[seed] = std::arg(f.data[seed]);
    while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        cells.push_back(c);
        const int i = c / n, j = c % n;
        const int nb[4] = {c - n, c + n, c - 1, c + 1};
        const bool ok[4] = {i > 0, i < n - 1, j > 0, j < n - 1};
        for (int d = 0; d < 4; ++d) {
            if (!ok[d] || seen[nb[d]] || std::abs(f.data[nb[d]]) < floor) continue;
            seen[nb[d]] = 1;
            const double raw = std::arg(f.data[nb[d]]);
            phase[nb[d]] =
                raw + 2.0 * M_PI * std::round((phase[c] - raw) / (2.0 * M_PI));
            stack.push_back(nb[d]);
        }
    }
    if (cells.size() < 100)
        throw std::runtime_error("quadratic_log_fit: usable region is too small");

    std::array<std::array<double, 6>, 6> M{};
    std::array<double, 6> rhs_re{}, rhs_im{};
    for (const int c : cells) {
        const double x1 = g.x(c / n), x2 = g.x(c % n);
        const double b[6] = {1.0, x1, x2, x1 * x1, x2 * x2, x1 * x2};
        const double lm = std::log(std::abs(f.data[c]));
        for (int r = 0; r < 6; ++r) {
            for (int k = 0; k < 6; ++k) M[r][k] += b[r] * b[k];
            rhs_re[r] += b[r] * lm;
            rhs_im[r] += b[r] * phase[c];
        }
    }
    const std::array<double, 6> cre = detail::solve6(M, rhs_re);
    const std::array<double, 6> cim = detail::solve6(M, rhs_im);

    QuadraticFit fit;
    const cd a11(cre[3], cim[3]), a22(cre[4], cim[4]), a12(cre[5], cim[5]);
    fit.A = 0.5 * (a11 + a22);
    fit.B = {cd(cre[1], cim[1]), cd(cre[2], cim[2])};
    fit.C = cd(cre[0], cim[0]);
    const double den = std::max(std::abs(fit.A), 1e-300);
    fit.anisotropy = std::abs(a11 - a22) / den;
    fit.cross = std::abs(a12) / den;
    fit.n_points = static_cast<int>(cells.size());

    double sumsq = 0.0;
    for (const int c : cells) {
        const double x1 = g.x(c / n), x2 = g.x(c % n);
        const cd logf(std::log(std::abs(f.data[c])), phase[c]);
        const cd model = fit.A * (x1 * x1 + x2 * x2) + fit.B[0] * x1 +
                         fit.B[1] * x2 + fit.C;
        sumsq += std::norm(logf - model);
    }
    fit.residual_rms = std::sqrt(sumsq / static_cast<double>(cells.size()));
    return fit;
}

}  // namespace strz
