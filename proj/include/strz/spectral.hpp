#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "strz/detail/fft.hpp"
#include "strz/grid.hpp"

//----------------------------------------------------------------------------
// Transform conventions used throughout:
//
//   forward:   fhat(xi) = integral e^{-i x.xi} f(x) dx
//   inverse:   f(x)     = (2pi)^{-2} integral e^{+i x.xi} fhat(xi) dxi
//   Plancherel:          |fhat|_2^2 = (2pi)^2 |f|_2^2
//   propagator:          (P_t f)^hat (xi) = e^{+i t |xi|^2} fhat(xi)
//
// On the grid both integrals are realized exactly by an FFT plus a
// checkerboard sign flip.  With x_m = (m - n/2) dx and xi_j = (j - n/2) dxi,
// the cross phase splits as
//
//   x_m . xi_j = (2pi/n)(m.j) - pi (m1+m2) - pi (j1+j2) + pi n
//
// and e^{i pi n} = 1 for even n, so
//
//   fhat[j] = dx^2 (-1)^{j1+j2} FFT_fwd[ (-1)^{m1+m2} f ][j]
//   f[m]    = (dxi/2pi)^2 (-1)^{m1+m2} FFT_bwd[ (-1)^{j1+j2} fhat ][m]
//
// which keeps the frequency axis in natural ascending order.
//----------------------------------------------------------------------------

namespace strz {

namespace detail {

inline void checkerboard(ComplexField2D& f) {
    const int n = f.grid.n_points;
    for (int i = 0; i < n; ++i)
        for (int j = (i & 1) ? 0 : 1; j < n; j += 2)
            f.at(i, j) = -f.at(i, j);
}

}  // namespace detail

inline ComplexField2D forward_transform(const ComplexField2D& f) {
    f.require_space(Space::Physical, "forward_transform");
    const int n = f.grid.n_points;
    ComplexField2D out = f;
    out.space = Space::Frequency;
    detail::checkerboard(out);
    detail::fft_exec(n, n, FFTW_FORWARD, out.data.data());
    detail::checkerboard(out);
    const double scale = f.grid.dx() * f.grid.dx();
    for (cd& z : out.data) z *= scale;
    return out;
}

inline ComplexField2D inverse_transform(const ComplexField2D& g) {
    g.require_space(Space::Frequency, "inverse_transform");
    const int n = g.grid.n_points;
    ComplexField2D out = g;
    out.space = Space::Physical;
    detail::checkerboard(out);
    detail::fft_exec(n, n, FFTW_BACKWARD, out.data.data());
    detail::checkerboard(out);
    const double s = g.grid.dxi() / (2.0 * M_PI);
    const double scale = s * s;
    for (cd& z : out.data) z *= scale;
    return out;
}

// Multiply a spectrum by the propagator phase e^{+i t |xi|^2} in place.
inline void propagate_spectrum(ComplexField2D& fhat, double t) {
    fhat.require_space(Space::Frequency, "propagate_spectrum");
    const int n = fhat.grid.n_points;
    std::vector<cd> phase(n);
    for (int j = 0; j < n; ++j) {
        const double xi = fhat.grid.xi(j);
        phase[j] = std::polar(1.0, t * xi * xi);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            fhat.at(i, j) *= phase[i] * phase[j];
}

inline ComplexField2D propagate(const ComplexField2D& f, double t) {
    f.require_space(Space::Physical, "propagate");
    if (!std::isfinite(t)) throw std::invalid_argument("propagate: t must be finite");
    ComplexField2D fhat = forward_transform(f);
    propagate_spectrum(fhat, t);
    return inverse_transform(fhat);
}

// f(x) = e^{A|x|^2 + B.x + C}, Re(A) < 0.  B.x is the bilinear pairing
// B1 x1 + B2 x2 without conjugation.
inline ComplexField2D gaussian_field(const Grid2D& grid, cd A, cd B1, cd B2, cd C) {
    if (!(A.real() < 0.0))
        throw std::invalid_argument("gaussian_field: Re(A) must be negative");
    ComplexField2D f(grid, Space::Physical);
    const int n = grid.n_points;
    for (int i = 0; i < n; ++i) {
        const double x1 = grid.x(i);
        for (int j = 0; j < n; ++j) {
            const double x2 = grid.x(j);
            f.at(i, j) = std::exp(A * (x1 * x1 + x2 * x2) + B1 * x1 + B2 * x2 + C);
        }
    }
    return f;
}

inline ComplexField2D gaussian_field(const Grid2D& grid, double a) {
    return gaussian_field(grid, cd(-a, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0));
}

// re-express the field on a grid with `factor` times more points in the same
// box, by zero padding the spectrum.  dxi is unchanged, so this is exact for
// the band-limited interpolant of the input samples; it only enlarges the
// Nyquist band.
inline ComplexField2D spectral_zero_pad(const ComplexField2D& f, int factor) {
    f.require_space(Space::Physical, "spectral_zero_pad");
    if (factor < 1) throw std::invalid_argument("spectral_zero_pad: factor must be >= 1");
    if (factor == 1) return f;
    const Grid2D& g = f.grid;
    ComplexField2D fhat = forward_transform(f);
    Grid2D fine(factor * g.n_points, g.half_width);
    ComplexField2D out(fine, Space::Frequency);
    const int off = (fine.n_points - g.n_points) / 2;
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) out.at(i + off, j + off) = fhat.at(i, j);
    return inverse_transform(out);
}

// L2 norm with the measure of the field's own space (dx^2 or dxi^2); no
// (2pi) factor is applied, so for spectra this is the raw norm satisfying
// |fhat|_2 = 2pi |f|_2.
inline double l2_norm(const ComplexField2D& f) {
    double s = 0.0;
    for (const cd& z : f.data) s += std::norm(z);
    const double cell = (f.space == Space::Physical) ? f.grid.dx() : f.grid.dxi();
    return std::sqrt(s) * cell;
}

// Conjugate-linear in the first argument.
inline cd inner_product(const ComplexField2D& f, const ComplexField2D& g) {
    if (f.grid != g.grid || f.space != g.space)
        throw std::invalid_argument("inner_product: grid or space mismatch");
    cd s(0.0, 0.0);
    for (std::size_t k = 0; k < f.data.size(); ++k)
        s += std::conj(f.data[k]) * g.data[k];
    const double cell = (f.space == Space::Physical) ? f.grid.dx() : f.grid.dxi();
    return s * (cell * cell);
}

}  // namespace strz
