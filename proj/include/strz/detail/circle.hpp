#pragma once

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "strz/spectral.hpp"

namespace strz::detail {

//----------------------------------------------------------------------------
// Trigonometric interpolation of a spectrum at off-lattice frequencies.
// The discrete transform defines fhat at arbitrary p through its physical
// samples,
//
//   fhat(p) = sum_m f(x_m) e^{-i x_m . p} dx^2,
//
// which reproduces the lattice values exactly and is the exact transform for
// band-limited data.  Separable evaluation costs O(n^2) per point.
//----------------------------------------------------------------------------
class TrigInterpolator {
  public:
    explicit TrigInterpolator(const ComplexField2D& fhat)
        : grid_(fhat.grid), phys_(inverse_transform(fhat).data) {}

    const Grid2D& grid() const { return grid_; }

    cd operator()(double p1, double p2) const {
        const int n = grid_.n_points;
        const double dx = grid_.dx();
        ex1_.resize(n);
        ex2_.resize(n);
        for (int m = 0; m < n; ++m) {
            const double x = grid_.x(m);
            ex1_[m] = std::polar(dx, -x * p1);
            ex2_[m] = std::polar(dx, -x * p2);
        }
        cd acc(0.0, 0.0);
        for (int m1 = 0; m1 < n; ++m1) {
            cd row(0.0, 0.0);
            const cd* base = phys_.data() + static_cast<std::size_t>(m1) * n;
            for (int m2 = 0; m2 < n; ++m2) row += base[m2] * ex2_[m2];
            acc += ex1_[m1] * row;
        }
        return acc;
    }

  private:
    Grid2D grid_;
    std::vector<cd> phys_;
    mutable std::vector<cd> ex1_, ex2_;
};

//----------------------------------------------------------------------------
// Resolving the two constraint deltas: for fixed (xi1, xi2) with
// sigma = xi1 + xi2, the momentum delta sets xi4 = sigma - xi3, and with
// xi3 = sigma/2 + rho e(theta) the energy argument becomes 2 r0^2 - 2 rho^2,
// r0 = |xi1 - xi2|/2.  The Jacobian |d(2 rho^2)/d rho| = 4 rho against the
// polar measure rho d rho d theta leaves d theta / 4 on the circle of radius
// r0; the degenerate circle r0 = 0 carries the full angular weight 2 pi / 4
// at the single point sigma/2.
//
// The theta integrand is a trigonometric polynomial of degree <=
// 2 r0 L sqrt(2) (each interpolated factor contributes Bessel-decaying modes
// up to r0 |x|, |x| <= L sqrt(2)), so the uniform trapezoid rule with a
// margin over that degree is spectrally exact.
//----------------------------------------------------------------------------
inline int circle_node_count(double r0, double L) {
    return 2 * static_cast<int>(std::ceil(r0 * L * std::sqrt(2.0))) + 64;
}

// (1/4) integral_0^{2pi} f3(sigma/2 + r0 e) f4(sigma/2 - r0 e) d theta
inline cd circle_integral(const TrigInterpolator& f3, const TrigInterpolator& f4,
                          double sigma1, double sigma2, double r0) {
    const double c1 = 0.5 * sigma1, c2 = 0.5 * sigma2;
    if (r0 == 0.0) return (0.5 * M_PI) * f3(c1, c2) * f4(c1, c2);
    const int M = circle_node_count(r0, f3.grid().half_width);
    cd acc(0.0, 0.0);
    for (int m = 0; m < M; ++m) {
        const double th = 2.0 * M_PI * m / M;
        const double e1 = r0 * std::cos(th), e2 = r0 * std::sin(th);
        acc += f3(c1 + e1, c2 + e2) * f4(c1 - e1, c2 - e2);
    }
    return acc * (2.0 * M_PI / M) * 0.25;
}

}  // namespace strz::detail
