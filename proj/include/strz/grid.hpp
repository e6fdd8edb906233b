#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace strz {

using cd = std::complex<double>;

enum class Space { Physical, Frequency };

//----------------------------------------------------------------------------
// Grid2D: n_points-per-axis uniform grid on [-L, L)^2, coupled to its dual
// grid so that dx * dxi * n = 2*pi holds exactly.
//
//   x_m  = (m - n/2) * dx,   dx  = 2L/n
//   xi_j = (j - n/2) * dxi,  dxi = pi/L
//
// Frequencies are stored in natural ascending order; index n/2 is zero
// frequency on both axes.
//----------------------------------------------------------------------------
struct Grid2D {
    int n_points = 0;
    double half_width = 0.0;

    Grid2D() = default;
    Grid2D(int n, double L) : n_points(n), half_width(L) { validate(); }

    double dx() const { return 2.0 * half_width / n_points; }
    double dxi() const { return M_PI / half_width; }
    double xi_max() const { return 0.5 * n_points * dxi(); }

    double x(int i) const { return (i - n_points / 2) * dx(); }
    double xi(int j) const { return (j - n_points / 2) * dxi(); }

    std::size_t size() const {
        return static_cast<std::size_t>(n_points) * n_points;
    }

    void validate() const {
        if (n_points < 8 || n_points % 2 != 0)
            throw std::invalid_argument("Grid2D: n_points must be even and >= 8");
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw std::invalid_argument("Grid2D: half_width must be positive and finite");
        if (std::abs(dx() * dxi() * n_points - 2.0 * M_PI) > 1e-14)
            throw std::invalid_argument("Grid2D: dx*dxi*n != 2*pi");
    }

    bool operator==(const Grid2D& o) const {
        return n_points == o.n_points && half_width == o.half_width;
    }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

//----------------------------------------------------------------------------
// ComplexField2D: samples on a Grid2D, tagged by the space they live in.
// Storage is row-major with the second axis fastest: sample (i, j) of the
// field sits at data[i*n + j], where i indexes x1 (or xi1) and j indexes
// x2 (or xi2).
//----------------------------------------------------------------------------
struct ComplexField2D {
    Grid2D grid;
    Space space = Space::Physical;
    std::vector<cd> data;

    ComplexField2D() = default;
    ComplexField2D(const Grid2D& g, Space s)
        : grid(g), space(s), data(g.size(), cd(0.0, 0.0)) {}

    cd& at(int i, int j) {
        return data[static_cast<std::size_t>(i) * grid.n_points + j];
    }
    const cd& at(int i, int j) const {
        return data[static_cast<std::size_t>(i) * grid.n_points + j];
    }

    void require_space(Space s, const char* who) const {
        if (space != s)
            throw std::invalid_argument(std::string(who) + ": field is in the wrong space");
    }

    void validate() const {
        grid.validate();
        if (data.size() != grid.size())
            throw std::invalid_argument("ComplexField2D: data size does not match grid");
        for (const cd& z : data)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw std::invalid_argument("ComplexField2D: non-finite sample");
    }
};

inline double max_abs(const ComplexField2D& f) {
    double m = 0.0;
    for (const cd& z : f.data) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace strz
