#pragma once

#include <cmath>
#include <cstdint>

#include "strz/spectral.hpp"

namespace strz {

//----------------------------------------------------------------------------
// Counter-based random streams.  A stream is addressed by (seed, stream_id)
// and produces a deterministic sequence independent of any other stream, so
// sweeps can hand out one stream per task and stay reproducible under any
// evaluation order.  The mixer is the splitmix64 finalizer.
//----------------------------------------------------------------------------
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(mix(seed ^ mix(stream_id + 0x632BE59BD9B4E019ull))), counter_(0) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key_ ^ mix(++counter_)); }

    // uniform in (0, 1]
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard normal, Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    cd complex_normal() {
        const double re = normal();
        const double im = normal();
        return cd(re, im) * M_SQRT1_2;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

//----------------------------------------------------------------------------
// Random test fields.  Spectra are supported in |xi| <= band so that cubic
// products stay inside the grid's Nyquist band (|u|^2 u triples the
// bandwidth; band defaults to xi_max/3).
//----------------------------------------------------------------------------

// iid complex-normal spectrum on the band, transformed back and normalized.
inline ComplexField2D random_bandlimited_field(const Grid2D& grid, std::uint64_t seed,
                                               std::uint64_t stream_id = 0,
                                               double band_fraction = 1.0 / 3.0) {
    Rng rng(seed, stream_id);
    ComplexField2D fhat(grid, Space::Frequency);
    const double band = band_fraction * grid.xi_max();
    const int n = grid.n_points;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r2 = grid.xi(i) * grid.xi(i) + grid.xi(j) * grid.xi(j);
            if (r2 <= band * band) fhat.at(i, j) = rng.complex_normal();
        }
    ComplexField2D f = inverse_transform(fhat);
    const double nrm = l2_norm(f);
    if (nrm == 0.0) throw std::runtime_error("random_bandlimited_field: empty band");
    for (cd& z : f.data) z /= nrm;
    return f;
}

// Real-valued variant: real-normal white noise band-projected (the band is
// symmetric, so the projection keeps the samples real up to roundoff, which
// is then discarded).
inline ComplexField2D random_real_field(const Grid2D& grid, std::uint64_t seed,
                                        std::uint64_t stream_id = 0,
                                        double band_fraction = 1.0 / 3.0) {
    Rng rng(seed, stream_id);
    ComplexField2D f(grid, Space::Physical);
    for (cd& z : f.data) z = cd(rng.normal(), 0.0);
    ComplexField2D fhat = forward_transform(f);
    const double band = band_fraction * grid.xi_max();
    const int n = grid.n_points;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r2 = grid.xi(i) * grid.xi(i) + grid.xi(j) * grid.xi(j);
            if (r2 > band * band) fhat.at(i, j) = cd(0.0, 0.0);
        }
    ComplexField2D out = inverse_transform(fhat);
    for (cd& z : out.data) z = cd(z.real(), 0.0);
    const double nrm = l2_norm(out);
    for (cd& z : out.data) z /= nrm;
    return out;
}

// Gaussian-envelope wave packet: random center, carrier, and quadratic
// chirp, then a hard projection onto the band and renormalization.
struct PacketParams {
    double envelope_a = 0.1;       // e^{-a|x - x0|^2}
    double center_fraction = 0.2;  // |x0| <= fraction * L
    double carrier_max = 0.0;      // |xi0| <= carrier_max
    double chirp_max = 0.0;        // |c| <= chirp_max in e^{i c |x-x0|^2}
    double band_fraction = 1.0 / 3.0;
};

inline ComplexField2D random_packet(const Grid2D& grid, std::uint64_t seed,
                                    std::uint64_t stream_id, const PacketParams& p) {
    Rng rng(seed, stream_id);
    const double L = grid.half_width;
    const double x01 = rng.uniform(-p.center_fraction * L, p.center_fraction * L);
    const double x02 = rng.uniform(-p.center_fraction * L, p.center_fraction * L);
    const double k1 = rng.uniform(-p.carrier_max, p.carrier_max);
    const double k2 = rng.uniform(-p.carrier_max, p.carrier_max);
    const double c = rng.uniform(-p.chirp_max, p.chirp_max);
    const double phase0 = rng.uniform(0.0, 2.0 * M_PI);

    ComplexField2D f(grid, Space::Physical);
    const int n = grid.n_points;
    for (int i = 0; i < n; ++i) {
        const double y1 = grid.x(i) - x01;
        for (int j = 0; j < n; ++j) {
            const double y2 = grid.x(j) - x02;
            const double r2 = y1 * y1 + y2 * y2;
            f.at(i, j) = std::exp(cd(-p.envelope_a * r2,
                                     c * r2 + k1 * y1 + k2 * y2 + phase0));
        }
    }
    ComplexField2D fhat = forward_transform(f);
    const double band = p.band_fraction * grid.xi_max();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r2 = grid.xi(i) * grid.xi(i) + grid.xi(j) * grid.xi(j);
            if (r2 > band * band) fhat.at(i, j) = cd(0.0, 0.0);
        }
    ComplexField2D out = inverse_transform(fhat);
    const double nrm = l2_norm(out);
    if (nrm == 0.0) throw std::runtime_error("random_packet: projected to zero");
    for (cd& z : out.data) z /= nrm;
    return out;
}

}  // namespace strz
