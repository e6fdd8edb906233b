#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace strz {

enum class QuadScheme { TangentMappedLegendre, UniformTruncated };

//----------------------------------------------------------------------------
// TimeQuadrature: nodes and positive weights discretizing integrals over the
// whole time axis.  Both schemes are symmetric about t = 0 by construction
// (the negative half is mirrored from the positive half, so the symmetry is
// exact in floating point, not just to tolerance).
//----------------------------------------------------------------------------
struct TimeQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadScheme scheme = QuadScheme::TangentMappedLegendre;

    std::size_t size() const { return nodes.size(); }

    void validate() const {
        if (nodes.size() != weights.size())
            throw std::invalid_argument("TimeQuadrature: node/weight length mismatch");
        if (nodes.size() < 9)
            throw std::invalid_argument("TimeQuadrature: needs at least 9 nodes");
        const std::size_t K = nodes.size();
        for (std::size_t k = 0; k < K; ++k) {
            if (!(weights[k] > 0.0))
                throw std::invalid_argument("TimeQuadrature: weights must be positive");
            if (k + 1 < K && !(nodes[k] < nodes[k + 1]))
                throw std::invalid_argument("TimeQuadrature: nodes must increase strictly");
        }
        for (std::size_t k = 0; k < K; ++k) {
            const double scale = 1.0 + std::abs(nodes[k]);
            if (std::abs(nodes[k] + nodes[K - 1 - k]) > 1e-14 * scale)
                throw std::invalid_argument("TimeQuadrature: nodes not symmetric about 0");
        }
    }
};

//----------------------------------------------------------------------------
// Gauss-Legendre rule on [-1, 1] by Newton iteration on the three-term
// recurrence.  Roots are computed for one half and mirrored.
//----------------------------------------------------------------------------
inline void gauss_legendre(int K, std::vector<double>& x, std::vector<double>& w) {
    if (K < 1) throw std::invalid_argument("gauss_legendre: K must be positive");
    x.assign(K, 0.0);
    w.assign(K, 0.0);
    const int half = (K + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Tricomi-style initial guess for the k-th root (descending order)
        double z = std::cos(M_PI * (k + 0.75) / (K + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < K; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = K * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double wk = 2.0 / ((1.0 - z * z) * pp * pp);
        x[K - 1 - k] = z;
        x[k] = -z;
        w[k] = w[K - 1 - k] = wk;
    }
    if (K % 2 == 1) x[K / 2] = 0.0;
}

//----------------------------------------------------------------------------
// t = tan(theta) substitution: integrals over R become integrals over
// (-pi/2, pi/2) with Jacobian 1/cos^2(theta), handled by Gauss-Legendre in
// theta.  Algebraic tails like (1+t^2)^{-1} are what the map is built for.
//----------------------------------------------------------------------------
inline TimeQuadrature tangent_mapped_legendre(int n_nodes) {
    std::vector<double> x, w;
    gauss_legendre(n_nodes, x, w);
    TimeQuadrature tq;
    tq.scheme = QuadScheme::TangentMappedLegendre;
    tq.nodes.resize(n_nodes);
    tq.weights.resize(n_nodes);
    // Map the nonnegative half and mirror the mapped values; the map
    // amplifies theta roundoff by 1+t^2 near the ends, so symmetry has to be
    // imposed on the outputs.
    for (int k = n_nodes / 2; k < n_nodes; ++k) {
        const double theta = 0.5 * M_PI * x[k];
        const double c = std::cos(theta);
        const double t = std::tan(theta);
        const double wk = 0.5 * M_PI * w[k] / (c * c);
        tq.nodes[k] = t;
        tq.weights[k] = wk;
        tq.nodes[n_nodes - 1 - k] = -t;
        tq.weights[n_nodes - 1 - k] = wk;
    }
    if (n_nodes % 2 == 1) tq.nodes[n_nodes / 2] = 0.0;
    tq.validate();
    return tq;
}

// Trapezoid rule on [-t_max, t_max].
inline TimeQuadrature uniform_truncated(int n_nodes, double t_max) {
    if (n_nodes < 9) throw std::invalid_argument("uniform_truncated: needs >= 9 nodes");
    if (!(t_max > 0.0)) throw std::invalid_argument("uniform_truncated: t_max must be positive");
    TimeQuadrature tq;
    tq.scheme = QuadScheme::UniformTruncated;
    tq.nodes.resize(n_nodes);
    tq.weights.resize(n_nodes);
    const double dt = 2.0 * t_max / (n_nodes - 1);
    for (int k = 0; k <= (n_nodes - 1) / 2; ++k) {
        const double t = -t_max + k * dt;
        tq.nodes[k] = t;
        tq.nodes[n_nodes - 1 - k] = -t;
        const double wk = (k == 0) ? 0.5 * dt : dt;
        tq.weights[k] = tq.weights[n_nodes - 1 - k] = wk;
    }
    if (n_nodes % 2 == 1) tq.nodes[n_nodes / 2] = 0.0;
    tq.validate();
    return tq;
}

}  // namespace strz
