#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "strz/decay.hpp"
#include "strz/rng.hpp"

using namespace strz;

TEST_CASE("the bounded weight exponent obeys its ceilings") {
    WeightParams p{2.0, 0.0};
    CHECK(weight_f(0.0, 0.0, p) == 0.0);
    CHECK(std::abs(weight_f(std::sqrt(3.0), 0.0, p) - 6.0) <= 1e-14);

    Rng rng(12, 0);
    for (int k = 0; k < 200; ++k) {
        const double x1 = 5.0 * rng.normal(), x2 = 5.0 * rng.normal();
        const double mu = rng.uniform(0.0, 2.0), eps = rng.uniform(1e-3, 2.0);
        const double w = weight_f(x1, x2, WeightParams{mu, eps});
        const double r2 = x1 * x1 + x2 * x2;
        CHECK(w >= 0.0);
        CHECK(w <= mu * r2 + 1e-15);
        CHECK(w <= mu / eps + 1e-15);
        // non-increasing in eps
        CHECK(weight_f(x1, x2, WeightParams{mu, 2.0 * eps}) <= w + 1e-15);
    }
}

TEST_CASE("the frequency split partitions a spectrum exactly") {
    Grid2D g(64, 10.0);
    ComplexField2D h(g, Space::Frequency);
    Rng rng(5, 0);
    for (cd& z : h.data) z = rng.complex_normal();

    FrequencySplit sp = frequency_split(h, 2.0);
    double sum_parts = 0.0;
    for (std::size_t m = 0; m < h.data.size(); ++m) {
        const cd total = sp.h_low.data[m] + sp.h_mid.data[m] + sp.h_high.data[m];
        CHECK(total == h.data[m]);  // each point lands in exactly one band
        sum_parts += std::norm(sp.h_low.data[m]) + std::norm(sp.h_mid.data[m]) +
                     std::norm(sp.h_high.data[m]);
    }
    const double n2 = l2_norm(h) * l2_norm(h);
    const double parts2 = sum_parts * g.dxi() * g.dxi();
    CHECK(std::abs(parts2 - n2) <= 1e-14 * n2);
}

TEST_CASE("the split routes known supports to the right bands") {
    Grid2D g(64, 10.0);
    const double s = 2.0;
    // mass only in the annulus [3, 4], inside [s, s^2]
    ComplexField2D h(g, Space::Frequency);
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r >= 3.0 && r <= 4.0) h.at(i, j) = cd(1.0, -0.5);
        }
    FrequencySplit sp = frequency_split(h, s);
    CHECK(l2_norm(sp.h_low) == 0.0);
    CHECK(l2_norm(sp.h_high) == 0.0);
    CHECK(std::abs(l2_norm(sp.h_mid) - l2_norm(h)) <= 1e-15);

    // mass only below s
    ComplexField2D lo(g, Space::Frequency);
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j)
            if (std::hypot(g.xi(i), g.xi(j)) < s) lo.at(i, j) = cd(0.3, 0.7);
    FrequencySplit sp2 = frequency_split(lo, s);
    CHECK(l2_norm(sp2.h_mid) == 0.0);
    CHECK(l2_norm(sp2.h_high) == 0.0);

    CHECK_THROWS_AS(frequency_split(h, 1.0), std::invalid_argument);
    ComplexField2D phys(g, Space::Physical);
    CHECK_THROWS_AS(frequency_split(phys, 2.0), std::invalid_argument);
}

TEST_CASE("the unweighted tail norm is the high band norm") {
    Grid2D g(64, 10.0);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    const double s = 1.5;
    FrequencySplit sp = frequency_split(fh, s);
    const double h0 = weighted_tail_norm(fh, s, WeightParams{0.0, 0.0});
    CHECK(std::abs(h0 - l2_norm(sp.h_high) / (2.0 * M_PI)) <= 1e-15);
}

TEST_CASE("the weighted tail norm rises monotonically as eps drops") {
    Grid2D g(64, 10.0);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    const double s = 1.5;
    const double mu = std::pow(s, -4.0);
    double prev = -1.0;
    for (int k = 0; k < 10; ++k) {
        const double eps = std::pow(10.0, -k);  // 1 down to 1e-9
        const double h = weighted_tail_norm(fh, s, WeightParams{mu, eps});
        CHECK(h >= prev);
        prev = h;
    }
}

TEST_CASE("the eps to zero limit matches the Gaussian weighted tail") {
    Grid2D g(64, 10.0);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    const double s = 1.5;
    const double mu = std::pow(s, -4.0);

    double direct = 0.0;
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            const double r = std::hypot(g.xi(i), g.xi(j));
            if (r <= s * s) continue;
            direct += std::exp(2.0 * mu * r * r) * std::norm(fh.at(i, j));
        }
    direct = std::sqrt(direct) * g.dxi() / (2.0 * M_PI);

    const double h = weighted_tail_norm(fh, s, WeightParams{mu, 1e-12});
    CHECK(std::abs(h - direct) <= 1e-8 * direct);
}

TEST_CASE("the decay fit recovers an exact Gaussian spectrum") {
    Grid2D g(64, 10.0);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    DecayFit fit = fit_gaussian_decay(fh);
    CHECK(fit.n_samples >= 30);
    CHECK(std::abs(fit.mu_fit - 0.25) <= 1e-9);
    CHECK(std::abs(fit.intercept - std::log(M_PI)) <= 1e-9);
    CHECK(fit.r_squared >= 0.9999);
    CHECK(fit.xi_min == 2.0);
    CHECK(std::abs(fit.xi_max - 0.8 * g.xi_max()) <= 1e-15);
}

TEST_CASE("the decay fit rejects a white noise spectrum") {
    Grid2D g(64, 10.0);
    ComplexField2D wn(g, Space::Frequency);
    Rng rng(3, 0);
    for (cd& z : wn.data) z = rng.complex_normal();
    DecayFit fit = fit_gaussian_decay(wn);
    CHECK(fit.r_squared < 0.5);
}

TEST_CASE("the decay fit refuses starved annuli") {
    Grid2D g(64, 10.0);
    ComplexField2D zero(g, Space::Frequency);
    CHECK_THROWS_AS(fit_gaussian_decay(zero), std::runtime_error);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    // annulus beyond the lattice holds no samples
    CHECK_THROWS_AS(fit_gaussian_decay(fh, 50.0, 60.0), std::runtime_error);
    CHECK_THROWS_AS(fit_gaussian_decay(fh, 3.0, 2.0), std::invalid_argument);
}

TEST_CASE("the cubic analysis reproduces the closed form case") {
    GAnalysis r = g_function_analysis(2.0, 1.0);
    CHECK(std::abs(r.x_crit - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(r.M - 5.0 / 27.0) <= 1e-12);
    CHECK(r.x0 > 0.0);
    CHECK(r.x0 < r.x_crit);
    CHECK(r.x_crit < r.x1);
    CHECK(std::abs(detail::g_cubic(r.x0, 2.0, 1.0) - 0.5 * r.M) <= 1e-12);
    CHECK(std::abs(detail::g_cubic(r.x1, 2.0, 1.0) - 0.5 * r.M) <= 1e-12);
    CHECK_THROWS_AS(g_function_analysis(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(g_function_analysis(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("the half level brackets hold across the parameter box") {
    Rng rng(77, 0);
    for (int k = 0; k < 100; ++k) {
        const double omega = rng.uniform(0.1, 10.0);
        const double C = rng.uniform(0.1, 10.0);
        GAnalysis r = g_function_analysis(omega, C);
        CHECK(r.x0 > 0.0);
        CHECK(r.x0 < r.x_crit);
        CHECK(r.x_crit < r.x1);
        CHECK(std::abs(detail::g_cubic(r.x_crit, omega, C) - r.M) <= 1e-12);
        CHECK(std::abs(detail::g_cubic(r.x0, omega, C) - 0.5 * r.M) <= 1e-12 * (1.0 + r.M));
        CHECK(std::abs(detail::g_cubic(r.x1, omega, C) - 0.5 * r.M) <= 1e-12 * (1.0 + r.M));
    }
}

TEST_CASE("the split norm bounds hold with nonnegative slack") {
    Grid2D g(64, 10.0);
    ComplexField2D f = gaussian_field(g, 1.0);
    double nn = l2_norm(f);
    for (cd& z : f.data) z /= nn;

    SplitBoundsReport rep = split_norm_bounds(f, 3.0, std::pow(3.0, -4.0));
    CHECK(rep.all_hold);
    CHECK(rep.low_norm <= rep.low_bound);
    CHECK(rep.below_norm <= rep.below_bound);
    CHECK(rep.mid_norm <= rep.mid_bound);

    ComplexField2D r = random_bandlimited_field(g, 8);
    nn = l2_norm(r);
    for (cd& z : r.data) z /= nn;
    CHECK(split_norm_bounds(r, 2.0, 1e-2).all_hold);
    CHECK(split_norm_bounds(r, 5.0, std::pow(5.0, -4.0)).all_hold);
}

TEST_CASE("the below band bound is tight for concentrated spectra") {
    Grid2D g(64, 10.0);
    const double s = 4.0;
    // spectrum supported strictly below s
    ComplexField2D f(g, Space::Physical);
    ComplexField2D fh = forward_transform(gaussian_field(g, 1.0));
    for (int i = 0; i < g.n_points; ++i)
        for (int j = 0; j < g.n_points; ++j)
            if (std::hypot(g.xi(i), g.xi(j)) >= s) fh.at(i, j) = cd(0.0, 0.0);
    f = inverse_transform(fh);
    double nn = l2_norm(f);
    for (cd& z : f.data) z /= nn;

    SplitBoundsReport rep = split_norm_bounds(f, s, 1e-8);
    CHECK(rep.all_hold);
    // everything sits below s, so the below-s^2 bound saturates as mu -> 0
    CHECK(rep.below_bound - rep.below_norm <= 1e-4);

    ComplexField2D big = gaussian_field(g, 1.0);
    CHECK_THROWS_AS(split_norm_bounds(big, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("the interaction weight never exceeds one") {
    CHECK(constraint_weight_check(WeightParams{0.0, 0.0}, 1000, 9).max_weight == 1.0);

    for (WeightParams p : {WeightParams{0.01, 0.1}, WeightParams{1.0, 0.5},
                           WeightParams{0.3, 1e-3}}) {
        WeightCheckResult r = constraint_weight_check(p, 100000, 9);
        CHECK(r.max_weight <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(constraint_weight_check(WeightParams{0.1, 0.1}, 0, 1),
                    std::invalid_argument);

    // the degenerate quadruple eta3 = eta1, eta4 = eta2 collapses by hand
    WeightParams p{0.7, 0.2};
    const double w = std::exp(weight_f(1.3, -0.4, p) - weight_f(0.2, 2.1, p) -
                              weight_f(1.3, -0.4, p) - weight_f(0.2, 2.1, p));
    CHECK(std::abs(w - std::exp(-2.0 * weight_f(0.2, 2.1, p))) <= 1e-15);
    CHECK(w <= 1.0);
}
