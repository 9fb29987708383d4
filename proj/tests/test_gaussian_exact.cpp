#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gergm/errors.hpp"
#include "gergm/gaussian_exact.hpp"
#include "gergm/rng.hpp"

using namespace gergm;

namespace {

// Independent Monte Carlo oracle for ln psi_n: direct averaging of
// exp(b1 sum_{i!=j} x_ij + (b2/n) sum_i (row_i)^2) over i.i.d. N(0,1) edges.
double mc_log_psi(int n, double b1, double b2, long long draws, std::uint64_t seed) {
    Rng rng(seed);
    double max_seen = -1e300, s = 0.0;
    std::vector<double> x(static_cast<size_t>(n * n), 0.0);
    for (long long d = 0; d < draws; ++d) {
        std::vector<double> rows(n, 0.0);
        double s1 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = rng.normal();
                rows[i] += v;
                rows[j] += v;
                s1 += 2.0 * v;
            }
        double sy2 = 0.0;
        for (int i = 0; i < n; ++i) sy2 += rows[i] * rows[i];
        const double e = b1 * s1 + b2 / n * sy2;
        if (e <= max_seen) {
            s += std::exp(e - max_seen);
        } else {
            s = s * std::exp(max_seen - e) + 1.0;
            max_seen = e;
        }
    }
    return max_seen + std::log(s / static_cast<double>(draws));
}

}  // namespace

TEST_CASE("psi_exact at the untilted point and divergence boundary") {
    CHECK(psi_exact({3, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(log_psi_exact({5, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(gaussian_two_star_beta2_sup(3) == doctest::Approx(3.0 / 8.0));
    CHECK_THROWS_AS((void)log_psi_exact({3, 0.0, 0.375}), DivergenceError);
    CHECK_THROWS_AS((void)log_psi_exact({3, 0.1, 0.4}), DivergenceError);
    CHECK_THROWS_AS((void)log_psi_exact({2, 0.0, 0.0}), ConfigError);
    // negative beta2 is fine
    CHECK(std::isfinite(log_psi_exact({4, 0.3, -2.0})));
}

TEST_CASE("psi_exact matches an independent Monte Carlo oracle") {
    {
        const double exact = log_psi_exact({3, 0.1, 0.1});
        const double mc = mc_log_psi(3, 0.1, 0.1, 2000000, 991);
        CHECK(std::abs(mc - exact) / std::abs(exact) < 0.01);
    }
    {
        const double exact = log_psi_exact({4, 0.05, 0.2});
        const double mc = mc_log_psi(4, 0.05, 0.2, 2000000, 992);
        CHECK(std::abs(mc - exact) / std::abs(exact) < 0.02);
    }
}

TEST_CASE("psi_limit plug-ins") {
    CHECK(psi_limit(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(psi_limit(0.0, 0.2) == doctest::Approx(0.0));
    CHECK(psi_limit(0.1, 0.1) == doctest::Approx(0.01 / 0.6));
    CHECK_THROWS_AS((void)psi_limit(1.0, 0.25), DivergenceError);
}

TEST_CASE("analytic moments validated against finite differences") {
    for (const GaussianTwoStarParams p :
         {GaussianTwoStarParams{3, 0.1, 0.1}, GaussianTwoStarParams{7, -0.4, 0.15},
          GaussianTwoStarParams{20, 1.0, -0.3}}) {
        const auto m = moments_exact(p);
        const double h = 1e-6;
        const double d1 = (log_psi_exact({p.n, p.beta1 + h, p.beta2}) -
                           log_psi_exact({p.n, p.beta1 - h, p.beta2})) /
                          (2.0 * h);
        const double d2 = (log_psi_exact({p.n, p.beta1, p.beta2 + h}) -
                           log_psi_exact({p.n, p.beta1, p.beta2 - h})) /
                          (2.0 * h);
        CHECK(m.mean_edge_sum ==
              doctest::Approx(d1).epsilon(1e-5));
        CHECK(m.mean_two_star_sum ==
              doctest::Approx(d2).epsilon(1e-5));
    }
    const auto zero = moments_exact({6, 0.0, 0.0});
    CHECK(zero.mean_edge_sum == doctest::Approx(0.0));
    // beta = 0: E[(1/n) sum r_i^2] = (1/n) * n * (n-1) = n - 1
    CHECK(zero.mean_two_star_sum == doctest::Approx(5.0));
}

TEST_CASE("mean edge density approaches the limit derivative") {
    // (1/n^2) d ln psi / d b1 -> d/db1 [b1^2/(1-4b2)] = 2 at (1, 0)
    const auto m = moments_exact({4000, 1.0, 0.0});
    CHECK(m.mean_edge_sum / (4000.0 * 4000.0) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("finite-n normalized log psi converges to the limit") {
    const double limit = psi_limit(1.0, 0.1);
    double prev_gap = 1e9;
    for (int n : {10, 50, 250, 1000}) {
        const double v = log_psi_exact({n, 1.0, 0.1}) / (static_cast<double>(n) * n);
        const double gap = std::abs(v - limit);
        CHECK(gap < prev_gap);
        prev_gap = gap;
        if (n == 1000) CHECK(gap < 5e-3);
    }
}

TEST_CASE("spectral facts behind the derivation") {
    // Sigma with diagonal n-1 and off-diagonal 1 has eigenvalue 2(n-1) once
    // and n-2 with multiplicity n-1.
    for (int n : {3, 5, 8}) {
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, 1.0);
        sigma.diagonal().setConstant(n - 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        const auto& ev = es.eigenvalues();
        for (int i = 0; i + 1 < n; ++i) CHECK(std::abs(ev(i) - (n - 2.0)) < 1e-9);
        CHECK(std::abs(ev(n - 1) - 2.0 * (n - 1.0)) < 1e-9);
    }
}

TEST_CASE("mean edge density is smooth in beta1 (non-degeneracy)") {
    // finite differences along beta1 in [-3, 3] at beta2 = 0.2, n = 50:
    // no jump exceeding 10x the local slope scale.
    const int n = 50;
    const double db = 0.05;
    double prev = moments_exact({n, -3.0, 0.2}).mean_edge_sum / (n * n);
    double prev_slope = 0.0;
    bool first = true;
    for (double b1 = -3.0 + db; b1 <= 3.0 + 1e-12; b1 += db) {
        const double cur = moments_exact({n, b1, 0.2}).mean_edge_sum / (n * n);
        const double slope = std::abs(cur - prev) / db;
        if (!first && prev_slope > 1e-12) CHECK(slope < 10.0 * prev_slope);
        prev_slope = slope;
        prev = cur;
        first = false;
    }
}
