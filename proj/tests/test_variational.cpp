#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gergm/errors.hpp"
#include "gergm/gaussian_exact.hpp"
#include "gergm/variational.hpp"

using namespace gergm;

namespace {

ModelSpec edge_two_star(const BaseMeasure& base, double b1, double b2) {
    return {{{Motif::edge(), b1}, {Motif::two_star(), b2}}, base,
            MapConvention::all_maps};
}

ModelSpec edge_triangle(const BaseMeasure& base, double b1, double b2) {
    return {{{Motif::edge(), b1}, {Motif::triangle(), b2}}, base,
            MapConvention::all_maps};
}

}  // namespace

TEST_CASE("solve: gaussian edge-two-star closed forms") {
    const auto base = BaseMeasure::gaussian(0.0, 1.0);
    {
        const auto s = solve(edge_two_star(base, 1.0, 0.0));
        CHECK(s.psi == doctest::Approx(1.0).epsilon(1e-9));
        REQUIRE(s.maximizers.size() == 1);
        CHECK(s.maximizers[0] == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(!s.degenerate);
        CHECK(s.coercive);
    }
    {
        const auto s = solve(edge_two_star(base, 0.1, 0.1));
        CHECK(s.psi == doctest::Approx(0.01 / 0.6).epsilon(1e-9));
        REQUIRE(s.maximizers.size() == 1);
        CHECK(s.maximizers[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    }
}

TEST_CASE("solve at beta = 0: psi 0, maximizer at the base mean") {
    for (const auto& base :
         {BaseMeasure::gaussian(0.7, 2.0), BaseMeasure::bernoulli(0.5),
          BaseMeasure::poisson(1.0), BaseMeasure::quartic()}) {
        const auto s = solve(edge_two_star(base, 0.0, 0.0));
        CHECK(std::abs(s.psi) < 1e-9);
        REQUIRE(s.maximizers.size() == 1);
        CHECK(s.maximizers[0] == doctest::Approx(base.mean()).epsilon(1e-6));
    }
}

TEST_CASE("first-order condition holds at returned maximizers") {
    const auto spec = edge_two_star(BaseMeasure::gaussian(0.0, 1.0), 0.4, 0.15);
    RateFunction h(spec.base);
    const auto s = solve(spec, h);
    auto g = objective(spec, h);
    for (double u : s.maximizers) {
        const double step = 1e-5;
        const double deriv = (g(u + step) - g(u - step)) / (2.0 * step);
        CHECK(std::abs(deriv) < 1e-7);
    }
}

TEST_CASE("gaussian consistency across a 20x20 parameter grid") {
    const auto base = BaseMeasure::gaussian(0.0, 1.0);
    RateFunction h(base);
    for (int a = 0; a < 20; ++a)
        for (int b = 0; b < 20; ++b) {
            const double b1 = -2.0 + 4.0 * a / 19.0;
            const double b2 = -1.0 + (0.24 + 1.0) * b / 19.0;
            const auto s = solve(edge_two_star(base, b1, b2), h);
            CHECK(s.psi == doctest::Approx(psi_limit(b1, b2)).epsilon(1e-7));
        }
}

TEST_CASE("solve is stable under scan-grid refinement") {
    const auto spec = edge_two_star(BaseMeasure::gaussian(0.0, 1.0), -2.0, 0.2);
    SolveOptions coarse;
    SolveOptions fine;
    fine.scan_points = 2 * (coarse.scan_points - 1) + 1;
    const double p1 = solve(spec, coarse).psi;
    const double p2 = solve(spec, fine).psi;
    CHECK(std::abs(p1 - p2) < 1e-9);
}

TEST_CASE("coercivity failure raises the dedicated error") {
    const auto base = BaseMeasure::gaussian(0.0, 1.0);
    CHECK_THROWS_AS((void)solve(edge_two_star(base, 0.1, 0.3)), NonCoerciveError);
    // cubic star tilt over a gaussian base blows up on one side
    ModelSpec cubic{{{Motif::edge(), 0.0}, {Motif::j_star(3), -0.1}}, base,
                    MapConvention::all_maps};
    CHECK_THROWS_AS((void)solve(cubic), NonCoerciveError);
}

TEST_CASE("admissibility validation") {
    const auto gauss = BaseMeasure::gaussian(0.0, 1.0);
    const auto bern = BaseMeasure::bernoulli(0.5);
    // triangle over a signed base: odd edge count, no scalar reduction
    CHECK_THROWS_AS(validate_path(edge_triangle(gauss, 0.1, 0.1)), AdmissibilityError);
    // negative triangle coefficient even over a non-negative base
    CHECK_THROWS_AS(validate_path(edge_triangle(bern, 0.1, -0.1)), AdmissibilityError);
    // bernoulli edge-triangle with beta2 >= 0 is fine
    CHECK(validate_path(edge_triangle(bern, -0.8, 0.5)) == SolverPath::polynomial);
    // stars carry no sign restriction
    ModelSpec stars{{{Motif::edge(), -1.0}, {Motif::j_star(3), -0.2}}, bern,
                    MapConvention::all_maps};
    CHECK(validate_path(stars) == SolverPath::star_family);
    CHECK(std::isfinite(solve(stars).psi));
    // weighted motifs are rejected
    ModelSpec weighted{{{Motif::general(2, {{0, 1, 2.0}}, {}), 1.0}}, gauss,
                       MapConvention::all_maps};
    CHECK_THROWS_AS(validate_path(weighted), AdmissibilityError);
}

TEST_CASE("phase_scan: smooth gaussian family produces zero flags") {
    const auto spec = edge_two_star(BaseMeasure::gaussian(0.0, 1.0), -2.0, 0.0);
    std::vector<std::vector<double>> grid;
    for (double b2 = 0.0; b2 <= 0.24 + 1e-12; b2 += 0.005)
        grid.push_back({-2.0, b2});
    PhaseScanOptions opts;
    opts.jobs = 2;
    const auto scan = phase_scan(spec, grid, {}, opts);
    CHECK(scan.flag_count() == 0);
    CHECK(scan.boundaries.empty());
    for (const auto& p : scan.points) {
        REQUIRE(p.solution.has_value());
        const double expect = 2.0 * (-2.0) / (1.0 - 4.0 * p.beta[1]);
        CHECK(std::abs(p.solution->maximizers.front() - expect) < 1e-6);
    }
}

TEST_CASE("phase_scan: bernoulli edge-triangle crosses a first-order boundary") {
    const auto spec = edge_triangle(BaseMeasure::bernoulli(0.5), -0.8, 0.0);
    std::vector<std::vector<double>> grid;
    for (double b2 = 0.0; b2 <= 2.0 + 1e-12; b2 += 0.05)
        grid.push_back({-0.8, b2});
    PhaseScanOptions opts;
    opts.jobs = 2;
    const auto scan = phase_scan(spec, grid, {}, opts);
    CHECK(scan.flag_count() >= 1);
    REQUIRE(!scan.boundaries.empty());
    const auto& seg = scan.boundaries.front();
    // the bisected tie point carries two co-maximizers with equal values
    CHECK(seg.u_high > seg.u_low + 0.2);
    CHECK(std::abs(seg.g_high - seg.g_low) < 1e-6);
    // dense brute-force verification of the tie at step 1e-5
    RateFunction h(spec.base);
    auto g = objective(spec.with_betas(seg.beta_star), h);
    double best_low = -1e300, best_high = -1e300;
    for (double u = 0.0; u <= 1.0 + 1e-12; u += 1e-5) {
        const double v = g(u);
        if (u < 0.5 * (seg.u_low + seg.u_high))
            best_low = std::max(best_low, v);
        else
            best_high = std::max(best_high, v);
    }
    CHECK(std::abs(best_low - best_high) < 1e-6);
}

TEST_CASE("phase_scan: single point equals solve; errors propagate per point") {
    const auto spec = edge_two_star(BaseMeasure::gaussian(0.0, 1.0), 0.1, 0.1);
    const auto scan = phase_scan(spec, {{0.1, 0.1}, {0.1, 0.30}});
    REQUIRE(scan.points.size() == 2);
    REQUIRE(scan.points[0].solution.has_value());
    CHECK(scan.points[0].solution->psi ==
          doctest::Approx(solve(spec).psi).epsilon(1e-12));
    CHECK(!scan.points[1].solution.has_value());
    CHECK(!scan.points[1].error.empty());
}

TEST_CASE("c2prime bound: monotone in l and in M, eps flag") {
    // decreasing in l at fixed (M, eps): exact log-space differences
    for (double M : {1.0, 10.0, 100.0}) {
        const double d1 = c2prime_bound_l_difference(1.0, 1.0, M, 0.1, 5.0, 10.0);
        const double d2 = c2prime_bound_l_difference(1.0, 1.0, M, 0.1, 10.0, 20.0);
        CHECK(d1 <= 0.0);
        CHECK(d2 <= 0.0);
        // the tail term itself decreases strictly
        const auto a = c2prime_bound(1.0, 1.0, M, 5.0, 0.1);
        const auto b = c2prime_bound(1.0, 1.0, M, 10.0, 0.1);
        const auto c = c2prime_bound(1.0, 1.0, M, 20.0, 0.1);
        CHECK(b.log_tail_term < a.log_tail_term);
        CHECK(c.log_tail_term < b.log_tail_term);
        CHECK(b.bound <= a.bound);
        CHECK(c.bound <= b.bound);
    }
    // decreasing in M at fixed (l, eps): -M eps dominates
    for (double l : {5.0, 10.0, 20.0}) {
        const double b1 = c2prime_bound(1.0, 1.0, 1.0, l, 0.1).bound;
        const double b10 = c2prime_bound(1.0, 1.0, 10.0, l, 0.1).bound;
        const double b100 = c2prime_bound(1.0, 1.0, 100.0, l, 0.1).bound;
        CHECK(b10 < b1);
        CHECK(b100 < b10);
    }
    CHECK(c2prime_bound(1.0, 1.0, 10.0, 10.0, 0.0).eps_is_zero);
    CHECK(!c2prime_bound(1.0, 1.0, 10.0, 10.0, 0.1).eps_is_zero);
    CHECK_THROWS_AS((void)c2prime_bound(1.0, 1.0, -1.0, 10.0, 0.1), ConfigError);
}

TEST_CASE("maximizer count stays within the degree bound") {
    const auto s = solve(edge_triangle(BaseMeasure::bernoulli(0.5), -0.8, 0.885));
    CHECK(s.maximizers.size() <= 4);
}
