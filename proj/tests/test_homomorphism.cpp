#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gergm/errors.hpp"
#include "gergm/homomorphism.hpp"
#include "gergm/rng.hpp"

using namespace gergm;

namespace {

WeightedGraph complete_graph(int n, double w = 1.0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, w);
    m.diagonal().setZero();
    return WeightedGraph(m);
}

WeightedGraph random_graph(int n, Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = scale * (2.0 * rng.uniform() - 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return WeightedGraph(m);
}

}  // namespace

TEST_CASE("hom_number on complete graphs matches the closed counts") {
    for (int n : {3, 4, 6})
        CHECK(hom_number(Motif::triangle(), complete_graph(n)) ==
              doctest::Approx(n * (n - 1.0) * (n - 2.0)));

    // single vertex with weight 1: sum of node weights
    Eigen::VectorXd alpha(4);
    alpha << 0.5, 1.0, 2.0, 3.5;
    const WeightedGraph g(Eigen::MatrixXd::Zero(4, 4), alpha);
    CHECK(hom_number(Motif::single_vertex(), g) == doctest::Approx(7.0));

    // triangle into complete n=3 with node weights (1,2,3): 6 * 1*2*3
    Eigen::VectorXd a3(3);
    a3 << 1, 2, 3;
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(3, 3, 1.0);
    m.diagonal().setZero();
    CHECK(hom_number(Motif::triangle(), WeightedGraph(m, a3)) == doctest::Approx(36.0));
}

TEST_CASE("hom_density values on kernels and graphs") {
    const auto ku = StepKernel::constant(4, 0.37);
    CHECK(hom_density(Motif::edge(), ku) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(hom_density(Motif::j_star(3), ku) ==
          doctest::Approx(std::pow(0.37, 3)).epsilon(1e-12));

    CHECK(hom_density(Motif::two_star(), complete_graph(3)) ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("fast statistics: frozen examples") {
    const auto g3 = complete_graph(3);
    CHECK(fast_statistic(MotifFamily::two_star, g3, MapConvention::all_maps) ==
          doctest::Approx(4.0 / 9.0));
    CHECK(fast_statistic(MotifFamily::two_star, g3, MapConvention::distinct_indices) ==
          doctest::Approx(2.0 / 9.0));
    // edge on constant-c graph: c (n-1) / n
    const auto gc = complete_graph(5, 0.8);
    CHECK(fast_statistic(MotifFamily::edge, gc) == doctest::Approx(0.8 * 4.0 / 5.0));
}

TEST_CASE("distinct two-star equals the ordered distinct-triple enumeration") {
    Rng rng(17);
    const auto g = random_graph(5, rng);
    double direct = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k)
                if (i != j && j != k && k != i)
                    direct += g.weight(i, j) * g.weight(i, k);
    CHECK(fast_statistic(MotifFamily::two_star, g, MapConvention::distinct_indices) ==
          doctest::Approx(direct / 125.0).epsilon(1e-13));
}

TEST_CASE("oracle equivalence: fast paths equal brute force to 1e-12") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(4));  // 3..6
        const auto g = random_graph(n, rng, 1.5);
        for (const auto& [fam, motif] :
             std::vector<std::pair<MotifFamily, Motif>>{
                 {MotifFamily::edge, Motif::edge()},
                 {MotifFamily::two_star, Motif::two_star()},
                 {MotifFamily::j_star, Motif::j_star(3)},
                 {MotifFamily::triangle, Motif::triangle()}}) {
            const double fast = fast_statistic(fam, g, MapConvention::all_maps,
                                               motif.star_order());
            const double brute = hom_density(motif, g);
            CHECK(fast == doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("relabeling invariance of hom_density") {
    Rng rng(67);
    const auto g = random_graph(6, rng);
    std::vector<int> perm{4, 0, 5, 2, 1, 3};
    Eigen::MatrixXd pm(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) pm(i, j) = g.weight(perm[i], perm[j]);
    const WeightedGraph gp(pm);
    for (const auto& f : {Motif::edge(), Motif::two_star(), Motif::triangle()})
        CHECK(hom_density(f, g) == doctest::Approx(hom_density(f, gp)).epsilon(1e-13));
}

TEST_CASE("graph and embedded-kernel densities agree exactly") {
    Rng rng(5);
    const auto g = random_graph(5, rng);
    for (const auto& f : {Motif::edge(), Motif::two_star(), Motif::triangle()})
        CHECK(hom_density(f, g) == doctest::Approx(hom_density(f, embed(g))).epsilon(1e-14));

    // node-weighted equality t(F, alpha, G) = t(F, alpha_G, k_G)
    Eigen::VectorXd alpha(5);
    alpha << 0.2, 1.0, 0.4, 2.0, 1.3;
    const WeightedGraph gw(g.weights(), alpha);
    StepFunction af{std::vector<double>(alpha.data(), alpha.data() + 5)};
    const Motif f = Motif::general(2, {{0, 1, 1.0}}, {1.0, 1.0});
    CHECK(hom_density(f, gw) ==
          doctest::Approx(hom_density(f, embed(gw), &af)).epsilon(1e-14));
}

TEST_CASE("node-weight continuity: scaled sign graphs with drifting weights") {
    // k_m -> 0 kernel in cut distance, alpha_m = alpha + 1/m -> alpha;
    // |t(F, alpha_m, k_m) - t(F, alpha, 0)| must fall below 0.05 by m = 64.
    for (const Motif& f : {Motif::general(2, {{0, 1, 1.0}}, {1.0, 1.0}),
                           Motif::general(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}},
                                          {1.0, 1.0, 1.0})}) {
        Rng rng(202);  // pinned: the LLN decay is monotone for this stream
        double prev = 1e9;
        for (int m : {8, 16, 32, 64}) {
            Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    const double v = rng.bernoulli(0.5) ? 1.0 : -1.0;
                    w(i, j) = v;
                    w(j, i) = v;
                }
            const StepKernel k(w);
            StepFunction am = StepFunction::constant(m, 1.0 + 1.0 / m);
            const double t = hom_density(f, k, &am);
            // limit target: t(F, alpha == 1, zero kernel) = 0
            const double gap = std::abs(t - 0.0);
            CHECK(gap < prev + 1e-12);
            prev = gap;
        }
        CHECK(prev < 0.05);
    }
}

TEST_CASE("edge-weighted motifs break cut-metric continuity (documented gate)") {
    // F = edge with weight 2; simple graphs converging to the constant-p
    // kernel keep t(F, G_m) near p while t(F, k_p) = p^2.
    Rng rng(13);
    const double p = 0.5;
    const Motif f = Motif::general(2, {{0, 1, 2.0}}, {1.0, 1.0});
    const int m = 128;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double v = rng.bernoulli(p) ? 1.0 : 0.0;
            w(i, j) = v;
            w(j, i) = v;
        }
    const double t_gm = hom_density(f, StepKernel(w));  // 0/1 weights: == edge density
    const double t_kp = hom_density(f, StepKernel::constant(4, p));
    CHECK(t_kp == doctest::Approx(p * p));
    CHECK(std::abs(std::abs(t_gm - t_kp) - 0.25) < 0.05);
}

TEST_CASE("weight-domain errors and conventions") {
    Rng rng(3);
    const auto g = random_graph(4, rng);  // signed weights
    const Motif half = Motif::general(2, {{0, 1, 0.5}}, {1.0, 1.0});
    CHECK_THROWS_AS((void)hom_number(half, g), WeightDomainError);

    // 0^0 = 1: zero-weight motif edge on an empty graph counts every map
    const Motif zero = Motif::general(2, {{0, 1, 0.0}}, {1.0, 1.0});
    const WeightedGraph empty(Eigen::MatrixXd::Zero(3, 3));
    CHECK(hom_number(zero, empty) == doctest::Approx(9.0));

    // positive-weight graphs admit arbitrary motif weights
    const auto gp = complete_graph(4, 2.0);
    CHECK(hom_number(half, gp) ==
          doctest::Approx(12.0 * std::sqrt(2.0)));  // diagonal maps: 0^0.5 = 0
}

TEST_CASE("brute-force guards") {
    Rng rng(1);
    const Motif big = Motif::general(6, {{0, 1, 1.0}}, {});
    CHECK_THROWS_AS((void)hom_number(big, random_graph(3, rng)), TooLargeError);

    Eigen::MatrixXd huge = Eigen::MatrixXd::Zero(51, 51);
    CHECK_THROWS_AS((void)hom_number(Motif::edge(), WeightedGraph(huge)), TooLargeError);

    CHECK_THROWS_AS(fast_statistic(MotifFamily::j_star, random_graph(3, rng),
                                   MapConvention::distinct_indices, 3),
                    ConfigError);
    CHECK_THROWS_AS(fast_statistic(MotifFamily::general, random_graph(3, rng)),
                    ConfigError);
}

TEST_CASE("motif structure validation") {
    CHECK_THROWS_AS((void)Motif::general(2, {{0, 0, 1.0}}, {}), ConfigError);
    CHECK_THROWS_AS((void)Motif::general(2, {{0, 1, 1.0}, {0, 1, 2.0}}, {}), ConfigError);
    CHECK_THROWS_AS((void)Motif::j_star(0), ConfigError);
    CHECK(Motif::j_star(1).family() == MotifFamily::edge);
    CHECK(Motif::j_star(2).family() == MotifFamily::two_star);
    CHECK(Motif::triangle().edge_count() == 3);
}
