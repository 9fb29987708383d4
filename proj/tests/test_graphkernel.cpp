#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "gergm/cut_distance.hpp"
#include "gergm/errors.hpp"
#include "gergm/graph.hpp"
#include "gergm/rng.hpp"

using namespace gergm;

namespace {

StepKernel random_kernel(int n, Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = scale * (2.0 * rng.uniform() - 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return StepKernel(std::move(m));
}

StepKernel random_sign_kernel(int n, Rng& rng) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.bernoulli(0.5) ? 1.0 : -1.0;
            m(i, j) = v;
            m(j, i) = v;
        }
    return StepKernel(std::move(m));
}

}  // namespace

TEST_CASE("graph validation and embedding") {
    auto g = WeightedGraph::from_edges(2, {{0, 1, 3.0}});
    const auto k = embed(g);
    CHECK(k.resolution() == 2);
    CHECK(k.values(0, 1) == 3.0);
    CHECK(k.values(1, 0) == 3.0);
    CHECK(k.values(0, 0) == 0.0);

    const auto k1 = embed(WeightedGraph(1));
    CHECK(k1.resolution() == 1);
    CHECK(k1.values(0, 0) == 0.0);

    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS((void)WeightedGraph(bad), ConfigError);
    Eigen::MatrixXd diag(2, 2);
    diag << 1, 0, 0, 0;
    CHECK_THROWS_AS((void)WeightedGraph(diag), ConfigError);
    Eigen::VectorXd nw(2);
    nw << 1.0, -0.5;
    CHECK_THROWS_AS((void)WeightedGraph(Eigen::MatrixXd::Zero(2, 2), nw), ConfigError);
}

TEST_CASE("truncation clipping rule and idempotence") {
    CHECK(clamp_to_band(7.0, 5.0) == 5.0);    // f = 5, g = 2
    CHECK(clamp_to_band(-7.0, 5.0) == -5.0);  // f = -5, g = -2
    CHECK(clamp_to_band(3.0, 5.0) == 3.0);

    Eigen::MatrixXd m(2, 2);
    m << 0, 7, 7, 0;
    const auto [f, g] = truncate(StepKernel(m), 5.0);
    CHECK(f.values(0, 1) == 5.0);
    CHECK(g.values(0, 1) == 2.0);
    CHECK(((f.values + g.values) - m).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd mm(3, 3);
    mm << 0, -7, 3, -7, 0, 0.5, 3, 0.5, 0;
    const auto [f2, g2] = truncate(StepKernel(mm), 5.0);
    CHECK(f2.values(0, 1) == -5.0);
    CHECK(g2.values(0, 1) == -2.0);
    CHECK(f2.values.cwiseAbs().maxCoeff() <= 5.0);
    // idempotent in the first slot
    const auto [f3, g3] = truncate(f2, 5.0);
    CHECK((f3.values - f2.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g3.values.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(truncate(StepKernel(mm), 0.0), ConfigError);
    CHECK_THROWS_AS(truncate(StepKernel(mm), -1.0), ConfigError);
}

TEST_CASE("cut distance d: identical, constants, and resolution guards") {
    Rng rng(11);
    const auto k = random_kernel(6, rng);
    CHECK(cut_distance_d(k, k, CutMode::exact) == 0.0);

    // constants: optimum at A = B = [0,1], |u - v|; verified at n = 4
    const auto u = StepKernel::constant(4, 0.7);
    const auto v = StepKernel::constant(4, -0.4);
    CHECK(cut_distance_d(u, v, CutMode::exact) == doctest::Approx(1.1).epsilon(1e-14));

    CHECK_THROWS_AS(cut_distance_d(StepKernel::constant(23, 0.0),
                                   StepKernel::constant(23, 1.0), CutMode::exact),
                    TooLargeError);
    CHECK_THROWS_AS(cut_distance_d(StepKernel::constant(3, 0.0),
                                   StepKernel::constant(4, 0.0), CutMode::exact),
                    ConfigError);
}

TEST_CASE("exact d agrees with a direct subset/subset maximisation at n=4") {
    // independent oracle: enumerate both S and T explicitly
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const auto k1 = random_kernel(4, rng);
        const auto k2 = random_kernel(4, rng);
        const Eigen::MatrixXd diff = k1.values - k2.values;
        double best = 0.0;
        for (int s = 0; s < 16; ++s)
            for (int t = 0; t < 16; ++t) {
                double acc = 0.0;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        if ((s >> i & 1) && (t >> j & 1)) acc += diff(i, j);
                best = std::max(best, std::abs(acc));
            }
        best /= 16.0;
        CHECK(cut_distance_d(k1, k2, CutMode::exact) ==
              doctest::Approx(best).epsilon(1e-13));
    }
}

TEST_CASE("heuristic d is a lower bound and usually tight at n=8") {
    Rng rng(101);
    int equal = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const auto k1 = random_sign_kernel(8, rng);
        const auto k2 = random_sign_kernel(8, rng);
        CutOptions opts;
        opts.seed = 1000 + t;
        const double ex = cut_distance_d(k1, k2, CutMode::exact, opts);
        const double he = cut_distance_d(k1, k2, CutMode::heuristic, opts);
        CHECK(he <= ex + 1e-12);
        if (std::abs(he - ex) < 1e-12) ++equal;
    }
    CHECK(equal >= 95);
}

TEST_CASE("delta: relabeling invariance and constants") {
    Rng rng(77);
    const auto k = random_kernel(6, rng);
    std::vector<int> perm{3, 1, 5, 0, 2, 4};
    const auto kp = relabel(k, perm);
    CHECK(cut_distance_delta(k, kp, CutMode::exact) == doctest::Approx(0.0));
    // d is invariant under simultaneous identical relabeling
    const auto k2 = random_kernel(6, rng);
    const auto k2p = relabel(k2, perm);
    CHECK(cut_distance_d(k, k2, CutMode::exact) ==
          doctest::Approx(cut_distance_d(kp, k2p, CutMode::exact)).epsilon(1e-13));

    const auto u = StepKernel::constant(5, 1.25);
    const auto v = StepKernel::constant(5, 0.5);
    CHECK(cut_distance_delta(u, v, CutMode::exact) == doctest::Approx(0.75));

    CHECK_THROWS_AS(cut_distance_delta(StepKernel::constant(9, 0.0),
                                       StepKernel::constant(9, 1.0), CutMode::exact),
                    TooLargeError);
}

TEST_CASE("delta heuristic upper-bounds exact and is often equal at n=6") {
    Rng rng(303);
    int equal = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const auto k1 = random_kernel(6, rng);
        const auto k2 = random_kernel(6, rng);
        CutOptions opts;
        opts.seed = 5000 + t;
        const double ex = cut_distance_delta(k1, k2, CutMode::exact, opts);
        const double he = cut_distance_delta(k1, k2, CutMode::heuristic, opts);
        CHECK(he >= ex - 1e-12);
        if (he - ex < 1e-12) ++equal;
    }
    CHECK(equal >= 80);
}

TEST_CASE("delta <= d always (identity is one relabeling)") {
    Rng rng(99);
    for (int t = 0; t < 30; ++t) {
        const auto k1 = random_kernel(6, rng);
        const auto k2 = random_kernel(6, rng);
        CHECK(cut_distance_delta(k1, k2, CutMode::exact) <=
              cut_distance_d(k1, k2, CutMode::exact) + 1e-12);
    }
}

TEST_CASE("triangle inequality for d on random triples (n=6, exact)") {
    Rng rng(404);
    for (int t = 0; t < 40; ++t) {
        const auto a = random_kernel(6, rng);
        const auto b = random_kernel(6, rng);
        const auto c = random_kernel(6, rng);
        const double ab = cut_distance_d(a, b, CutMode::exact);
        const double bc = cut_distance_d(b, c, CutMode::exact);
        const double ac = cut_distance_d(a, c, CutMode::exact);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("distance to constant set") {
    const auto k = StepKernel::constant(5, 1.0);
    std::vector<double> K1{1.0};
    CHECK(distance_to_constant_set(k, K1, CutMode::exact) == doctest::Approx(0.0));
    std::vector<double> K2{0.0, 3.0};
    CHECK(distance_to_constant_set(k, K2, CutMode::exact) == doctest::Approx(1.0));
    CHECK_THROWS_AS(distance_to_constant_set(k, std::vector<double>{}, CutMode::exact),
                    ConfigError);
}

TEST_CASE("refinement preserves d") {
    Rng rng(31);
    const auto k1 = random_kernel(3, rng);
    const auto k2 = random_kernel(3, rng);
    const double d0 = cut_distance_d(k1, k2, CutMode::exact);
    const double d1 = cut_distance_d(refine(k1, 2), refine(k2, 2), CutMode::exact);
    CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
    const auto [a, b] = refine_to_common(random_kernel(2, rng), random_kernel(3, rng));
    CHECK(a.resolution() == 6);
    CHECK(b.resolution() == 6);
}

TEST_CASE("exact d parallel sweep matches serial at n=13") {
    Rng rng(2024);
    const auto k1 = random_kernel(13, rng);
    const auto k2 = random_kernel(13, rng);
    CutOptions serial;
    serial.jobs = 1;
    CutOptions par;
    par.jobs = 4;
    CHECK(cut_distance_d(k1, k2, CutMode::exact, serial) ==
          cut_distance_d(k1, k2, CutMode::exact, par));
}
