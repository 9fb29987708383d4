#include "gergm/homomorphism.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gergm/errors.hpp"

namespace gergm {

namespace {

constexpr int kMaxBruteVertices = 5;
constexpr int kMaxBruteN = 50;

bool is_integer(double x) { return x == std::floor(x); }

// Weight power with the 0^0 = 1 convention; refuses negative bases with
// non-integer exponents.
double weight_pow(double base, double expo, int fi, int fj) {
    if (expo == 0.0) return 1.0;
    if (expo == 1.0) return base;
    if (base < 0.0 && !is_integer(expo))
        throw WeightDomainError(
            "ill-defined power: base " + std::to_string(base) + " at motif edge (" +
            std::to_string(fi) + "," + std::to_string(fj) + ") with exponent " +
            std::to_string(expo));
    if (base == 0.0) return expo > 0.0 ? 0.0 : std::pow(base, expo);
    if (is_integer(expo) && std::abs(expo) <= 8.0) {
        double r = 1.0;
        const double b = expo > 0 ? base : 1.0 / base;
        for (int k = 0; k < static_cast<int>(std::abs(expo)); ++k) r *= b;
        return r;
    }
    return std::pow(base, expo);
}

double node_weight_pow(double alpha_g, double alpha_f) {
    if (alpha_f == 0.0) return 1.0;
    if (alpha_f == 1.0) return alpha_g;
    if (alpha_g < 0.0 && !is_integer(alpha_f))
        throw WeightDomainError("node weight " + std::to_string(alpha_g) +
                                " negative with non-integer motif weight");
    return std::pow(alpha_g, alpha_f);
}

}  // namespace

Motif::Motif(MotifFamily fam, int vertices, std::vector<MotifEdge> edges,
             std::vector<double> node_weights, int star_order)
    : family_(fam),
      vertices_(vertices),
      edges_(std::move(edges)),
      node_weights_(std::move(node_weights)),
      star_order_(star_order) {
    if (node_weights_.empty()) node_weights_.assign(vertices_, 1.0);
    validate();
}

void Motif::validate() const {
    if (vertices_ < 1) throw ConfigError("motif: needs at least one vertex");
    if (static_cast<int>(node_weights_.size()) != vertices_)
        throw ConfigError("motif: node weight count must match vertices");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
        if (e.i < 0 || e.j < 0 || e.i >= vertices_ || e.j >= vertices_)
            throw ConfigError("motif: edge endpoint out of range");
        if (e.i == e.j) throw ConfigError("motif: self-loops are not allowed");
        auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second)
            throw ConfigError("motif: duplicate edge");
    }
    // family consistency
    auto has_edge = [&](int a, int b) {
        return seen.count(std::minmax(a, b)) > 0;
    };
    switch (family_) {
        case MotifFamily::edge:
            if (vertices_ != 2 || edges_.size() != 1)
                throw ConfigError("edge motif must have 2 vertices, 1 edge");
            break;
        case MotifFamily::two_star:
        case MotifFamily::j_star: {
            const int j = star_order_;
            if (vertices_ != j + 1 || static_cast<int>(edges_.size()) != j)
                throw ConfigError("j-star motif must have j+1 vertices, j edges");
            for (int leaf = 1; leaf <= j; ++leaf)
                if (!has_edge(0, leaf))
                    throw ConfigError("j-star motif: vertex 0 must meet every leaf");
            break;
        }
        case MotifFamily::triangle:
            if (vertices_ != 3 || edges_.size() != 3)
                throw ConfigError("triangle motif must have 3 vertices, 3 edges");
            break;
        case MotifFamily::general:
            break;
    }
}

bool Motif::unit_weights() const {
    for (const auto& e : edges_)
        if (e.weight != 1.0) return false;
    for (double a : node_weights_)
        if (a != 1.0) return false;
    return true;
}

std::string Motif::describe() const {
    switch (family_) {
        case MotifFamily::edge: return "edge";
        case MotifFamily::two_star: return "two_star";
        case MotifFamily::j_star: return std::to_string(star_order_) + "_star";
        case MotifFamily::triangle: return "triangle";
        case MotifFamily::general:
            return "general(v=" + std::to_string(vertices_) +
                   ",e=" + std::to_string(edges_.size()) + ")";
    }
    return "?";
}

Motif Motif::edge() { return {MotifFamily::edge, 2, {{0, 1, 1.0}}, {}, 1}; }

Motif Motif::two_star() {
    return {MotifFamily::two_star, 3, {{0, 1, 1.0}, {0, 2, 1.0}}, {}, 2};
}

Motif Motif::j_star(int j) {
    if (j < 1) throw ConfigError("j_star: j must be >= 1");
    if (j == 1) return edge();
    std::vector<MotifEdge> es;
    for (int leaf = 1; leaf <= j; ++leaf) es.push_back({0, leaf, 1.0});
    return {j == 2 ? MotifFamily::two_star : MotifFamily::j_star, j + 1,
            std::move(es), {}, j};
}

Motif Motif::triangle() {
    return {MotifFamily::triangle, 3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}, {}, 0};
}

Motif Motif::single_vertex(double node_weight) {
    return {MotifFamily::general, 1, {}, {node_weight}, 0};
}

Motif Motif::general(int vertices, std::vector<MotifEdge> edges,
                     std::vector<double> node_weights) {
    return {MotifFamily::general, vertices, std::move(edges),
            std::move(node_weights), 0};
}

namespace {

// Shared brute-force loop: target cell weights W (graph weights or kernel
// cell values), optional multiplicative node factor per target index.
// Graphs carry the flat oracle cap n <= 50; kernel cell sums (the defining
// integral) are capped by total map count instead.
double brute_force_sum(const Motif& f, const Eigen::MatrixXd& w,
                       const std::vector<double>* node_factor_base,
                       const std::vector<double>& alpha_f, bool is_graph) {
    const int n = static_cast<int>(w.rows());
    const int v = f.vertices();
    if (v > kMaxBruteVertices)
        throw TooLargeError("brute-force homomorphism limited to motifs with <= " +
                            std::to_string(kMaxBruteVertices) + " vertices");
    if (is_graph && n > kMaxBruteN)
        throw TooLargeError("brute-force homomorphism limited to graphs with n <= " +
                            std::to_string(kMaxBruteN));
    if (!is_graph && std::pow(static_cast<double>(n), v) > 5e8)
        throw TooLargeError("kernel homomorphism cell sum too large (n^|V(F)| > 5e8)");

    std::vector<int> phi(v, 0);
    double total = 0.0;
    while (true) {
        double term = 1.0;
        if (node_factor_base) {
            for (int a = 0; a < v && term != 0.0; ++a)
                term *= node_weight_pow((*node_factor_base)[phi[a]], alpha_f[a]);
        }
        if (term != 0.0) {
            for (const auto& e : f.edges()) {
                term *= weight_pow(w(phi[e.i], phi[e.j]), e.weight, e.i, e.j);
                if (term == 0.0) break;
            }
        }
        total += term;
        int pos = v - 1;
        while (pos >= 0 && ++phi[pos] == n) phi[pos--] = 0;
        if (pos < 0) break;
    }
    return total;
}

}  // namespace

double hom_number(const Motif& f, const WeightedGraph& g) {
    std::vector<double> alpha_g;
    const std::vector<double>* base = nullptr;
    std::vector<double> alpha_f = f.node_weights();
    const bool motif_weighted =
        std::any_of(alpha_f.begin(), alpha_f.end(), [](double a) { return a != 1.0; });
    if (g.has_node_weights() || motif_weighted) {
        alpha_g.resize(g.n(), 1.0);
        if (g.has_node_weights())
            for (int i = 0; i < g.n(); ++i) alpha_g[i] = g.node_weights()(i);
        base = &alpha_g;
    }
    return brute_force_sum(f, g.weights(), base, alpha_f, true);
}

double hom_density(const Motif& f, const WeightedGraph& g) {
    return hom_number(f, g) / std::pow(static_cast<double>(g.n()), f.vertices());
}

double hom_density(const Motif& f, const StepKernel& k, const StepFunction* alpha) {
    const int n = k.resolution();
    std::vector<double> a;
    const std::vector<double>* base = nullptr;
    if (alpha) {
        if (static_cast<int>(alpha->values.size()) != n)
            throw ConfigError("hom_density: alpha resolution mismatch");
        a = alpha->values;
        base = &a;
    }
    return brute_force_sum(f, k.values, base, f.node_weights(), false) /
           std::pow(static_cast<double>(n), f.vertices());
}

double fast_statistic(MotifFamily tag, const WeightedGraph& g,
                      MapConvention convention, int j) {
    const int n = g.n();
    const double dn = static_cast<double>(n);
    const Eigen::MatrixXd& w = g.weights();
    switch (tag) {
        case MotifFamily::edge:
            return w.sum() / (dn * dn);
        case MotifFamily::two_star: {
            const Eigen::VectorXd r = w.rowwise().sum();
            double s = r.squaredNorm();
            if (convention == MapConvention::distinct_indices)
                s -= w.squaredNorm();
            return s / (dn * dn * dn);
        }
        case MotifFamily::j_star: {
            if (j < 1) throw ConfigError("fast_statistic: j_star needs j >= 1");
            if (convention == MapConvention::distinct_indices && j > 2)
                throw ConfigError("distinct-indices form only available for edge "
                                  "and two-star statistics");
            if (j == 2) return fast_statistic(MotifFamily::two_star, g, convention);
            if (j == 1) return fast_statistic(MotifFamily::edge, g, convention);
            const Eigen::VectorXd r = w.rowwise().sum();
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += std::pow(r(i), j);
            return s / std::pow(dn, j + 1);
        }
        case MotifFamily::triangle: {
            // Zero diagonal already restricts the trace to distinct triples.
            const double tr = (w * w * w).trace();
            return tr / (dn * dn * dn);
        }
        case MotifFamily::general:
            throw ConfigError("fast_statistic: no fast path for general motifs");
    }
    throw ConfigError("fast_statistic: unknown tag");
}

double statistic(const Motif& f, const WeightedGraph& g, MapConvention convention) {
    if (f.family() != MotifFamily::general && f.unit_weights())
        return fast_statistic(f.family(), g, convention, f.star_order());
    if (convention == MapConvention::distinct_indices)
        throw ConfigError("distinct-indices statistics require a star/edge family");
    return hom_density(f, g);
}

}  // namespace gergm
