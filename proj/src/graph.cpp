#include "gergm/graph.hpp"

#include <cmath>

#include "gergm/errors.hpp"

namespace gergm {

WeightedGraph::WeightedGraph(int n) : w_(Eigen::MatrixXd::Zero(n, n)) {
    if (n < 1) throw ConfigError("WeightedGraph: n must be >= 1");
}

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights,
                             std::optional<Eigen::VectorXd> node_weights)
    : w_(std::move(weights)), node_weights_(std::move(node_weights)) {
    validate();
}

WeightedGraph WeightedGraph::from_edges(
    int n, const std::vector<std::tuple<int, int, double>>& edges,
    std::optional<Eigen::VectorXd> node_weights) {
    WeightedGraph g(n);
    for (const auto& [i, j, w] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw ConfigError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range for n=" + std::to_string(n));
        if (i == j) throw ConfigError("self-loops are not allowed");
        g.w_(i, j) = w;
        g.w_(j, i) = w;
    }
    g.node_weights_ = std::move(node_weights);
    g.validate();
    return g;
}

void WeightedGraph::set_weight(int i, int j, double v) {
    if (i == j) throw ConfigError("set_weight: diagonal is fixed at zero");
    w_(i, j) = v;
    w_(j, i) = v;
}

void WeightedGraph::validate() const {
    if (w_.rows() != w_.cols()) throw ConfigError("weights matrix must be square");
    const int n = static_cast<int>(w_.rows());
    for (int i = 0; i < n; ++i) {
        if (w_(i, i) != 0.0) throw ConfigError("weights must have zero diagonal");
        for (int j = i + 1; j < n; ++j)
            if (w_(i, j) != w_(j, i))
                throw ConfigError("weights must be symmetric");
    }
    if (node_weights_) {
        if (node_weights_->size() != n)
            throw ConfigError("node_weights length must equal n");
        for (int i = 0; i < n; ++i)
            if ((*node_weights_)(i) < 0.0)
                throw ConfigError("node_weights must be non-negative");
    }
}

double WeightedGraph::edge_sum() const { return w_.sum(); }

double WeightedGraph::mean_edge_weight() const {
    const int n = this->n();
    if (n < 2) return 0.0;
    return edge_sum() / (static_cast<double>(n) * (n - 1));
}

StepKernel::StepKernel(Eigen::MatrixXd v) : values(std::move(v)) {
    if (values.rows() != values.cols())
        throw ConfigError("StepKernel: values must be square");
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = i + 1; j < values.cols(); ++j)
            if (values(i, j) != values(j, i))
                throw ConfigError("StepKernel: values must be symmetric");
}

StepKernel StepKernel::constant(int resolution, double u) {
    return StepKernel(Eigen::MatrixXd::Constant(resolution, resolution, u));
}

StepKernel embed(const WeightedGraph& g) { return StepKernel(g.weights()); }

double clamp_to_band(double q, double l) {
    if (q > l) return l;
    if (q < -l) return -l;
    return q;
}

std::pair<StepKernel, StepKernel> truncate(const StepKernel& k, double l) {
    if (!(l > 0.0)) throw ConfigError("truncate: level must be > 0");
    Eigen::MatrixXd f = k.values.unaryExpr([l](double q) { return clamp_to_band(q, l); });
    Eigen::MatrixXd g = k.values - f;
    return {StepKernel(std::move(f)), StepKernel(std::move(g))};
}

}  // namespace gergm
