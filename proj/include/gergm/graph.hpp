// Weighted graphs, their step-kernel embedding, and the truncation operator.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gergm {

// Symmetric real edge-weight matrix with zero diagonal; optional
// non-negative node weights.
class WeightedGraph {
  public:
    explicit WeightedGraph(int n);
    WeightedGraph(Eigen::MatrixXd weights,
                  std::optional<Eigen::VectorXd> node_weights = {});

    static WeightedGraph from_edges(
        int n, const std::vector<std::tuple<int, int, double>>& edges,
        std::optional<Eigen::VectorXd> node_weights = {});

    int n() const { return static_cast<int>(w_.rows()); }
    const Eigen::MatrixXd& weights() const { return w_; }
    double weight(int i, int j) const { return w_(i, j); }
    void set_weight(int i, int j, double v);  // symmetric update, i != j

    bool has_node_weights() const { return node_weights_.has_value(); }
    const Eigen::VectorXd& node_weights() const { return *node_weights_; }

    double edge_sum() const;        // sum_{i != j} w_ij
    double mean_edge_weight() const;  // edge_sum / (n (n-1))
    Eigen::VectorXd row_sums() const { return w_.rowwise().sum(); }

  private:
    void validate() const;
    Eigen::MatrixXd w_;
    std::optional<Eigen::VectorXd> node_weights_;
};

// Piecewise-constant symmetric function on [0,1]^2 at resolution n:
// cell (i, j) covers J_i x J_j with J_i = ((i-1)/n, i/n].
struct StepKernel {
    Eigen::MatrixXd values;

    explicit StepKernel(Eigen::MatrixXd v);
    static StepKernel constant(int resolution, double u);

    int resolution() const { return static_cast<int>(values.rows()); }
    double average() const { return values.mean(); }
};

// Graph -> step kernel; cell (i, j) carries weights[i][j].
StepKernel embed(const WeightedGraph& g);

// Entry-wise decomposition k = f_l(k) + g_l(k) with |f_l| <= l.
std::pair<StepKernel, StepKernel> truncate(const StepKernel& k, double l);

// Scalar truncation rule.
double clamp_to_band(double q, double l);

}  // namespace gergm
