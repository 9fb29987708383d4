// Weighted homomorphism numbers and densities t(F, alpha, G) for node- and
// edge-weighted motifs into weighted graphs and step kernels, plus closed
// fast paths for edges, j-stars and triangles.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gergm/graph.hpp"

namespace gergm {

enum class MotifFamily { edge, two_star, j_star, triangle, general };

// Which maps the star statistics sum over: every map V(F) -> V(G), or only
// maps with pairwise-distinct images of the star's leaves.
enum class MapConvention { all_maps, distinct_indices };

struct MotifEdge {
    int i;
    int j;
    double weight;  // A^F_ij
};

// Simple motif F = (V, E, edge weights, node weights).
class Motif {
  public:
    static Motif edge();
    static Motif two_star();
    static Motif j_star(int j);
    static Motif triangle();
    static Motif single_vertex(double node_weight = 1.0);
    static Motif general(int vertices, std::vector<MotifEdge> edges,
                         std::vector<double> node_weights = {});

    int vertices() const { return vertices_; }
    const std::vector<MotifEdge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<double>& node_weights() const { return node_weights_; }
    MotifFamily family() const { return family_; }
    int star_order() const { return star_order_; }  // j for j_star family
    bool unit_weights() const;                      // all A^F = 1, alpha^F = 1
    std::string describe() const;

  private:
    Motif(MotifFamily fam, int vertices, std::vector<MotifEdge> edges,
          std::vector<double> node_weights, int star_order);
    void validate() const;

    MotifFamily family_;
    int vertices_;
    std::vector<MotifEdge> edges_;
    std::vector<double> node_weights_;
    int star_order_;
};

// Node-weight step function alpha on [0,1] for kernels (one value per cell).
struct StepFunction {
    std::vector<double> values;
    static StepFunction constant(int resolution, double v) {
        return {std::vector<double>(resolution, v)};
    }
};

// Brute-force weighted homomorphism number over all maps V(F) -> V(G);
// O(n^{|V(F)|}), guarded to |V(F)| <= 5 and n <= 50.
double hom_number(const Motif& f, const WeightedGraph& g);

// hom_number / n^{|V(F)|}.
double hom_density(const Motif& f, const WeightedGraph& g);

// Kernel version: exact cell sum of the defining integral. alpha defaults
// to the constant 1 function.
double hom_density(const Motif& f, const StepKernel& k,
                   const StepFunction* alpha = nullptr);

// Closed-form statistics that agree exactly with hom_density(all_maps):
//   edge           sum_{i != j} w_ij / n^2
//   two_star       sum_i r_i^2 / n^3   (distinct: subtract sum w_ij^2)
//   j_star         sum_i r_i^j / n^{j+1}
//   triangle       trace(W^3) / n^3
double fast_statistic(MotifFamily tag, const WeightedGraph& g,
                      MapConvention convention = MapConvention::all_maps,
                      int j = 0);

// Convenience: fast path when the motif family supports one, else brute force.
double statistic(const Motif& f, const WeightedGraph& g,
                 MapConvention convention = MapConvention::all_maps);

}  // namespace gergm
