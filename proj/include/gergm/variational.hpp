// Scalar variational problems for limiting normalizing constants:
// psi = sup_u ( sum_i beta_i u^{e(H_i)} - I(u) ) with I(u) = h(u)/2,
// maximizer enumeration, coercivity certification, degeneracy scans over
// parameter grids, and the tail-bound diagnostic for the quartic base.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gergm/base_measure.hpp"
#include "gergm/homomorphism.hpp"

namespace gergm {

struct ModelTerm {
    Motif motif;
    double beta;
};

// A GERGM specification T(k) = sum_i beta_i t(H_i, k) over a base measure.
struct ModelSpec {
    std::vector<ModelTerm> terms;
    BaseMeasure base = BaseMeasure::gaussian(0.0, 1.0);
    MapConvention convention = MapConvention::all_maps;

    std::vector<double> betas() const;
    ModelSpec with_betas(const std::vector<double>& b) const;
};

// Which theorem backs the scalar reduction for this spec.
enum class SolverPath { star_family, polynomial };

// Validates the spec against the hypotheses of the two supported scalar
// reductions; throws AdmissibilityError when neither applies.
SolverPath validate_path(const ModelSpec& spec);

struct VariationalSolution {
    double psi;
    std::vector<double> maximizers;  // K, ascending
    std::vector<double> g_values;    // g at each maximizer
    bool coercive;
    bool degenerate;                 // |K| >= 2 within the value gap
};

struct SolveOptions {
    double brent_tol = 1e-10;
    double value_gap = 1e-6;    // co-maximizer tolerance in g
    int scan_points = 4097;
    double bracket_start = 10.0;
    double bracket_cap = 1e4;
    double coercivity_margin = 10.0;
};

VariationalSolution solve(const ModelSpec& spec, const SolveOptions& opts = {});
// Shares a (possibly memoized) rate function across many solves.
VariationalSolution solve(const ModelSpec& spec, const RateFunction& h,
                          const SolveOptions& opts = {});

// 1-D objective g(u) for a spec; exposed for tests and dense verification.
std::function<double(double)> objective(const ModelSpec& spec,
                                        const RateFunction& h);

struct ScanPoint {
    std::vector<double> beta;
    std::optional<VariationalSolution> solution;  // empty if solve failed
    std::string error;                            // failure reason when empty
    bool jump_flag = false;       // argmax hopped branches vs previous point
    bool degenerate_flag = false;
};

// A refined first-order boundary between two scan points: the tie location
// and the two co-maximizers with their (near-equal) objective values.
struct BoundarySegment {
    std::size_t index_lo;  // scan index of the left point of the flagged pair
    std::vector<double> beta_lo;
    std::vector<double> beta_hi;
    std::vector<double> beta_star;  // bisected tie point
    double u_low;
    double u_high;
    double g_low;
    double g_high;
};

struct PhaseScanResult {
    std::vector<ScanPoint> points;
    std::vector<BoundarySegment> boundaries;
    int flag_count() const;
};

struct PhaseScanOptions {
    SolveOptions solve;
    int jobs = 1;
    double jump_factor = 10.0;  // hop threshold multiplier
    bool refine_boundaries = true;
    int bisection_steps = 48;
};

// Solves the spec at every grid point (order-stable), flags candidate
// degeneracy boundaries, and bisects flagged pairs to the tie point.
// segment_breaks lists indices that start a new scan path (no jump
// comparison across a break).
PhaseScanResult phase_scan(const ModelSpec& spec_template,
                           const std::vector<std::vector<double>>& grid,
                           const std::vector<std::size_t>& segment_breaks = {},
                           const PhaseScanOptions& opts = {});

// Per-edge log bound behind the quartic-base admissibility condition:
//   -M eps + (1/2) ln( 2 C4 C(M) e^{-2M|b2|l^2 - 2M|b1|l}
//                      + C4 Int exp(2 b1 x + 2 b2 x^2 - x^4) dx )
// with C(M) the l = 0 tail integral. Terms are kept in log space so the
// monotonicity diagnostics stay meaningful when the tail term is far below
// double resolution.
struct C2PrimeBound {
    double bound;
    double log_tail_term;  // ln(2 C4 C(M)) - 2M|b2|l^2 - 2M|b1|l
    double log_base_term;  // ln(C4 Int exp(2b1 x + 2b2 x^2 - x^4))
    bool eps_is_zero;      // diagnostic-only input: -M eps term absent
};

C2PrimeBound c2prime_bound(double beta1, double beta2, double M, double l,
                           double eps);

// bound(l_large) - bound(l_small) at fixed (M, eps), computed via log1p so
// the sign survives even when the bounds are equal in double precision.
double c2prime_bound_l_difference(double beta1, double beta2, double M,
                                  double eps, double l_small, double l_large);

}  // namespace gergm
