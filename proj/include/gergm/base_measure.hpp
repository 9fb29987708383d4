// Edge-weight base distributions: exact samplers, (truncated) log moment
// generating functions, and Cramer rate functions h(x) = sup_t [tx - ln M(t)].
#pragma once

#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gergm/rng.hpp"

namespace gergm {

enum class MeasureKind { gaussian, quartic, bernoulli, poisson };

struct SupportHull {
    double lo;  // -inf allowed
    double hi;  // +inf allowed
    bool integer_valued;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Normalizer of the quartic density q(x) = C4 exp(-x^4); 1/(2*Gamma(5/4)).
double quartic_c4();

class BaseMeasure {
  public:
    static BaseMeasure gaussian(double mean, double variance);
    static BaseMeasure quartic();
    static BaseMeasure bernoulli(double p);
    static BaseMeasure poisson(double rate);

    MeasureKind kind() const { return kind_; }
    double mean() const;
    double variance() const;
    SupportHull support() const;
    // Density normalizer (C4 for quartic, 1 otherwise).
    double normalizer() const;
    std::string describe() const;

    // ln M(theta), or ln M_l(theta) when a truncation level l is given.
    // Exact for gaussian/bernoulli/poisson; quadrature for quartic.
    double log_mgf(double theta, std::optional<double> truncation = {}) const;

    // d/dtheta ln M (tilted mean) and d^2/dtheta^2 ln M (tilted variance).
    struct TiltedMoments {
        double mean;
        double var;
    };
    TiltedMoments tilted_moments(double theta,
                                 std::optional<double> truncation = {}) const;

    // Log density (log pmf for discrete kinds); -inf off support.
    double log_density(double x) const;

    double sample_one(Rng& rng) const;
    std::vector<double> sample(std::uint64_t seed, long long count) const;

    // Parameter accessors (meaning depends on kind).
    double param1() const { return p1_; }
    double param2() const { return p2_; }

  private:
    BaseMeasure(MeasureKind k, double p1, double p2);

    MeasureKind kind_;
    double p1_;  // mean / p / rate
    double p2_;  // variance
};

enum class RateMode { analytic, numeric_legendre };

// Cramer rate function of a base measure, optionally of its truncated
// variant h_l. Numeric mode memoizes exact Legendre solves on a uniform
// grid and interpolates with a Catmull-Rom cubic between nodes.
class RateFunction {
  public:
    explicit RateFunction(BaseMeasure measure,
                          std::optional<RateMode> mode = {},
                          std::optional<double> truncation_level = {},
                          double grid_step = 1e-3);
    RateFunction(const RateFunction&);
    RateFunction& operator=(const RateFunction&) = delete;
    ~RateFunction();

    // h(x); +inf outside the support hull of the (truncated) measure.
    double operator()(double x) const;

    // Exact evaluation bypassing the interpolation grid.
    double eval_exact(double x) const;

    // h'(x) by central differences (analytic for closed-form kinds).
    double derivative(double x) const;

    // Kernel rate I at the constant kernel u: h(u)/2.
    double kernel_rate(double u) const { return (*this)(u) / 2.0; }

    // Step-kernel rate: (1/2) * average of h over all cells.
    double kernel_rate(const Eigen::MatrixXd& cell_values) const;

    const BaseMeasure& measure() const { return measure_; }
    RateMode mode() const { return mode_; }
    std::optional<double> truncation() const { return truncation_; }
    // Hull of the (truncated) support: h = +inf outside.
    SupportHull hull() const { return hull_; }

  private:
    double analytic_value(double x) const;
    double legendre_value(double x) const;
    double boundary_value(double x) const;
    double interpolated(double x) const;
    double grid_node_value(long long idx) const;

    BaseMeasure measure_;
    RateMode mode_;
    std::optional<double> truncation_;
    double grid_step_;
    SupportHull hull_;

    struct Cache;
    std::unique_ptr<Cache> cache_;
};

// Convenience per-op entry points matching the module surface.
double log_mgf(const BaseMeasure& m, double theta,
               std::optional<double> truncation = {});
double rate(const RateFunction& h, double x);
double kernel_rate(const RateFunction& h, double u);

}  // namespace gergm
