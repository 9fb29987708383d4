// Small numerical toolbox: stable log-sum-exp, Gauss-Legendre quadrature,
// 1-D optimisation (Brent / golden section), bisection, and the incomplete
// gamma machinery behind chi-square tail probabilities.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace gergm::numeric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> xs);
inline double log_mean_exp(std::span<const double> xs) {
    return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

// Streaming log-sum-exp with first and second moments of the rescaled
// weights; merge order must be fixed by the caller for determinism.
class OnlineLogSumExp {
  public:
    void add(double x);
    void merge(const OnlineLogSumExp& other);
    long long count() const { return count_; }
    double log_sum() const;              // log sum_i exp(x_i)
    double log_mean() const;             // log mean_i exp(x_i)
    // Relative standard error of the sample mean of exp(x):
    // sd(w) / (sqrt(N) * mean(w)), computed from rescaled moments.
    double rel_stderr_of_mean() const;
    double effective_sample_size() const;  // (sum w)^2 / sum w^2

  private:
    double max_ = -kInf;
    double s1_ = 0.0;  // sum exp(x - max)
    double s2_ = 0.0;  // sum exp(2(x - max))
    long long count_ = 0;
};

// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1].
// Computed once by Newton iteration and cached per N.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

// Composite Gauss-Legendre integral of f over [a, b] with `panels`
// equal panels of an n_nodes-point rule each.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 16, int n_nodes = 32);

// log of integral of exp(log_f(x)) dx over [a, b], evaluated stably by
// pulling out the max of log_f across all quadrature nodes.
double log_integrate_exp(const std::function<double(double)>& log_f, double a,
                         double b, int panels = 16, int n_nodes = 32);

// Brent minimisation on [a, b]; returns the argmin. tol is an absolute
// tolerance on x.
double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-10, int max_iter = 200);

double golden_section_minimize(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-10,
                               int max_iter = 400);

// Root of f on [a, b] with f(a), f(b) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12, int max_iter = 200);

// Regularized incomplete gamma functions P(a, x), Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chi_square_sf(double x, double k) { return gamma_q(k / 2.0, x / 2.0); }

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Pearson chi-square statistic and p-value for observed counts vs expected
// probabilities (bins with tiny expectation should be merged by the caller).
struct ChiSquareResult {
    double statistic;
    double p_value;
    int dof;
};
ChiSquareResult chi_square_gof(std::span<const long long> observed,
                               std::span<const double> expected_probs,
                               long long total, int fitted_params = 0);

}  // namespace gergm::numeric
