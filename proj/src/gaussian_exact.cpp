#include "gergm/gaussian_exact.hpp"

#include <cmath>
#include <string>

#include "gergm/errors.hpp"

namespace gergm {

namespace {

void check(const GaussianTwoStarParams& p) {
    if (p.n < 3) throw ConfigError("gaussian exact: n must be >= 3");
    if (p.beta2 >= gaussian_two_star_beta2_sup(p.n))
        throw DivergenceError("psi_n diverges: beta2 = " + std::to_string(p.beta2) +
                              " >= n/(4(n-1)) = " +
                              std::to_string(gaussian_two_star_beta2_sup(p.n)) +
                              " at n = " + std::to_string(p.n));
}

}  // namespace

double gaussian_two_star_beta2_sup(int n) {
    return static_cast<double>(n) / (4.0 * (n - 1));
}

double log_psi_exact(const GaussianTwoStarParams& p) {
    check(p);
    const double n = p.n;
    const double a = 1.0 - 4.0 * p.beta2 * (n - 1.0) / n;
    const double b = 1.0 - 2.0 * p.beta2 * (n - 2.0) / n;
    return -0.5 * std::log(a) + p.beta1 * p.beta1 * n * (n - 1.0) / a -
           0.5 * (n - 1.0) * std::log(b);
}

double psi_exact(const GaussianTwoStarParams& p) { return std::exp(log_psi_exact(p)); }

double psi_limit(double beta1, double beta2) {
    if (beta2 >= 0.25)
        throw DivergenceError("limiting psi diverges: beta2 = " +
                              std::to_string(beta2) + " >= 1/4");
    return beta1 * beta1 / (1.0 - 4.0 * beta2);
}

GaussianMoments moments_exact(const GaussianTwoStarParams& p) {
    check(p);
    const double n = p.n;
    const double a = 1.0 - 4.0 * p.beta2 * (n - 1.0) / n;
    const double b = 1.0 - 2.0 * p.beta2 * (n - 2.0) / n;
    GaussianMoments m;
    m.mean_edge_sum = 2.0 * p.beta1 * n * (n - 1.0) / a;
    m.mean_two_star_sum = 2.0 * (n - 1.0) / (n * a) +
                          4.0 * p.beta1 * p.beta1 * (n - 1.0) * (n - 1.0) / (a * a) +
                          (n - 1.0) * (n - 2.0) / (n * b);
    return m;
}

}  // namespace gergm
