// Closed-form finite-n and limiting partition functions for the Gaussian
// edge-two-star model, with analytic moment derivatives.
#pragma once

namespace gergm {

struct GaussianTwoStarParams {
    int n;
    double beta1;
    double beta2;
};

// Largest admissible beta2 (exclusive): n / (4 (n - 1)).
double gaussian_two_star_beta2_sup(int n);

// ln psi_n in log space; throws DivergenceError past the validity boundary.
double log_psi_exact(const GaussianTwoStarParams& p);
double psi_exact(const GaussianTwoStarParams& p);

// Limit of (1/n^2) ln psi_n: beta1^2 / (1 - 4 beta2), for beta2 < 1/4.
double psi_limit(double beta1, double beta2);

struct GaussianMoments {
    double mean_edge_sum;      // d ln psi_n / d beta1 = E[sum_{i != j} x_ij]
    double mean_two_star_sum;  // d ln psi_n / d beta2 = E[(1/n) sum_i r_i^2]
};
GaussianMoments moments_exact(const GaussianTwoStarParams& p);

}  // namespace gergm
