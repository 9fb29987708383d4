// Maximum-likelihood estimation of beta from one observed weighted graph:
// exact Newton MLE for the Gaussian edge-two-star model and the general
// Monte Carlo MLE scheme with importance-sampled partition ratios.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gergm/graph.hpp"
#include "gergm/variational.hpp"

namespace gergm {

struct FitIterate {
    std::vector<double> beta;
    double objective;  // exact or quasi log-likelihood (per-edge-pair scale)
    double ess;        // importance ESS (MC-MLE only; draws count otherwise)
};

struct FitResult {
    std::vector<double> beta_hat;
    std::vector<FitIterate> trajectory;
    bool converged = false;
    std::vector<double> stderrs;  // Wald plug-in, per component
    double grad_norm = 0.0;
    std::string warning;
};

// Exact MLE for the Gaussian edge-two-star model: Newton ascent with the
// analytic gradient, finite-difference Hessian, and the domain clipped to
// beta2 < n/(4(n-1)) - 1e-6.
FitResult fit_exact_gaussian(const WeightedGraph& observed,
                             const std::vector<double>& init = {0.0, 0.0});

struct FitConfig {
    WeightedGraph observed{1};
    ModelSpec spec_template;
    std::vector<double> init;
    int max_outer_iters = 30;
    int samples_per_iter = 2000;
    double ess_floor_frac = 0.10;  // trust region: ESS >= frac * samples
    double beta_tol = 1e-4;        // outer stopping rule
    std::uint64_t seed = 1;
    int chains = 4;
    int chain_burn_in = 300;
    int chain_thin = 2;
    int jobs = 1;
};

// Iterative MC-MLE: each outer iteration samples from the current fit and
// maximizes the importance-reweighted quasi-likelihood inside an ESS trust
// region.
FitResult fit_mcmle(const FitConfig& cfg);

// Moment-matching initializer: chooses beta so the variational maximizer
// u*(beta) reproduces the observed mean edge weight. For the Gaussian
// edge-two-star template this solves the exact two-moment equations; other
// templates pin every coefficient but the edge one.
std::vector<double> init_moment_match(const WeightedGraph& observed,
                                      const ModelSpec& spec_template,
                                      std::string* warning = nullptr);

// Observed statistic vector t(H_i, observed) in the template's convention.
std::vector<double> observed_statistics(const WeightedGraph& observed,
                                        const ModelSpec& spec_template);

// psi_hat(beta_to; beta_from) = (1/n^2) ln mean_k exp(n^2 (beta_to -
// beta_from) . t_k) over sampled statistic vectors t_k; exactly zero when
// beta_to == beta_from.
double importance_log_psi_ratio(const std::vector<std::vector<double>>& t_samples,
                                const std::vector<double>& beta_from,
                                const std::vector<double>& beta_to, int n);

}  // namespace gergm
