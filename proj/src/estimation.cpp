#include "gergm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "gergm/errors.hpp"
#include "gergm/gaussian_exact.hpp"
#include "gergm/numeric.hpp"
#include "gergm/sampler.hpp"

namespace gergm {

namespace {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Gradient of (1/n^2) ln psi_n in density units, matching
// t1 = sum_{i!=j} x / n^2 and t2 = sum_i r_i^2 / n^3.
Vec2 gaussian_mean_statistics(int n, const Vec2& beta) {
    const GaussianTwoStarParams p{n, beta(0), beta(1)};
    const auto m = moments_exact(p);
    const double n2 = static_cast<double>(n) * n;
    return {m.mean_edge_sum / n2, m.mean_two_star_sum / n2};
}

// Hessian of ln psi_n by central differences of the analytic gradient.
Mat2 gaussian_log_psi_hessian(int n, const Vec2& beta) {
    Mat2 h;
    const double n2 = static_cast<double>(n) * n;
    for (int k = 0; k < 2; ++k) {
        const double step = 1e-6 * std::max(1.0, std::abs(beta(k)));
        Vec2 bp = beta, bm = beta;
        bp(k) += step;
        bm(k) -= step;
        const Vec2 gp = gaussian_mean_statistics(n, bp) * n2;
        const Vec2 gm = gaussian_mean_statistics(n, bm) * n2;
        h.col(k) = (gp - gm) / (2.0 * step);
    }
    // symmetrize the finite-difference noise away
    h = 0.5 * (h + h.transpose()).eval();
    return h;
}

}  // namespace

std::vector<double> observed_statistics(const WeightedGraph& observed,
                                        const ModelSpec& spec_template) {
    std::vector<double> t;
    for (const auto& term : spec_template.terms)
        t.push_back(statistic(term.motif, observed, spec_template.convention));
    return t;
}

FitResult fit_exact_gaussian(const WeightedGraph& observed,
                             const std::vector<double>& init) {
    const int n = observed.n();
    if (n < 3) throw ConfigError("fit_exact_gaussian: observed graph needs n >= 3");
    if (init.size() != 2) throw ConfigError("fit_exact_gaussian: init must be (beta1, beta2)");
    const double beta2_cap = gaussian_two_star_beta2_sup(n) - 1e-6;
    const double n2 = static_cast<double>(n) * n;

    const Vec2 t_obs{fast_statistic(MotifFamily::edge, observed),
                     fast_statistic(MotifFamily::two_star, observed)};
    auto objective = [&](const Vec2& b) {
        return b.dot(t_obs) - log_psi_exact({n, b(0), b(1)}) / n2;
    };
    auto gradient = [&](const Vec2& b) -> Vec2 {
        return t_obs - gaussian_mean_statistics(n, b);
    };

    FitResult res;
    Vec2 beta{init[0], std::min(init[1], beta2_cap)};
    double f = objective(beta);
    res.trajectory.push_back({{beta(0), beta(1)}, f, 0.0});
    bool hit_boundary = false;
    for (int it = 0; it < 100; ++it) {
        const Vec2 g = gradient(beta);
        res.grad_norm = g.norm();
        if (res.grad_norm < 1e-10 * std::max(1.0, t_obs.norm())) {
            res.converged = true;
            break;
        }
        const Mat2 h = gaussian_log_psi_hessian(n, beta) / n2;  // of (1/n^2) ln psi
        Vec2 step = h.ldlt().solve(g);
        if (!step.allFinite()) step = g;  // fall back to gradient ascent
        // backtracking line search with the domain clip
        double scale = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vec2 cand = beta + scale * step;
            if (cand(1) > beta2_cap) {
                cand(1) = beta2_cap;
                hit_boundary = true;
            }
            const double fc = objective(cand);
            if (fc > f) {
                beta = cand;
                f = fc;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        res.trajectory.push_back({{beta(0), beta(1)}, f, 0.0});
        if (!moved) break;
    }
    res.grad_norm = gradient(beta).norm();
    res.converged = res.grad_norm < 1e-6 * std::max(1.0, t_obs.norm());
    res.beta_hat = {beta(0), beta(1)};
    if (hit_boundary && std::abs(beta(1) - beta2_cap) < 1e-12) {
        res.warning = "observed statistics at the edge of the achievable range; "
                      "returning the clipped boundary optimum";
    }
    // Wald plug-in: covariance = inverse Hessian of ln psi_n at the optimum.
    const Mat2 info = gaussian_log_psi_hessian(n, beta);
    const Mat2 cov = info.inverse();
    res.stderrs = {std::sqrt(std::max(0.0, cov(0, 0))),
                   std::sqrt(std::max(0.0, cov(1, 1)))};
    return res;
}

namespace {

struct SampleBank {
    // One row per retained chain state: the model statistic vector.
    std::vector<std::vector<double>> t;

    Eigen::VectorXd weights(const std::vector<double>& delta_beta, double n2) const {
        Eigen::VectorXd w(t.size());
        for (size_t k = 0; k < t.size(); ++k) {
            double dot = 0.0;
            for (size_t c = 0; c < delta_beta.size(); ++c)
                dot += delta_beta[c] * t[k][c];
            w(k) = n2 * dot;
        }
        const double m = w.maxCoeff();
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::exp(w(k) - m);
        return w;  // un-normalized, common factor exp(m) dropped
    }
};

double ess_of(const Eigen::VectorXd& w) {
    const double s1 = w.sum();
    const double s2 = w.squaredNorm();
    return s2 > 0.0 ? s1 * s1 / s2 : 0.0;
}

SampleBank draw_samples(const FitConfig& cfg, const std::vector<double>& beta,
                        int outer_iter) {
    SampleBank bank;
    const int per_chain = (cfg.samples_per_iter + cfg.chains - 1) / cfg.chains;
    std::vector<ChainTrace> traces(cfg.chains);
    auto run_one = [&](int c) {
        ChainConfig cc;
        cc.spec = cfg.spec_template.with_betas(beta);
        cc.n = cfg.observed.n();
        cc.seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(outer_iter) +
                  static_cast<std::uint64_t>(c);
        cc.burn_in = cfg.chain_burn_in;
        cc.thin = cfg.chain_thin;
        cc.sweeps = cfg.chain_burn_in + per_chain * cfg.chain_thin;
        cc.kernel = (cfg.spec_template.base.kind() == MeasureKind::gaussian)
                        ? ChainKernel::exact_gibbs_gaussian
                        : ChainKernel::mh_within_gibbs;
        traces[c] = run_chain(cc);
    };
    if (cfg.jobs <= 1 || cfg.chains == 1) {
        for (int c = 0; c < cfg.chains; ++c) run_one(c);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < cfg.chains; ++c) pool.emplace_back(run_one, c);
        for (auto& t : pool) t.join();
    }
    for (int c = 0; c < cfg.chains; ++c)
        for (auto& row : traces[c].statistics) bank.t.push_back(row);
    return bank;
}

}  // namespace

double importance_log_psi_ratio(const std::vector<std::vector<double>>& t_samples,
                                const std::vector<double>& beta_from,
                                const std::vector<double>& beta_to, int n) {
    if (t_samples.empty()) throw ConfigError("importance_log_psi_ratio: no samples");
    const double n2 = static_cast<double>(n) * n;
    const size_t dim = beta_from.size();
    double raw_max = -numeric::kInf;
    std::vector<double> exponents;
    exponents.reserve(t_samples.size());
    for (const auto& t : t_samples) {
        double s = 0.0;
        for (size_t c = 0; c < dim; ++c) s += (beta_to[c] - beta_from[c]) * t[c];
        exponents.push_back(n2 * s);
        raw_max = std::max(raw_max, exponents.back());
    }
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - raw_max);
    return (raw_max + std::log(acc / static_cast<double>(t_samples.size()))) / n2;
}

FitResult fit_mcmle(const FitConfig& cfg) {
    const size_t dim = cfg.spec_template.terms.size();
    if (cfg.init.size() != dim)
        throw ConfigError("fit_mcmle: init size must match the template");
    validate_path(cfg.spec_template);
    const int n = cfg.observed.n();
    const double n2 = static_cast<double>(n) * n;
    const auto t_obs = observed_statistics(cfg.observed, cfg.spec_template);

    FitResult res;
    std::vector<double> beta = cfg.init;

    for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
        const SampleBank bank = draw_samples(cfg, beta, outer);
        const double m_count = static_cast<double>(bank.t.size());
        const double ess_floor = cfg.ess_floor_frac * m_count;

        // Quasi-likelihood in beta': Q = beta'.t_obs - psi_hat(beta'; beta).
        auto quasi = [&](const std::vector<double>& bp) {
            double dot = 0.0;
            for (size_t c = 0; c < dim; ++c) dot += bp[c] * t_obs[c];
            return dot - importance_log_psi_ratio(bank.t, beta, bp, n);
        };

        // Newton ascent inside the ESS trust region.
        std::vector<double> bp = beta;
        double q_cur = quasi(bp);
        int ess_rejections = 0, candidates = 0;
        for (int inner = 0; inner < 50; ++inner) {
            std::vector<double> d(dim);
            for (size_t c = 0; c < dim; ++c) d[c] = bp[c] - beta[c];
            Eigen::VectorXd w = bank.weights(d, n2);
            const double wsum = w.sum();
            Eigen::VectorXd mean_t = Eigen::VectorXd::Zero(dim);
            for (size_t k = 0; k < bank.t.size(); ++k)
                for (size_t c = 0; c < dim; ++c) mean_t(c) += w(k) * bank.t[k][c];
            mean_t /= wsum;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
            for (size_t k = 0; k < bank.t.size(); ++k)
                for (size_t a = 0; a < dim; ++a)
                    for (size_t b = 0; b < dim; ++b)
                        cov(a, b) += w(k) * (bank.t[k][a] - mean_t(a)) *
                                     (bank.t[k][b] - mean_t(b));
            cov /= wsum;
            Eigen::VectorXd grad(dim);
            for (size_t c = 0; c < dim; ++c) grad(c) = t_obs[c] - mean_t(c);
            if (grad.norm() < 1e-9) break;
            Eigen::MatrixXd hess = n2 * cov;  // of the quasi objective, negated
            Eigen::VectorXd step = hess.ldlt().solve(grad);
            if (!step.allFinite()) step = grad;
            double scale = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 30; ++ls) {
                std::vector<double> cand(dim);
                for (size_t c = 0; c < dim; ++c) cand[c] = bp[c] + scale * step(c);
                std::vector<double> dc(dim);
                for (size_t c = 0; c < dim; ++c) dc[c] = cand[c] - beta[c];
                const Eigen::VectorXd wc = bank.weights(dc, n2);
                ++candidates;
                if (ess_of(wc) >= ess_floor) {
                    const double qc = quasi(cand);
                    if (qc > q_cur - 1e-12) {
                        bp = cand;
                        q_cur = qc;
                        accepted = true;
                        break;
                    }
                } else {
                    ++ess_rejections;
                }
                scale *= 0.5;
            }
            if (!accepted) {
                if (candidates > 0 && ess_rejections == candidates)
                    throw StepSizeError(
                        "fit_mcmle: importance ESS fell below the floor at every "
                        "candidate step; increase samples_per_iter or lower "
                        "ess_floor_frac");
                break;
            }
        }

        std::vector<double> d(dim);
        for (size_t c = 0; c < dim; ++c) d[c] = bp[c] - beta[c];
        const Eigen::VectorXd w = bank.weights(d, n2);
        res.trajectory.push_back({bp, q_cur, ess_of(w)});

        double move = 0.0;
        for (size_t c = 0; c < dim; ++c) move = std::max(move, std::abs(bp[c] - beta[c]));
        beta = bp;
        if (move < cfg.beta_tol) {
            res.converged = true;
            break;
        }
    }

    res.beta_hat = beta;
    // Wald plug-in from the final sample covariance: info = n^4 cov(t).
    if (!res.trajectory.empty()) {
        const SampleBank bank = draw_samples(cfg, beta, cfg.max_outer_iters + 1);
        const size_t m = bank.t.size();
        Eigen::VectorXd mean_t = Eigen::VectorXd::Zero(dim);
        for (const auto& row : bank.t)
            for (size_t c = 0; c < dim; ++c) mean_t(c) += row[c];
        mean_t /= static_cast<double>(m);
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& row : bank.t)
            for (size_t a = 0; a < dim; ++a)
                for (size_t b = 0; b < dim; ++b)
                    cov(a, b) += (row[a] - mean_t(a)) * (row[b] - mean_t(b));
        cov /= static_cast<double>(m - 1);
        const Eigen::MatrixXd info = n2 * n2 * cov;
        const Eigen::MatrixXd c = info.inverse();
        res.stderrs.resize(dim);
        for (size_t k = 0; k < dim; ++k)
            res.stderrs[k] = std::sqrt(std::max(0.0, c(k, k)));
        Eigen::VectorXd grad(dim);
        for (size_t k = 0; k < dim; ++k) grad(k) = t_obs[k] - mean_t(k);
        res.grad_norm = grad.norm();
    }
    return res;
}

std::vector<double> init_moment_match(const WeightedGraph& observed,
                                      const ModelSpec& spec_template,
                                      std::string* warning) {
    validate_path(spec_template);
    const size_t dim = spec_template.terms.size();

    // Gaussian edge-two-star template: exact two-moment matching.
    const bool gaussian_two_star =
        spec_template.base.kind() == MeasureKind::gaussian && dim == 2 &&
        spec_template.terms[0].motif.family() == MotifFamily::edge &&
        spec_template.terms[1].motif.family() == MotifFamily::two_star;
    if (gaussian_two_star && spec_template.convention == MapConvention::all_maps) {
        const auto fit = fit_exact_gaussian(observed);
        if (!fit.warning.empty() && warning) *warning = fit.warning;
        return fit.beta_hat;
    }

    // General path: pin every coefficient except the leading edge term and
    // solve the stationarity condition g'(u_obs) = 0 linearly in beta1.
    if (spec_template.terms[0].motif.family() != MotifFamily::edge)
        throw ConfigError("init_moment_match: template must lead with an edge term");
    RateFunction h(spec_template.base);
    double u_obs = observed.mean_edge_weight();
    const auto hull = h.hull();
    const double lo = hull.lo, hi = hull.hi;
    if (u_obs <= lo || u_obs >= hi) {
        const double clamped = std::clamp(u_obs, lo + 1e-6 * (hi - lo),
                                          hi - 1e-6 * (hi - lo));
        if (warning)
            *warning = "observed mean edge weight " + std::to_string(u_obs) +
                       " is outside the base support hull; matching at the "
                       "nearest interior point " + std::to_string(clamped);
        u_obs = clamped;
    }
    double tail = 0.0;
    for (size_t k = 1; k < dim; ++k) {
        const int e = spec_template.terms[k].motif.edge_count();
        tail += spec_template.terms[k].beta * e * std::pow(u_obs, e - 1);
    }
    std::vector<double> beta = spec_template.betas();
    beta[0] = 0.5 * h.derivative(u_obs) - tail;
    return beta;
}

}  // namespace gergm
