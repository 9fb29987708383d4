#include "gergm/cut_distance.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include "gergm/errors.hpp"
#include "gergm/rng.hpp"

namespace gergm {

namespace {

// Best |sum over S x T| for a fixed row set: the optimal column set keeps
// one sign, so scan positive and negative parts of the column sums.
double best_over_columns(const Eigen::VectorXd& col_sums) {
    double pos = 0.0, neg = 0.0;
    for (Eigen::Index j = 0; j < col_sums.size(); ++j) {
        const double c = col_sums(j);
        if (c > 0.0) pos += c; else neg -= c;
    }
    return std::max(pos, neg);
}

// Exact sweep over a contiguous range of Gray-coded subset indices.
// Column sums are rebuilt from scratch at the range start, so the value
// stream is independent of how ranges are assigned to threads.
double sweep_range(const Eigen::MatrixXd& diff, std::uint64_t begin,
                   std::uint64_t end) {
    const int n = static_cast<int>(diff.rows());
    std::uint64_t gray = begin ^ (begin >> 1);
    Eigen::VectorXd cols = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (gray & (1ULL << i)) cols += diff.row(i).transpose();
    double best = best_over_columns(cols);
    for (std::uint64_t idx = begin; idx + 1 < end; ++idx) {
        const int bit = std::countr_zero(idx + 1);
        const std::uint64_t next_gray = (idx + 1) ^ ((idx + 1) >> 1);
        if (next_gray & (1ULL << bit))
            cols += diff.row(bit).transpose();
        else
            cols -= diff.row(bit).transpose();
        gray = next_gray;
        best = std::max(best, best_over_columns(cols));
    }
    return best;
}

double exact_cut_norm(const Eigen::MatrixXd& diff, int jobs) {
    const int n = static_cast<int>(diff.rows());
    const std::uint64_t total = 1ULL << n;
    // Fixed 64-way blocking keeps results identical for every jobs value.
    const int blocks = (n >= 12) ? 64 : 1;
    const std::uint64_t per = total / blocks;
    std::vector<double> block_best(blocks, 0.0);
    if (jobs <= 1 || blocks == 1) {
        for (int b = 0; b < blocks; ++b)
            block_best[b] = sweep_range(diff, b * per, (b + 1) * per);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(jobs, blocks);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1))
                    block_best[b] = sweep_range(diff, b * per, (b + 1) * per);
            });
        for (auto& t : pool) t.join();
    }
    return *std::max_element(block_best.begin(), block_best.end());
}

// One alternating-maximisation pass for the signed objective
// max_{S,T} sign * sum_{S x T} diff, from a given starting row set.
double alternate_maximize(const Eigen::MatrixXd& m, std::vector<char>& in_s) {
    const int n = static_cast<int>(m.rows());
    double value = -1.0;
    for (int iter = 0; iter < 4 * n + 8; ++iter) {
        Eigen::VectorXd cols = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            if (in_s[i]) cols += m.row(i).transpose();
        double v = 0.0;
        std::vector<char> in_t(n, 0);
        for (int j = 0; j < n; ++j)
            if (cols(j) > 0.0) {
                in_t[j] = 1;
                v += cols(j);
            }
        Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j)
            if (in_t[j]) rows += m.col(j);
        double v2 = 0.0;
        for (int i = 0; i < n; ++i) {
            in_s[i] = rows(i) > 0.0 ? 1 : 0;
            if (in_s[i]) v2 += rows(i);
        }
        if (v2 <= value + 1e-15) return std::max(v2, value);
        value = v2;
    }
    return value;
}

double heuristic_cut_norm(const Eigen::MatrixXd& diff, const CutOptions& opts) {
    const int n = static_cast<int>(diff.rows());
    Rng rng(opts.seed);
    const Eigen::MatrixXd neg = -diff;
    double best = 0.0;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<char> s(n);
        for (int i = 0; i < n; ++i) s[i] = rng.bernoulli(0.5) ? 1 : 0;
        std::vector<char> s2 = s;
        best = std::max(best, alternate_maximize(diff, s));
        best = std::max(best, alternate_maximize(neg, s2));
    }
    return best;
}

void check_resolutions(const StepKernel& k1, const StepKernel& k2) {
    if (k1.resolution() != k2.resolution())
        throw ConfigError("cut distance: kernels must share a resolution "
                          "(refine to a common one first)");
}

}  // namespace

double cut_distance_d(const StepKernel& k1, const StepKernel& k2, CutMode mode,
                      const CutOptions& opts) {
    check_resolutions(k1, k2);
    const int n = k1.resolution();
    const Eigen::MatrixXd diff = k1.values - k2.values;
    const double n2 = static_cast<double>(n) * n;
    if (mode == CutMode::exact) {
        if (n > opts.max_exact_d_n)
            throw TooLargeError("exact cut distance limited to n <= " +
                                std::to_string(opts.max_exact_d_n) +
                                " (use heuristic mode)");
        return exact_cut_norm(diff, opts.jobs) / n2;
    }
    return heuristic_cut_norm(diff, opts) / n2;
}

StepKernel relabel(const StepKernel& k, std::span<const int> perm) {
    const int n = k.resolution();
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = k.values(perm[i], perm[j]);
    return StepKernel(std::move(out));
}

namespace {

double delta_exact(const StepKernel& k1, const StepKernel& k2,
                   const CutOptions& opts) {
    const int n = k1.resolution();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, cut_distance_d(relabel(k1, perm), k2,
                                             CutMode::exact, opts));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double delta_heuristic(const StepKernel& k1, const StepKernel& k2,
                       const CutOptions& opts) {
    const int n = k1.resolution();
    const CutMode inner =
        (n <= opts.max_exact_d_n) ? CutMode::exact : CutMode::heuristic;
    auto evaluate = [&](const std::vector<int>& perm) {
        return cut_distance_d(relabel(k1, perm), k2, inner, opts);
    };

    // Transposition hill climb from a given start, stopping after
    // delta_nonimproving_factor * n^2 consecutive non-improving swaps.
    auto hill_climb = [&](std::vector<int> perm) {
        double best = evaluate(perm);
        const int cap = opts.delta_nonimproving_factor * n * n;
        int misses = 0;
        while (misses < cap) {
            bool improved = false;
            for (int a = 0; a < n && misses < cap; ++a) {
                for (int b = a + 1; b < n && misses < cap; ++b) {
                    std::swap(perm[a], perm[b]);
                    const double v = evaluate(perm);
                    if (v < best - 1e-15) {
                        best = v;
                        improved = true;
                        misses = 0;
                    } else {
                        std::swap(perm[a], perm[b]);
                        ++misses;
                    }
                }
            }
            if (!improved) break;
        }
        return best;
    };

    // Align row-sum orderings as the primary starting relabeling.
    auto order_by_rowsum = [](const StepKernel& k) {
        const int m = k.resolution();
        std::vector<int> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        Eigen::VectorXd rs = k.values.rowwise().sum();
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return rs(a) < rs(b); });
        return idx;
    };
    const auto o1 = order_by_rowsum(k1);
    const auto o2 = order_by_rowsum(k2);
    std::vector<int> perm(n);
    for (int r = 0; r < n; ++r) perm[o2[r]] = o1[r];
    double best = hill_climb(perm);

    // Seeded random restarts escape transposition-local minima.
    Rng rng(opts.seed ^ 0x9E3779B97F4A7C15ULL);
    for (int r = 0; r < opts.delta_restarts; ++r) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(p[i], p[rng.below(static_cast<std::uint64_t>(i + 1))]);
        best = std::min(best, hill_climb(std::move(p)));
    }
    return best;
}

}  // namespace

double cut_distance_delta(const StepKernel& k1, const StepKernel& k2,
                          CutMode mode, const CutOptions& opts) {
    check_resolutions(k1, k2);
    const int n = k1.resolution();
    if (mode == CutMode::exact) {
        if (n > opts.max_exact_delta_n)
            throw TooLargeError("exact delta limited to n <= " +
                                std::to_string(opts.max_exact_delta_n) +
                                " (use heuristic mode)");
        return delta_exact(k1, k2, opts);
    }
    return delta_heuristic(k1, k2, opts);
}

double distance_to_constant_set(const StepKernel& k, std::span<const double> K,
                                CutMode mode, const CutOptions& opts) {
    if (K.empty()) throw ConfigError("distance_to_constant_set: K must be nonempty");
    double best = std::numeric_limits<double>::infinity();
    for (double u : K) {
        const StepKernel target = StepKernel::constant(k.resolution(), u);
        // Permutations of a constant kernel are trivial: delta == d here.
        best = std::min(best, cut_distance_d(k, target, mode, opts));
    }
    return best;
}

StepKernel refine(const StepKernel& k, int factor) {
    if (factor < 1) throw ConfigError("refine: factor must be >= 1");
    const int n = k.resolution();
    Eigen::MatrixXd out(n * factor, n * factor);
    for (int i = 0; i < n * factor; ++i)
        for (int j = 0; j < n * factor; ++j)
            out(i, j) = k.values(i / factor, j / factor);
    return StepKernel(std::move(out));
}

std::pair<StepKernel, StepKernel> refine_to_common(const StepKernel& k1,
                                                   const StepKernel& k2) {
    const int n1 = k1.resolution(), n2 = k2.resolution();
    const int l = std::lcm(n1, n2);
    if (l > 4096) throw TooLargeError("refine_to_common: lcm resolution too large");
    return {refine(k1, l / n1), refine(k2, l / n2)};
}

}  // namespace gergm
