// Cut-metric distances between step kernels: the cut distance d via subset
// enumeration (exact) or alternating maximisation (heuristic), and the
// relabeling-quotient distance delta via permutation search.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gergm/graph.hpp"

namespace gergm {

enum class CutMode { exact, heuristic };

struct CutOptions {
    int restarts = 200;        // random restarts of the heuristic d
    std::uint64_t seed = 20240601;
    int jobs = 1;              // threads for the exact subset sweep
    int max_exact_d_n = 22;    // 2^n subset enumeration cutoff
    int max_exact_delta_n = 8; // n! permutation enumeration cutoff
    int delta_nonimproving_factor = 1;  // hill-climb stop after factor*n^2 misses
    int delta_restarts = 8;    // extra random hill-climb starts beyond sorted
};

// d(k1, k2) = sup_{A,B} |int_{A x B} (k1 - k2)|. Exact mode enumerates
// row subsets (optimal column set per sign); heuristic mode returns a
// lower bound from seeded alternating maximisation.
double cut_distance_d(const StepKernel& k1, const StepKernel& k2, CutMode mode,
                      const CutOptions& opts = {});

// delta(k1, k2) = min over node relabelings sigma of d(sigma k1, k2).
// Exact mode enumerates all permutations (n <= max_exact_delta_n);
// heuristic mode sorts rows by row-sum then hill-climbs transpositions,
// yielding an upper bound.
double cut_distance_delta(const StepKernel& k1, const StepKernel& k2,
                          CutMode mode, const CutOptions& opts = {});

// min_{u in K} delta(k, constant-u kernel); constants are permutation
// invariant so this reduces to cut_distance_d at any resolution.
double distance_to_constant_set(const StepKernel& k, std::span<const double> K,
                                CutMode mode, const CutOptions& opts = {});

// Cell-subdivision refinement (resolution n -> n * factor); d and delta
// are invariant under common refinement.
StepKernel refine(const StepKernel& k, int factor);
std::pair<StepKernel, StepKernel> refine_to_common(const StepKernel& k1,
                                                   const StepKernel& k2);

// Apply a node relabeling: result(i, j) = k(perm[i], perm[j]).
StepKernel relabel(const StepKernel& k, std::span<const int> perm);

}  // namespace gergm
