#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace disc {

// Exact Mann-Whitney statistic: P(id > ood) + 0.5 P(id == ood), computed
// from integer pair counts. Scores are oriented larger = more in-distribution.
double auroc(const std::vector<double>& id_scores, const std::vector<double>& ood_scores);

// Best accuracy over injective cluster -> label matchings (brute force up to
// 8 clusters, Hungarian assignment beyond).
double clustering_accuracy(const std::vector<std::size_t>& assignments,
                           const std::vector<std::size_t>& labels);

// Deterministic stratified split: for each stratum, the first half of a
// seeded shuffle goes to part A. Returns indices.
struct SplitIndices {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
};
SplitIndices stratified_split(const std::vector<std::size_t>& strata, double frac_a,
                              std::uint64_t seed);

} // namespace disc
