#include "disc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "disc/errors.hpp"
#include "disc/rng.hpp"

namespace disc {

double auroc(const std::vector<double>& id_scores, const std::vector<double>& ood_scores) {
    if (id_scores.empty() || ood_scores.empty()) throw DataError("auroc: empty score set");
    for (double s : id_scores)
        if (!(s == s)) throw NumericError("auroc: NaN score");
    for (double s : ood_scores)
        if (!(s == s)) throw NumericError("auroc: NaN score");
    std::vector<double> sorted_id(id_scores);
    std::sort(sorted_id.begin(), sorted_id.end());
    // numerator accumulates integer counts plus exact halves
    double num = 0.0;
    for (double o : ood_scores) {
        auto lo = std::lower_bound(sorted_id.begin(), sorted_id.end(), o);
        auto hi = std::upper_bound(lo, sorted_id.end(), o);
        auto greater = static_cast<double>(sorted_id.end() - hi);
        auto equal = static_cast<double>(hi - lo);
        num += greater + 0.5 * equal;
    }
    double den = static_cast<double>(id_scores.size()) * static_cast<double>(ood_scores.size());
    return num / den;
}

namespace {

// max-cost assignment on a rows x cols profit matrix via the potentials
// form of the Hungarian algorithm (square-padded internally)
long long hungarian_max(const std::vector<std::vector<long long>>& profit) {
    std::size_t n = std::max(profit.size(), profit.empty() ? 0 : profit[0].size());
    const long long kInf = std::numeric_limits<long long>::max() / 4;
    // cost = -profit, padded square
    std::vector<std::vector<long long>> a(n + 1, std::vector<long long>(n + 1, 0));
    for (std::size_t i = 0; i < profit.size(); ++i)
        for (std::size_t j = 0; j < profit[i].size(); ++j) a[i + 1][j + 1] = -profit[i][j];
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = 0;
            long long delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long cur = a[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    long long total = 0;
    for (std::size_t j = 1; j <= n; ++j) total += -a[p[j]][j];
    return total;
}

} // namespace

double clustering_accuracy(const std::vector<std::size_t>& assignments,
                           const std::vector<std::size_t>& labels) {
    if (assignments.empty() || assignments.size() != labels.size())
        throw DataError("clustering_accuracy: bad inputs");
    std::size_t k = *std::max_element(assignments.begin(), assignments.end()) + 1;
    std::size_t f = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<long long>> confusion(k, std::vector<long long>(f, 0));
    for (std::size_t i = 0; i < assignments.size(); ++i)
        ++confusion[assignments[i]][labels[i]];

    long long best = 0;
    if (std::max(k, f) <= 8) {
        std::size_t n = std::max(k, f);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            long long total = 0;
            for (std::size_t c = 0; c < k; ++c)
                if (perm[c] < f) total += confusion[c][perm[c]];
            best = std::max(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        best = hungarian_max(confusion);
    }
    return static_cast<double>(best) / static_cast<double>(assignments.size());
}

SplitIndices stratified_split(const std::vector<std::size_t>& strata, double frac_a,
                              std::uint64_t seed) {
    if (strata.empty()) throw DataError("stratified_split: empty input");
    if (!(frac_a > 0.0 && frac_a < 1.0)) throw ConfigError("stratified_split: bad fraction");
    std::size_t n_strata = *std::max_element(strata.begin(), strata.end()) + 1;
    SplitIndices out;
    Rng root(seed, 11);
    for (std::size_t s = 0; s < n_strata; ++s) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < strata.size(); ++i)
            if (strata[i] == s) members.push_back(i);
        if (members.empty()) continue;
        Rng rng = root.split(s);
        shuffle_indices(members, rng);
        std::size_t cut = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(frac_a * static_cast<double>(members.size()))));
        if (cut >= members.size()) cut = members.size() - 1;
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < cut ? out.a : out.b).push_back(members[i]);
    }
    std::sort(out.a.begin(), out.a.end());
    std::sort(out.b.begin(), out.b.end());
    return out;
}

} // namespace disc
