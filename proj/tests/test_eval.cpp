#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "disc/errors.hpp"
#include "disc/eval.hpp"
#include "disc/rng.hpp"

using namespace disc;

TEST_CASE("auroc on a tiny hand-worked example") {
    std::vector<double> id = {0.2, 0.3}, ood = {0.1, 0.2};
    // pairs: (.2,.1)=1, (.2,.2)=.5, (.3,.1)=1, (.3,.2)=1 -> 3.5/4
    CHECK(auroc(id, ood) == 0.875);
    CHECK(auroc(ood, id) == 0.125);
}

TEST_CASE("auroc endpoints") {
    std::vector<double> hi = {1.0, 2.0, 3.0}, lo = {-1.0, 0.0};
    CHECK(auroc(hi, lo) == 1.0);
    CHECK(auroc(lo, hi) == 0.0);
    std::vector<double> same = {0.7, 0.7, 0.7};
    CHECK(auroc(same, same) == 0.5);
}

TEST_CASE("auroc complement identity is exact") {
    Rng rng(101, 0);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t na = 1 + rng.next_below(40);
        std::size_t nb = 1 + rng.next_below(40);
        std::vector<double> a(na), b(nb);
        // small integer grid forces plenty of ties
        for (auto& v : a) v = static_cast<double>(rng.next_below(8));
        for (auto& v : b) v = static_cast<double>(rng.next_below(8));
        CHECK(auroc(a, b) + auroc(b, a) == 1.0);
    }
}

TEST_CASE("auroc matches a quadratic oracle on 200 instances") {
    Rng rng(55, 0);
    std::vector<double> id(120), ood(80);
    for (auto& v : id) v = std::floor(rng.next_gaussian() * 3.0) + 1.0;
    for (auto& v : ood) v = std::floor(rng.next_gaussian() * 3.0);
    double num = 0.0;
    for (double i : id)
        for (double o : ood) num += i > o ? 1.0 : (i == o ? 0.5 : 0.0);
    double want = num / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
    CHECK(auroc(id, ood) == want);
}

TEST_CASE("auroc input validation") {
    std::vector<double> ok = {1.0}, empty;
    CHECK_THROWS_AS(auroc(empty, ok), DataError);
    CHECK_THROWS_AS(auroc(ok, empty), DataError);
    std::vector<double> bad = {std::nan("")};
    CHECK_THROWS_AS(auroc(bad, ok), NumericError);
}

TEST_CASE("clustering accuracy small cases") {
    // label permutation is free
    CHECK(clustering_accuracy({0, 0, 1, 1, 2}, {1, 1, 0, 0, 2}) == 1.0);
    CHECK(clustering_accuracy({2, 2, 0, 0, 1}, {0, 0, 1, 1, 2}) == 1.0);
    // one impure point
    CHECK(clustering_accuracy({0, 0, 0, 1}, {0, 1, 0, 1}) == 0.75);
    // extra clusters cannot hurt beyond their share
    CHECK(clustering_accuracy({0, 1, 2, 3}, {0, 0, 1, 1}) == 0.5);
    CHECK_THROWS_AS(clustering_accuracy({}, {}), DataError);
    CHECK_THROWS_AS(clustering_accuracy({0, 1}, {0}), DataError);
}

TEST_CASE("hungarian path agrees with brute force at nine clusters") {
    Rng rng(7, 0);
    for (int trial = 0; trial < 3; ++trial) {
        std::size_t n = 200;
        std::vector<std::size_t> assign(n), labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = rng.next_below(9);
            labels[i] = rng.next_below(9);
        }
        // make sure all ids appear so k = f = 9
        for (std::size_t c = 0; c < 9; ++c) {
            assign[c] = c;
            labels[c] = c;
        }
        double got = clustering_accuracy(assign, labels);

        long long confusion[9][9] = {};
        for (std::size_t i = 0; i < n; ++i) ++confusion[assign[i]][labels[i]];
        std::vector<std::size_t> perm(9);
        std::iota(perm.begin(), perm.end(), 0);
        long long best = 0;
        do {
            long long tot = 0;
            for (std::size_t c = 0; c < 9; ++c) tot += confusion[c][perm[c]];
            best = std::max(best, tot);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(got == static_cast<double>(best) / static_cast<double>(n));
    }
}

TEST_CASE("stratified split is balanced, disjoint, and seeded") {
    std::vector<std::size_t> strata;
    for (std::size_t s = 0; s < 3; ++s)
        for (int i = 0; i < 10; ++i) strata.push_back(s);
    SplitIndices sp = stratified_split(strata, 0.5, 42);
    CHECK(sp.a.size() == 15);
    CHECK(sp.b.size() == 15);
    std::set<std::size_t> sa(sp.a.begin(), sp.a.end()), sb(sp.b.begin(), sp.b.end());
    CHECK(sa.size() == 15);
    for (std::size_t i : sp.a) CHECK(sb.count(i) == 0);
    // per-stratum balance
    for (std::size_t s = 0; s < 3; ++s) {
        std::size_t ca = 0;
        for (std::size_t i : sp.a) ca += strata[i] == s;
        CHECK(ca == 5);
    }
    SplitIndices sp2 = stratified_split(strata, 0.5, 42);
    CHECK(sp2.a == sp.a);
    SplitIndices sp3 = stratified_split(strata, 0.5, 43);
    CHECK(sp3.a != sp.a);

    // singleton stratum lands in part b (part a needs at least one only
    // when the stratum can afford it)
    std::vector<std::size_t> one = {0, 0, 0, 1};
    SplitIndices sp4 = stratified_split(one, 0.5, 1);
    bool in_b = std::find(sp4.b.begin(), sp4.b.end(), 3) != sp4.b.end();
    CHECK(in_b);

    CHECK_THROWS_AS(stratified_split({}, 0.5, 0), DataError);
    CHECK_THROWS_AS(stratified_split(one, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(stratified_split(one, 1.0, 0), ConfigError);
}
