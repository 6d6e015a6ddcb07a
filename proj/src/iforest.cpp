#include "disc/iforest.hpp"

#include <algorithm>
#include <cmath>

#include "disc/errors.hpp"
#include "disc/rng.hpp"

namespace disc {

namespace {
constexpr double kEulerGamma = 0.5772156649015329;

// harmonic number with H(1) = 1 exactly
double harmonic(std::size_t m) {
    if (m == 0) return 0.0;
    if (m == 1) return 1.0;
    return std::log(static_cast<double>(m)) + kEulerGamma;
}
} // namespace

double iforest_avg_path_length(std::size_t n) {
    if (n <= 1) return 0.0;
    double nd = static_cast<double>(n);
    return 2.0 * harmonic(n - 1) - 2.0 * (nd - 1.0) / nd;
}

namespace {

struct Builder {
    const std::vector<std::vector<double>>& data;
    IsolationTree& tree;
    int height_limit;
    Rng& rng;

    int build(std::vector<std::size_t>& idx, int depth) {
        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (idx.size() <= 1 || depth >= height_limit) {
            tree.nodes[static_cast<std::size_t>(id)].size = idx.size();
            return id;
        }
        std::size_t d = data.front().size();
        // candidate features must vary within this node
        std::vector<std::size_t> candidates;
        for (std::size_t f = 0; f < d; ++f) {
            double lo = data[idx[0]][f], hi = lo;
            for (std::size_t i : idx) {
                lo = std::min(lo, data[i][f]);
                hi = std::max(hi, data[i][f]);
            }
            if (hi > lo) candidates.push_back(f);
        }
        if (candidates.empty()) {
            tree.nodes[static_cast<std::size_t>(id)].size = idx.size();
            return id;
        }
        std::size_t f = candidates[rng.next_below(candidates.size())];
        double lo = data[idx[0]][f], hi = lo;
        for (std::size_t i : idx) {
            lo = std::min(lo, data[i][f]);
            hi = std::max(hi, data[i][f]);
        }
        double u = rng.next_uniform();
        double split = lo + u * (hi - lo);
        if (!(split > lo)) split = std::nextafter(lo, hi); // keep both sides non-empty
        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (data[i][f] < split)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        std::size_t node_size = idx.size();
        idx.clear();
        idx.shrink_to_fit();
        int left = build(left_idx, depth + 1);
        int right = build(right_idx, depth + 1);
        IsolationTree::Node& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(f);
        node.split = split;
        node.left = left;
        node.right = right;
        node.size = node_size;
        return id;
    }
};

} // namespace

IsolationForest iforest_fit(const std::vector<std::vector<double>>& data, std::size_t psi,
                            std::size_t n_trees, std::uint64_t seed) {
    if (data.empty()) throw DataError("iforest_fit: empty dataset");
    std::size_t d = data.front().size();
    if (d == 0) throw DataError("iforest_fit: zero-dimensional data");
    for (const auto& r : data)
        if (r.size() != d) throw DataError("iforest_fit: ragged rows");
    if (psi < 2 || n_trees < 1) throw ConfigError("iforest_fit: bad psi or tree count");

    IsolationForest forest;
    forest.psi = std::min(psi, data.size());
    forest.dim = d;
    forest.seed = seed;
    int height_limit =
        static_cast<int>(std::ceil(std::log2(static_cast<double>(forest.psi))));

    Rng root(seed, 0);
    for (std::size_t ti = 0; ti < n_trees; ++ti) {
        Rng rng = root.split(ti);
        // subsample without replacement (partial Fisher-Yates)
        std::vector<std::size_t> pool(data.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        std::vector<std::size_t> sub;
        sub.reserve(forest.psi);
        for (std::size_t i = 0; i < forest.psi; ++i) {
            std::size_t j = i + rng.next_below(pool.size() - i);
            std::swap(pool[i], pool[j]);
            sub.push_back(pool[i]);
        }
        IsolationTree tree;
        Builder builder{data, tree, height_limit, rng};
        builder.build(sub, 0);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

namespace {

double path_length(const IsolationTree& tree, std::span<const double> x) {
    int id = 0;
    int depth = 0;
    for (;;) {
        const IsolationTree::Node& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0)
            return static_cast<double>(depth) + iforest_avg_path_length(node.size);
        id = x[static_cast<std::size_t>(node.feature)] < node.split ? node.left : node.right;
        ++depth;
    }
}

} // namespace

double iforest_score(const IsolationForest& forest, std::span<const double> x) {
    if (x.size() != forest.dim) throw DataError("iforest_score: dim mismatch");
    if (forest.trees.empty()) throw DataError("iforest_score: empty forest");
    double total = 0.0;
    for (const IsolationTree& t : forest.trees) total += path_length(t, x);
    double mean_path = total / static_cast<double>(forest.trees.size());
    return std::pow(2.0, -mean_path / iforest_avg_path_length(forest.psi));
}

nlohmann::json iforest_to_json(const IsolationForest& f) {
    nlohmann::json trees = nlohmann::json::array();
    for (const IsolationTree& t : f.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes)
            nodes.push_back({{"f", n.feature},
                             {"s", n.split},
                             {"l", n.left},
                             {"r", n.right},
                             {"n", n.size}});
        trees.push_back(std::move(nodes));
    }
    return {{"psi", f.psi}, {"dim", f.dim}, {"seed", f.seed}, {"trees", trees}};
}

IsolationForest iforest_from_json(const nlohmann::json& j) {
    IsolationForest f;
    f.psi = j.at("psi").get<std::size_t>();
    f.dim = j.at("dim").get<std::size_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("trees")) {
        IsolationTree t;
        for (const auto& nj : tj) {
            IsolationTree::Node n;
            n.feature = nj.at("f").get<int>();
            n.split = nj.at("s").get<double>();
            n.left = nj.at("l").get<int>();
            n.right = nj.at("r").get<int>();
            n.size = nj.at("n").get<std::size_t>();
            t.nodes.push_back(n);
        }
        f.trees.push_back(std::move(t));
    }
    return f;
}

} // namespace disc
