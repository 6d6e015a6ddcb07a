#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace disc {

struct IsolationTree {
    struct Node {
        int feature = -1; // -1 marks a leaf
        double split = 0.0;
        int left = -1;
        int right = -1;
        std::size_t size = 0; // external size at leaves
    };
    std::vector<Node> nodes; // node 0 is the root
};

struct IsolationForest {
    std::vector<IsolationTree> trees;
    std::size_t psi = 256;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
};

// Average unsuccessful-search path length; c(0)=c(1)=0, c(2)=1.
double iforest_avg_path_length(std::size_t n);

// psi-subsampled trees with height limit ceil(log2 psi); random feature
// among non-constant ones, split uniform inside the node's (min, max).
IsolationForest iforest_fit(const std::vector<std::vector<double>>& data, std::size_t psi = 256,
                            std::size_t n_trees = 100, std::uint64_t seed = 0);

// Anomaly score 2^(-E[h]/c(psi)) in (0,1); larger means more anomalous.
double iforest_score(const IsolationForest& forest, std::span<const double> x);

nlohmann::json iforest_to_json(const IsolationForest& f);
IsolationForest iforest_from_json(const nlohmann::json& j);

} // namespace disc
