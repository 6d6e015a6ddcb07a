#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace disc {

struct KMeansModel {
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
};

// k-means++ seeding, Lloyd iterations (ties to the lowest centroid id,
// empty clusters re-seeded to the farthest point). Runs n_restarts times
// with derived seeds and keeps the lowest-inertia model.
KMeansModel kmeans_fit(const std::vector<std::vector<double>>& data, std::size_t k,
                       std::uint64_t seed = 0, int n_restarts = 5, int max_iter = 300);

std::size_t kmeans_assign(const KMeansModel& model, std::span<const double> x);

std::vector<std::size_t> kmeans_assign_all(const KMeansModel& model,
                                           const std::vector<std::vector<double>>& data);

nlohmann::json kmeans_to_json(const KMeansModel& m);
KMeansModel kmeans_from_json(const nlohmann::json& j);

} // namespace disc
