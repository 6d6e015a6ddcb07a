#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "disc/diffusion.hpp"
#include "disc/metrics.hpp"

namespace disc {

struct TrajectoryConfig {
    std::vector<int> grid; // strictly increasing timesteps in [1, T]
    int n_draws = 1;       // noise draws averaged per level
    std::vector<MetricId> metrics;
    MetricParams params;
    std::uint64_t base_seed = 0;
};

// n_levels timesteps evenly spaced over [0.05 T, 0.95 T], rounded, deduped.
std::vector<int> default_grid(int T, int n_levels = 10);

TrajectoryConfig default_trajectory_config(int T, bool image_modality, std::uint64_t base_seed);

nlohmann::json trajectory_config_to_json(const TrajectoryConfig& cfg);
TrajectoryConfig trajectory_config_from_json(const nlohmann::json& j);

// Hash of the full embedding configuration; embeddings carry it so that
// downstream consumers can refuse mismatched inputs.
std::string trajectory_config_hash(const TrajectoryConfig& cfg);

struct TrajectoryEmbedding {
    std::uint64_t sample_id = 0;
    std::vector<double> values; // level-major: all metrics at grid[0], then grid[1], ...
    std::string config_hash;
};

// Noise draws depend only on (base_seed, sample_id, level, draw), so results
// are independent of batch composition and processing order.
TrajectoryEmbedding extract_embedding(const DenoiserModel& model, std::span<const double> x,
                                      const TrajectoryConfig& cfg, std::uint64_t sample_id);

std::vector<TrajectoryEmbedding> extract_embeddings(const DenoiserModel& model,
                                                    const std::vector<std::vector<double>>& xs,
                                                    const TrajectoryConfig& cfg,
                                                    std::uint64_t first_sample_id = 0);

std::vector<std::string> embedding_column_names(const TrajectoryConfig& cfg);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev; // floored
};

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows, double floor = 1e-8);
std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> v);

} // namespace disc
