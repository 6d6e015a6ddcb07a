#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "disc/dense_net.hpp"
#include "disc/diffusion.hpp"

namespace disc {

struct ImageBenchConfig {
    std::size_t side = 16;
    std::size_t n_train_per_class = 128; // denoiser/classifier training set
    std::size_t n_id_eval = 150;
    std::size_t n_per_family = 30;
    double occlusion_p = 0.3;
    double noise_sigma = 0.5;
    double fgsm_eps = 0.15;
    DenoiserConfig denoiser{200, 1e-4, 0.02, {192, 192}};
    TrainConfig denoiser_train{1e-3, 100, 32, OptimizerKind::Adam, 0.9, 0.999, 1e-8, 0};
    TrainConfig classifier_train{1e-3, 16, 32, OptimizerKind::Adam, 0.9, 0.999, 1e-8, 0};
    TrainConfig supervised_train{1e-3, 150, 32, OptimizerKind::Adam, 0.9, 0.999, 1e-8, 0};
    int traj_levels = 10;
    int n_draws = 3;
    std::size_t iforest_psi = 256;
    std::size_t iforest_trees = 100;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct ImageSeedResult {
    std::uint64_t seed = 0;
    double classifier_train_acc = 0.0;
    double disc_iforest_auroc = 0.0;
    std::map<std::string, double> disc_family_auroc; // vs the id eval set
    std::map<std::string, double> baseline_auroc;
    double disc_cluster_acc = 0.0;
    std::map<std::string, double> baseline_cluster_acc;
    double disc_supervised_acc = 0.0;
    double all_detectors_supervised_acc = 0.0;
};

struct ImageBenchResult {
    std::vector<ImageSeedResult> seeds;
    std::vector<std::string> families;
    double med_disc_iforest_auroc = 0.0;
    std::map<std::string, double> med_baseline_auroc;
    double med_disc_cluster_acc = 0.0;
    std::map<std::string, double> med_baseline_cluster_acc;
    double med_disc_supervised_acc = 0.0;
    double med_all_detectors_supervised_acc = 0.0;
};

ImageBenchResult run_image_benchmark(const ImageBenchConfig& cfg);

struct TabularBenchConfig {
    std::size_t dim = 8;
    std::size_t n_train_per_comp = 128;
    std::size_t n_id_eval = 160;
    std::size_t n_per_family = 40;
    double rho = 0.8;
    double scale_a = 1.6;
    double scale_b = 1.0;
    double noise_sigma = 1.2;
    double novel_min_sds = 4.0;
    DenoiserConfig denoiser{200, 1e-4, 0.02, {128, 128}};
    TrainConfig denoiser_train{1e-3, 120, 32, OptimizerKind::Adam, 0.9, 0.999, 1e-8, 0};
    int traj_levels = 10;
    int n_draws = 3;
    std::size_t iforest_psi = 256;
    std::size_t iforest_trees = 100;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct TabularSeedResult {
    std::uint64_t seed = 0;
    double full_embedding_auroc = 0.0; // all four metrics
    double mse_only_auroc = 0.0;       // reconstruction-error trajectory alone
    std::map<std::string, double> full_family_auroc;
    std::map<std::string, double> mse_family_auroc;
};

struct TabularBenchResult {
    std::vector<TabularSeedResult> seeds;
    std::vector<std::string> families;
    double med_full_embedding_auroc = 0.0;
    double med_mse_only_auroc = 0.0;
};

TabularBenchResult run_tabular_benchmark(const TabularBenchConfig& cfg);

double median(std::vector<double> v);

nlohmann::json image_bench_to_json(const ImageBenchResult& r);
nlohmann::json tabular_bench_to_json(const TabularBenchResult& r);

} // namespace disc
