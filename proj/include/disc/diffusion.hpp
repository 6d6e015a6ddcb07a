#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "disc/dense_net.hpp"
#include "disc/rng.hpp"

namespace disc {

// Variance-preserving schedule with a linear beta ramp. Timesteps are
// 1-based: beta(t) and alpha_bar(t) for t in [1, T].
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;      // beta[t-1]
    std::vector<double> alpha_bar; // alpha_bar[t-1], cumulative product of (1 - beta)

    double beta_at(int t) const;
    double alpha_bar_at(int t) const; // alpha_bar(0) == 1 by convention
};

NoiseSchedule make_schedule(int T, double beta_min, double beta_max);

inline constexpr std::size_t kTimestepEmbedDim = 16;

// One-hot bucket embedding of t over ceil(T/20) buckets, zero padded/capped
// to a fixed 16-dim vector.
std::vector<double> timestep_embedding(int t, int T);

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps
std::vector<double> forward_noise(std::span<const double> x0, int t, std::span<const double> eps,
                                  const NoiseSchedule& sched);

struct DenoiserModel {
    DenseNet net; // input: data ++ timestep embedding; output: predicted noise
    NoiseSchedule schedule;
    std::vector<std::size_t> data_shape; // {h, w} for images, {d} for tabular

    std::size_t data_dim() const {
        std::size_t n = 1;
        for (std::size_t s : data_shape) n *= s;
        return data_shape.empty() ? 0 : n;
    }
};

std::vector<double> predict_noise(const DenoiserModel& model, std::span<const double> x_t, int t);

// Posterior-mean estimate of x0 given x_t (plug the predicted noise into the
// forward relation and solve for x0).
std::vector<double> denoise_posterior_mean(const DenoiserModel& model, std::span<const double> x_t,
                                           int t);

// Penultimate hidden activations of the denoiser at (x_t, t).
std::vector<double> denoiser_features(const DenoiserModel& model, std::span<const double> x_t,
                                      int t);

using NoisePredictor = std::function<std::vector<double>(std::span<const double>, int)>;

// Ancestral reverse pass over an evenly spaced sub-grid of n_steps timesteps
// from t down to 0. n_steps == 1 reduces to the posterior-mean estimate.
std::vector<double> reverse_reconstruct_with(const NoiseSchedule& sched,
                                             const NoisePredictor& predict,
                                             std::span<const double> x_t, int t, int n_steps,
                                             Rng& rng);

std::vector<double> reverse_reconstruct(const DenoiserModel& model, std::span<const double> x_t,
                                        int t, int n_steps, Rng& rng);

struct DenoiserConfig {
    int T = 200;
    double beta_min = 1e-4;
    double beta_max = 0.02;
    std::vector<std::size_t> hidden = {256, 256}; // silu hidden layers
};

struct DenoiserTrainResult {
    DenoiserModel model;
    std::vector<double> epoch_loss; // mean squared noise-prediction error per epoch
};

// Standard noise-prediction objective: sample t uniform in [1, T] and fresh
// gaussian noise per example per epoch, minimize |eps - eps_hat|^2.
DenoiserTrainResult train_denoiser(const std::vector<std::vector<double>>& data,
                                   const std::vector<std::size_t>& data_shape,
                                   const DenoiserConfig& dcfg, const TrainConfig& tcfg);

// Mean |eps - eps_hat|^2 over one seeded (t, eps) draw per sample.
double denoiser_probe_loss(const DenoiserModel& model,
                           const std::vector<std::vector<double>>& data, std::uint64_t seed);

nlohmann::json denoiser_to_json(const DenoiserModel& model);
DenoiserModel denoiser_from_json(const nlohmann::json& j);

} // namespace disc
