#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "disc/rng.hpp"

namespace disc {

// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

enum class Activation { Identity, Relu, Silu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

double activate(Activation a, double z);
double activate_grad(Activation a, double z); // derivative w.r.t. pre-activation

struct Layer {
    Matrix w; // (out, in)
    std::vector<double> b;
    Activation act = Activation::Identity;
};

struct DenseNet {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }
};

// dims = {in, h1, ..., out}; acts has dims.size()-1 entries.
// Weights are Glorot-uniform, biases zero.
DenseNet make_dense_net(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                        Rng& rng);

struct ForwardTrace {
    std::vector<std::vector<double>> pre;  // pre-activations per layer
    std::vector<std::vector<double>> post; // post-activations; post.back() is the output
};

std::vector<double> net_forward(const DenseNet& net, std::span<const double> x);
ForwardTrace net_forward_trace(const DenseNet& net, std::span<const double> x);

struct Gradients {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;
    std::vector<double> dx;
};

Gradients zero_gradients(const DenseNet& net);

// Backprop of dL/dy through the trace; accumulates into grads.
void net_backward(const DenseNet& net, std::span<const double> x, const ForwardTrace& trace,
                  std::span<const double> dLdy, Gradients& grads);

enum class LossKind { Mse, CrossEntropy };
enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 10;
    int batch_size = 32;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
};

// Optimizer state over a flattened view of the parameters.
class Optimizer {
  public:
    Optimizer(const DenseNet& net, const TrainConfig& cfg);
    void step(DenseNet& net, const Gradients& grads);

  private:
    TrainConfig cfg_;
    std::vector<double> m_, v_;
    long step_count_ = 0;
};

struct TrainResult {
    DenseNet net;
    std::vector<double> epoch_loss;
};

// Per-sample loss: mse sums squared error over output dims; cross_entropy is
// softmax NLL against a one-hot target. Epoch loss is the mean over samples,
// computed with pre-update parameters for each batch.
TrainResult train(const DenseNet& initial, const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::vector<double>>& targets, LossKind loss,
                  const TrainConfig& cfg);

std::vector<double> softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> v);

nlohmann::json dense_net_to_json(const DenseNet& net);
DenseNet dense_net_from_json(const nlohmann::json& j);

} // namespace disc
