#include "disc/dense_net.hpp"

#include <algorithm>
#include <cmath>

#include "disc/errors.hpp"

namespace disc {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Silu: return "silu";
    }
    throw ConfigError("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "silu") return Activation::Silu;
    throw ConfigError("unknown activation: " + name);
}

double activate(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Silu: return z / (1.0 + std::exp(-z));
    }
    return z;
}

double activate_grad(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Silu: {
            double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 + z * (1.0 - s));
        }
    }
    return 1.0;
}

DenseNet make_dense_net(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                        Rng& rng) {
    if (dims.size() < 2) throw ConfigError("dense net needs at least input and output dims");
    if (acts.size() != dims.size() - 1)
        throw ConfigError("dense net needs one activation per layer");
    for (std::size_t d : dims)
        if (d == 0) throw ConfigError("dense net layer width must be positive");
    DenseNet net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.w = Matrix(dims[l + 1], dims[l]);
        layer.b.assign(dims[l + 1], 0.0);
        layer.act = acts[l];
        double fan_in = static_cast<double>(dims[l]);
        double fan_out = static_cast<double>(dims[l + 1]);
        double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : layer.w.data) w = (2.0 * rng.next_uniform() - 1.0) * a;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> net_forward(const DenseNet& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) throw NumericError("net_forward: input dim mismatch");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> nxt;
    for (const Layer& layer : net.layers) {
        nxt.assign(layer.w.rows, 0.0);
        for (std::size_t i = 0; i < layer.w.rows; ++i) {
            double z = layer.b[i];
            const double* wrow = &layer.w.data[i * layer.w.cols];
            for (std::size_t j = 0; j < layer.w.cols; ++j) z += wrow[j] * cur[j];
            nxt[i] = activate(layer.act, z);
        }
        cur.swap(nxt);
    }
    return cur;
}

ForwardTrace net_forward_trace(const DenseNet& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) throw NumericError("net_forward_trace: input dim mismatch");
    ForwardTrace tr;
    tr.pre.resize(net.layers.size());
    tr.post.resize(net.layers.size());
    const std::vector<double> input(x.begin(), x.end());
    const std::vector<double>* cur = &input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        tr.pre[l].assign(layer.w.rows, 0.0);
        tr.post[l].assign(layer.w.rows, 0.0);
        for (std::size_t i = 0; i < layer.w.rows; ++i) {
            double z = layer.b[i];
            const double* wrow = &layer.w.data[i * layer.w.cols];
            for (std::size_t j = 0; j < layer.w.cols; ++j) z += wrow[j] * (*cur)[j];
            tr.pre[l][i] = z;
            tr.post[l][i] = activate(layer.act, z);
        }
        cur = &tr.post[l];
    }
    return tr;
}

Gradients zero_gradients(const DenseNet& net) {
    Gradients g;
    for (const Layer& layer : net.layers) {
        g.dw.emplace_back(layer.w.rows, layer.w.cols);
        g.db.emplace_back(layer.b.size(), 0.0);
    }
    g.dx.assign(net.input_dim(), 0.0);
    return g;
}

void net_backward(const DenseNet& net, std::span<const double> x, const ForwardTrace& trace,
                  std::span<const double> dLdy, Gradients& grads) {
    const std::size_t L = net.layers.size();
    if (dLdy.size() != net.output_dim()) throw NumericError("net_backward: grad dim mismatch");
    std::vector<double> delta(dLdy.begin(), dLdy.end());
    for (std::size_t li = L; li-- > 0;) {
        const Layer& layer = net.layers[li];
        // through the activation
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] *= activate_grad(layer.act, trace.pre[li][i]);
        const std::vector<double> input_vec =
            li == 0 ? std::vector<double>(x.begin(), x.end()) : trace.post[li - 1];
        for (std::size_t i = 0; i < layer.w.rows; ++i) {
            grads.db[li][i] += delta[i];
            double* dwrow = &grads.dw[li].data[i * layer.w.cols];
            for (std::size_t j = 0; j < layer.w.cols; ++j) dwrow[j] += delta[i] * input_vec[j];
        }
        std::vector<double> prev(layer.w.cols, 0.0);
        for (std::size_t i = 0; i < layer.w.rows; ++i) {
            const double* wrow = &layer.w.data[i * layer.w.cols];
            for (std::size_t j = 0; j < layer.w.cols; ++j) prev[j] += wrow[j] * delta[i];
        }
        if (li == 0) {
            for (std::size_t j = 0; j < prev.size(); ++j) grads.dx[j] += prev[j];
        }
        delta.swap(prev);
    }
}

namespace {

std::size_t param_count(const DenseNet& net) {
    std::size_t n = 0;
    for (const Layer& l : net.layers) n += l.w.data.size() + l.b.size();
    return n;
}

template <typename F>
void for_each_param(DenseNet& net, const Gradients& grads, F&& f) {
    std::size_t k = 0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        Layer& layer = net.layers[li];
        for (std::size_t i = 0; i < layer.w.data.size(); ++i, ++k)
            f(k, layer.w.data[i], grads.dw[li].data[i]);
        for (std::size_t i = 0; i < layer.b.size(); ++i, ++k) f(k, layer.b[i], grads.db[li][i]);
    }
}

} // namespace

Optimizer::Optimizer(const DenseNet& net, const TrainConfig& cfg) : cfg_(cfg) {
    if (cfg_.optimizer == OptimizerKind::Adam) {
        m_.assign(param_count(net), 0.0);
        v_.assign(param_count(net), 0.0);
    }
}

void Optimizer::step(DenseNet& net, const Gradients& grads) {
    ++step_count_;
    if (cfg_.optimizer == OptimizerKind::Sgd) {
        for_each_param(net, grads,
                       [&](std::size_t, double& p, double g) { p -= cfg_.learning_rate * g; });
        return;
    }
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for_each_param(net, grads, [&](std::size_t k, double& p, double g) {
        m_[k] = b1 * m_[k] + (1.0 - b1) * g;
        v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
        double mhat = m_[k] / bc1;
        double vhat = v_[k] / bc2;
        p -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
    });
}

std::vector<double> softmax(std::span<const double> logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

double log_sum_exp(std::span<const double> v) {
    double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

namespace {

// Returns per-sample loss and fills dLdy.
double loss_and_grad(LossKind loss, std::span<const double> y, std::span<const double> t,
                     std::vector<double>& dLdy) {
    dLdy.assign(y.size(), 0.0);
    if (loss == LossKind::Mse) {
        double l = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double d = y[i] - t[i];
            l += d * d;
            dLdy[i] = 2.0 * d;
        }
        return l;
    }
    // softmax cross-entropy with one-hot target
    std::vector<double> p = softmax(y);
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (t[i] > 0.0) l -= t[i] * std::log(std::max(p[i], 1e-300));
        dLdy[i] = p[i] - t[i];
    }
    return l;
}

} // namespace

TrainResult train(const DenseNet& initial, const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::vector<double>>& targets, LossKind loss,
                  const TrainConfig& cfg) {
    if (inputs.empty()) throw DataError("train: empty dataset");
    if (inputs.size() != targets.size()) throw DataError("train: inputs/targets size mismatch");
    if (cfg.epochs < 0 || cfg.batch_size <= 0 || cfg.learning_rate <= 0.0)
        throw ConfigError("train: invalid training config");

    TrainResult res;
    res.net = initial;
    Optimizer opt(res.net, cfg);
    Rng shuffle_rng(cfg.seed, 0x7261696ELL); // dedicated stream for epoch shuffles

    std::vector<std::size_t> order(inputs.size());
    std::vector<double> dLdy;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle_indices(order, shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            Gradients grads = zero_gradients(res.net);
            for (std::size_t bi = start; bi < end; ++bi) {
                const auto& x = inputs[order[bi]];
                const auto& t = targets[order[bi]];
                ForwardTrace tr = net_forward_trace(res.net, x);
                epoch_loss += loss_and_grad(loss, tr.post.back(), t, dLdy);
                net_backward(res.net, x, tr, dLdy, grads);
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (Matrix& m : grads.dw)
                for (double& g : m.data) g *= inv;
            for (auto& b : grads.db)
                for (double& g : b) g *= inv;
            opt.step(res.net, grads);
        }
        epoch_loss /= static_cast<double>(inputs.size());
        if (!std::isfinite(epoch_loss))
            throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                               "; consider lowering the learning rate");
        res.epoch_loss.push_back(epoch_loss);
    }
    return res;
}

nlohmann::json dense_net_to_json(const DenseNet& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& l : net.layers) {
        layers.push_back({{"rows", l.w.rows},
                          {"cols", l.w.cols},
                          {"w", l.w.data},
                          {"b", l.b},
                          {"act", activation_name(l.act)}});
    }
    return {{"layers", layers}};
}

DenseNet dense_net_from_json(const nlohmann::json& j) {
    DenseNet net;
    try {
        for (const auto& lj : j.at("layers")) {
            Layer l;
            l.w.rows = lj.at("rows").get<std::size_t>();
            l.w.cols = lj.at("cols").get<std::size_t>();
            l.w.data = lj.at("w").get<std::vector<double>>();
            l.b = lj.at("b").get<std::vector<double>>();
            l.act = activation_from_name(lj.at("act").get<std::string>());
            if (l.w.data.size() != l.w.rows * l.w.cols || l.b.size() != l.w.rows)
                throw DataError("dense net checkpoint has inconsistent shapes");
            net.layers.push_back(std::move(l));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dense net checkpoint malformed: ") + e.what());
    }
    return net;
}

} // namespace disc
