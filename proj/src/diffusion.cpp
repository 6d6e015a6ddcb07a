#include "disc/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "disc/errors.hpp"

namespace disc {

double NoiseSchedule::beta_at(int t) const {
    if (t < 1 || t > T) throw NumericError("beta_at: timestep out of range");
    return beta[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t == 0) return 1.0;
    if (t < 0 || t > T) throw NumericError("alpha_bar_at: timestep out of range");
    return alpha_bar[static_cast<std::size_t>(t - 1)];
}

NoiseSchedule make_schedule(int T, double beta_min, double beta_max) {
    if (T < 1) throw ConfigError("schedule: T must be >= 1");
    if (!(beta_min > 0.0) || !(beta_max < 1.0) || beta_min > beta_max)
        throw ConfigError("schedule: need 0 < beta_min <= beta_max < 1");
    NoiseSchedule s;
    s.T = T;
    s.beta.resize(static_cast<std::size_t>(T));
    s.alpha_bar.resize(static_cast<std::size_t>(T));
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        double frac = T == 1 ? 0.0 : static_cast<double>(t - 1) / static_cast<double>(T - 1);
        double b = beta_min + (beta_max - beta_min) * frac;
        s.beta[static_cast<std::size_t>(t - 1)] = b;
        prod *= 1.0 - b;
        s.alpha_bar[static_cast<std::size_t>(t - 1)] = prod;
    }
    return s;
}

std::vector<double> timestep_embedding(int t, int T) {
    if (t < 1 || t > T) throw NumericError("timestep_embedding: timestep out of range");
    std::vector<double> e(kTimestepEmbedDim, 0.0);
    int buckets = std::min<int>(static_cast<int>(kTimestepEmbedDim), (T + 19) / 20);
    long idx = static_cast<long>(t - 1) * buckets / T;
    if (idx >= buckets) idx = buckets - 1;
    e[static_cast<std::size_t>(idx)] = 1.0;
    return e;
}

std::vector<double> forward_noise(std::span<const double> x0, int t, std::span<const double> eps,
                                  const NoiseSchedule& sched) {
    if (eps.size() != x0.size()) throw NumericError("forward_noise: eps shape mismatch");
    double ab = sched.alpha_bar_at(t);
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = sa * x0[i] + sb * eps[i];
    return out;
}

namespace {

std::vector<double> denoiser_input(std::span<const double> x_t, int t, int T) {
    std::vector<double> in(x_t.begin(), x_t.end());
    std::vector<double> emb = timestep_embedding(t, T);
    in.insert(in.end(), emb.begin(), emb.end());
    return in;
}

} // namespace

std::vector<double> predict_noise(const DenoiserModel& model, std::span<const double> x_t, int t) {
    if (x_t.size() != model.data_dim()) throw NumericError("predict_noise: data dim mismatch");
    return net_forward(model.net, denoiser_input(x_t, t, model.schedule.T));
}

std::vector<double> denoise_posterior_mean(const DenoiserModel& model, std::span<const double> x_t,
                                           int t) {
    std::vector<double> eps_hat = predict_noise(model, x_t, t);
    double ab = model.schedule.alpha_bar_at(t);
    double sa = std::sqrt(ab);
    double sb = std::sqrt(1.0 - ab);
    std::vector<double> x0(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) x0[i] = (x_t[i] - sb * eps_hat[i]) / sa;
    return x0;
}

std::vector<double> denoiser_features(const DenoiserModel& model, std::span<const double> x_t,
                                      int t) {
    if (model.net.layers.size() < 2)
        throw NumericError("denoiser_features: net has no hidden layer");
    ForwardTrace tr = net_forward_trace(model.net, denoiser_input(x_t, t, model.schedule.T));
    return tr.post[tr.post.size() - 2];
}

std::vector<double> reverse_reconstruct_with(const NoiseSchedule& sched,
                                             const NoisePredictor& predict,
                                             std::span<const double> x_t, int t, int n_steps,
                                             Rng& rng) {
    if (t < 1 || t > sched.T) throw NumericError("reverse_reconstruct: timestep out of range");
    if (n_steps < 1 || n_steps > t)
        throw NumericError("reverse_reconstruct: need 1 <= n_steps <= t");

    // evenly spaced sub-grid t = tau_0 > tau_1 > ... > tau_{n_steps} = 0
    std::vector<int> grid(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        double pos = static_cast<double>(t) * static_cast<double>(n_steps - i) /
                     static_cast<double>(n_steps);
        grid[static_cast<std::size_t>(i)] = static_cast<int>(std::llround(pos));
    }

    std::vector<double> x(x_t.begin(), x_t.end());
    for (int i = 0; i < n_steps; ++i) {
        int tau = grid[static_cast<std::size_t>(i)];
        int tau_next = grid[static_cast<std::size_t>(i) + 1];
        double ab = sched.alpha_bar_at(tau);
        std::vector<double> eps_hat = predict(x, tau);
        if (eps_hat.size() != x.size())
            throw NumericError("reverse_reconstruct: predictor shape mismatch");
        double sa = std::sqrt(ab);
        double sb = std::sqrt(1.0 - ab);
        std::vector<double> x0(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) x0[j] = (x[j] - sb * eps_hat[j]) / sa;
        if (tau_next == 0) {
            x = std::move(x0);
            break;
        }
        double ab_next = sched.alpha_bar_at(tau_next);
        double var = (1.0 - ab_next) / (1.0 - ab) * (1.0 - ab / ab_next);
        double sigma = std::sqrt(std::max(0.0, var));
        double dir = std::sqrt(std::max(0.0, 1.0 - ab_next - sigma * sigma));
        double sa_next = std::sqrt(ab_next);
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = sa_next * x0[j] + dir * eps_hat[j] + sigma * rng.next_gaussian();
    }
    return x;
}

std::vector<double> reverse_reconstruct(const DenoiserModel& model, std::span<const double> x_t,
                                        int t, int n_steps, Rng& rng) {
    NoisePredictor p = [&](std::span<const double> x, int tt) {
        return predict_noise(model, x, tt);
    };
    return reverse_reconstruct_with(model.schedule, p, x_t, t, n_steps, rng);
}

DenoiserTrainResult train_denoiser(const std::vector<std::vector<double>>& data,
                                   const std::vector<std::size_t>& data_shape,
                                   const DenoiserConfig& dcfg, const TrainConfig& tcfg) {
    if (data.empty()) throw DataError("train_denoiser: empty dataset");
    std::size_t dim = 1;
    for (std::size_t s : data_shape) dim *= s;
    if (data_shape.empty() || dim == 0) throw ConfigError("train_denoiser: bad data shape");
    for (const auto& x : data)
        if (x.size() != dim) throw DataError("train_denoiser: sample dim mismatch");

    DenoiserTrainResult res;
    res.model.schedule = make_schedule(dcfg.T, dcfg.beta_min, dcfg.beta_max);
    res.model.data_shape = data_shape;

    std::vector<std::size_t> dims;
    dims.push_back(dim + kTimestepEmbedDim);
    for (std::size_t h : dcfg.hidden) dims.push_back(h);
    dims.push_back(dim);
    std::vector<Activation> acts(dims.size() - 1, Activation::Silu);
    acts.back() = Activation::Identity;

    Rng init_rng(tcfg.seed, 1);
    res.model.net = make_dense_net(dims, acts, init_rng);

    Optimizer opt(res.model.net, tcfg);
    Rng shuffle_rng(tcfg.seed, 2);
    Rng draw_root(tcfg.seed, 3);

    const int T = dcfg.T;
    std::vector<std::size_t> order(data.size());
    std::vector<double> dLdy(dim);
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle_indices(order, shuffle_rng);
        Rng epoch_rng = draw_root.split(static_cast<std::uint64_t>(epoch));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(tcfg.batch_size)) {
            std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_size));
            Gradients grads = zero_gradients(res.model.net);
            for (std::size_t bi = start; bi < end; ++bi) {
                std::size_t si = order[bi];
                Rng r = epoch_rng.split(si);
                int t = 1 + static_cast<int>(r.next_below(static_cast<std::uint64_t>(T)));
                std::vector<double> eps = gaussian_sample(r, dim);
                std::vector<double> x_t = forward_noise(data[si], t, eps, res.model.schedule);
                std::vector<double> in = denoiser_input(x_t, t, T);
                ForwardTrace tr = net_forward_trace(res.model.net, in);
                const std::vector<double>& eps_hat = tr.post.back();
                for (std::size_t j = 0; j < dim; ++j) {
                    double d = eps_hat[j] - eps[j];
                    epoch_loss += d * d;
                    dLdy[j] = 2.0 * d;
                }
                net_backward(res.model.net, in, tr, dLdy, grads);
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (Matrix& m : grads.dw)
                for (double& g : m.data) g *= inv;
            for (auto& b : grads.db)
                for (double& g : b) g *= inv;
            opt.step(res.model.net, grads);
        }
        epoch_loss /= static_cast<double>(data.size());
        if (!std::isfinite(epoch_loss))
            throw NumericError("train_denoiser: non-finite loss at epoch " +
                               std::to_string(epoch) + "; consider lowering the learning rate");
        res.epoch_loss.push_back(epoch_loss);
    }
    return res;
}

double denoiser_probe_loss(const DenoiserModel& model,
                           const std::vector<std::vector<double>>& data, std::uint64_t seed) {
    if (data.empty()) throw DataError("denoiser_probe_loss: empty dataset");
    std::size_t dim = model.data_dim();
    Rng root(seed, 4);
    double loss = 0.0;
    for (std::size_t si = 0; si < data.size(); ++si) {
        Rng r = root.split(si);
        int t = 1 + static_cast<int>(r.next_below(static_cast<std::uint64_t>(model.schedule.T)));
        std::vector<double> eps = gaussian_sample(r, dim);
        std::vector<double> x_t = forward_noise(data[si], t, eps, model.schedule);
        std::vector<double> eps_hat = predict_noise(model, x_t, t);
        for (std::size_t j = 0; j < dim; ++j) {
            double d = eps_hat[j] - eps[j];
            loss += d * d;
        }
    }
    return loss / static_cast<double>(data.size());
}

nlohmann::json denoiser_to_json(const DenoiserModel& model) {
    return {{"T", model.schedule.T},
            {"beta", model.schedule.beta},
            {"data_shape", model.data_shape},
            {"net", dense_net_to_json(model.net)}};
}

DenoiserModel denoiser_from_json(const nlohmann::json& j) {
    DenoiserModel m;
    m.schedule.T = j.at("T").get<int>();
    m.schedule.beta = j.at("beta").get<std::vector<double>>();
    if (static_cast<int>(m.schedule.beta.size()) != m.schedule.T)
        throw DataError("denoiser checkpoint: beta length != T");
    m.schedule.alpha_bar.resize(m.schedule.beta.size());
    double prod = 1.0;
    for (std::size_t i = 0; i < m.schedule.beta.size(); ++i) {
        prod *= 1.0 - m.schedule.beta[i];
        m.schedule.alpha_bar[i] = prod;
    }
    m.data_shape = j.at("data_shape").get<std::vector<std::size_t>>();
    m.net = dense_net_from_json(j.at("net"));
    return m;
}

} // namespace disc
