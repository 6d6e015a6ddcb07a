#include "disc/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "disc/errors.hpp"
#include "disc/io.hpp"

namespace disc {

std::vector<int> default_grid(int T, int n_levels) {
    if (T < 1 || n_levels < 1) throw ConfigError("default_grid: bad arguments");
    double lo = 0.05 * T;
    double hi = 0.95 * T;
    std::vector<int> grid;
    for (int i = 0; i < n_levels; ++i) {
        double pos = n_levels == 1 ? lo : lo + (hi - lo) * i / (n_levels - 1);
        int t = std::clamp(static_cast<int>(std::llround(pos)), 1, T);
        if (grid.empty() || t > grid.back()) grid.push_back(t);
    }
    return grid;
}

TrajectoryConfig default_trajectory_config(int T, bool image_modality, std::uint64_t base_seed) {
    TrajectoryConfig cfg;
    cfg.grid = default_grid(T);
    cfg.n_draws = 1;
    cfg.metrics = image_modality ? default_image_metrics() : default_tabular_metrics();
    cfg.base_seed = base_seed;
    return cfg;
}

nlohmann::json trajectory_config_to_json(const TrajectoryConfig& cfg) {
    nlohmann::json names = nlohmann::json::array();
    for (MetricId id : cfg.metrics) names.push_back(metric_name(id));
    return {{"grid", cfg.grid},
            {"n_draws", cfg.n_draws},
            {"metrics", names},
            {"ssim_window", cfg.params.ssim_window},
            {"dwt_bins", cfg.params.dwt_bins},
            {"hist_eps", cfg.params.hist_eps},
            {"lc_draws", cfg.params.lc_draws},
            {"lc_radius", cfg.params.lc_radius},
            {"tie_tol", cfg.params.tie_tol},
            {"base_seed", cfg.base_seed}};
}

TrajectoryConfig trajectory_config_from_json(const nlohmann::json& j) {
    TrajectoryConfig cfg;
    cfg.grid = j.at("grid").get<std::vector<int>>();
    cfg.n_draws = j.at("n_draws").get<int>();
    for (const auto& n : j.at("metrics")) cfg.metrics.push_back(metric_from_name(n.get<std::string>()));
    cfg.params.ssim_window = j.at("ssim_window").get<int>();
    cfg.params.dwt_bins = j.at("dwt_bins").get<int>();
    cfg.params.hist_eps = j.at("hist_eps").get<double>();
    cfg.params.lc_draws = j.at("lc_draws").get<int>();
    cfg.params.lc_radius = j.at("lc_radius").get<double>();
    cfg.params.tie_tol = j.at("tie_tol").get<double>();
    cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    return cfg;
}

std::string trajectory_config_hash(const TrajectoryConfig& cfg) {
    return config_hash(trajectory_config_to_json(cfg));
}

namespace {

void validate_config(const TrajectoryConfig& cfg, const DenoiserModel& model) {
    if (cfg.grid.empty()) throw ConfigError("trajectory: empty noise level grid");
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (cfg.grid[i] < 1 || cfg.grid[i] > model.schedule.T)
            throw ConfigError("trajectory: grid timestep out of schedule range");
        if (i > 0 && cfg.grid[i] <= cfg.grid[i - 1])
            throw ConfigError("trajectory: grid must be strictly increasing");
    }
    if (cfg.n_draws < 1) throw ConfigError("trajectory: n_draws must be >= 1");
    if (cfg.metrics.empty()) throw ConfigError("trajectory: no metrics enabled");
    bool image = model.data_shape.size() == 2;
    for (MetricId id : cfg.metrics) {
        bool image_only = id == MetricId::Ssim || id == MetricId::LbpKl ||
                          id == MetricId::DwtKlLh || id == MetricId::DwtKlHl ||
                          id == MetricId::DwtKlHh;
        if (image_only && !image)
            throw ConfigError("trajectory: metric " + metric_name(id) +
                              " requires image-shaped data");
    }
}

std::vector<double> clamp01(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::clamp(x, 0.0, 1.0);
    return out;
}

} // namespace

TrajectoryEmbedding extract_embedding(const DenoiserModel& model, std::span<const double> x,
                                      const TrajectoryConfig& cfg, std::uint64_t sample_id) {
    validate_config(cfg, model);
    std::size_t dim = model.data_dim();
    if (x.size() != dim) throw DataError("extract_embedding: sample dim mismatch");
    bool image = model.data_shape.size() == 2;
    std::size_t h = image ? model.data_shape[0] : 0;
    std::size_t w = image ? model.data_shape[1] : 0;

    TrajectoryEmbedding emb;
    emb.sample_id = sample_id;
    emb.config_hash = trajectory_config_hash(cfg);
    emb.values.assign(cfg.grid.size() * cfg.metrics.size(), 0.0);

    Rng root(cfg.base_seed, 0);
    Rng sample_stream = root.split(sample_id);

    for (std::size_t li = 0; li < cfg.grid.size(); ++li) {
        int t = cfg.grid[li];
        Rng level_stream = sample_stream.split(li);
        for (int d = 0; d < cfg.n_draws; ++d) {
            Rng node = level_stream.split(static_cast<std::uint64_t>(d));
            Rng eps_rng = node.split(0);
            Rng lc_rng = node.split(1);
            std::vector<double> eps = gaussian_sample(eps_rng, dim);
            std::vector<double> x_t = forward_noise(x, t, eps, model.schedule);
            std::vector<double> x_hat = denoise_posterior_mean(model, x_t, t);

            // lazy shared intermediates
            std::vector<double> xt01, xh01, f1, f2;
            for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
                MetricId id = cfg.metrics[mi];
                double v = 0.0;
                switch (id) {
                    case MetricId::Mse: v = mse(x_t, x_hat); break;
                    case MetricId::Ssim: {
                        if (xt01.empty()) xt01 = clamp01(x_t);
                        if (xh01.empty()) xh01 = clamp01(x_hat);
                        v = ssim(xt01, xh01, h, w, cfg.params.ssim_window);
                        break;
                    }
                    case MetricId::FeatureDistance: {
                        if (f1.empty()) f1 = denoiser_features(model, x_t, t);
                        if (f2.empty()) f2 = denoiser_features(model, x_hat, t);
                        v = feature_distance(f1, f2);
                        break;
                    }
                    case MetricId::LocalComplexity:
                        v = local_complexity(model, x_t, t, cfg.params.lc_draws,
                                             cfg.params.lc_radius, lc_rng);
                        break;
                    case MetricId::LbpKl:
                        v = kl_divergence(lbp_histogram(x_t, h, w, cfg.params.hist_eps),
                                          lbp_histogram(x_hat, h, w, cfg.params.hist_eps));
                        break;
                    case MetricId::DwtKlLh:
                    case MetricId::DwtKlHl:
                    case MetricId::DwtKlHh: {
                        auto h1 = dwt_band_histograms(x_t, h, w, cfg.params.dwt_bins,
                                                      cfg.params.hist_eps);
                        auto h2 = dwt_band_histograms(x_hat, h, w, cfg.params.dwt_bins,
                                                      cfg.params.hist_eps);
                        std::size_t band = id == MetricId::DwtKlLh ? 0
                                           : id == MetricId::DwtKlHl ? 1
                                                                     : 2;
                        v = kl_divergence(h1[band], h2[band]);
                        break;
                    }
                    case MetricId::RankOrder:
                        v = rank_order_consistency(x_t, x_hat, cfg.params.tie_tol);
                        break;
                }
                if (!std::isfinite(v))
                    throw NumericError("trajectory: metric " + metric_name(id) +
                                       " non-finite at timestep " + std::to_string(t));
                emb.values[li * cfg.metrics.size() + mi] += v;
            }
        }
    }
    if (cfg.n_draws > 1) {
        for (double& v : emb.values) v /= static_cast<double>(cfg.n_draws);
    }
    return emb;
}

std::vector<TrajectoryEmbedding> extract_embeddings(const DenoiserModel& model,
                                                    const std::vector<std::vector<double>>& xs,
                                                    const TrajectoryConfig& cfg,
                                                    std::uint64_t first_sample_id) {
    std::vector<TrajectoryEmbedding> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.push_back(extract_embedding(model, xs[i], cfg, first_sample_id + i));
    return out;
}

std::vector<std::string> embedding_column_names(const TrajectoryConfig& cfg) {
    std::vector<std::string> names;
    for (int t : cfg.grid)
        for (MetricId id : cfg.metrics) names.push_back(metric_name(id) + "_t" + std::to_string(t));
    return names;
}

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows, double floor) {
    if (rows.empty()) throw DataError("fit_standardizer: no rows");
    std::size_t d = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != d) throw DataError("fit_standardizer: ragged rows");
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stdev.assign(d, 0.0);
    double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    for (double& m : s.mean) m /= n;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            double dv = r[j] - s.mean[j];
            s.stdev[j] += dv * dv;
        }
    for (std::size_t j = 0; j < d; ++j) s.stdev[j] = std::max(std::sqrt(s.stdev[j] / n), floor);
    return s;
}

std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> v) {
    if (v.size() != s.mean.size()) throw DataError("apply_standardizer: dim mismatch");
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - s.mean[j]) / s.stdev[j];
    return out;
}

} // namespace disc
