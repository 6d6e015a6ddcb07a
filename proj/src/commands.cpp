#include "disc/commands.hpp"

#include <chrono>
#include <cmath>

#include "disc/classifier.hpp"
#include "disc/errors.hpp"
#include "disc/eval.hpp"
#include "disc/iforest.hpp"
#include "disc/io.hpp"
#include "disc/kmeans.hpp"
#include "disc/theory.hpp"
#include "disc/trajectory.hpp"

namespace disc {

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config missing required field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

} // namespace

nlohmann::json corpus_to_json(const Corpus& c) {
    return {{"modality", c.modality == Modality::Image ? "image" : "tabular"},
            {"shape", c.shape},
            {"labels", c.labels},
            {"samples", c.samples}};
}

Corpus corpus_from_json(const nlohmann::json& j) {
    Corpus c;
    std::string m = require<std::string>(j, "modality");
    if (m == "image")
        c.modality = Modality::Image;
    else if (m == "tabular")
        c.modality = Modality::Tabular;
    else
        throw DataError("corpus: unknown modality " + m);
    c.shape = require<std::vector<std::size_t>>(j, "shape");
    c.labels = require<std::vector<std::string>>(j, "labels");
    c.samples = require<std::vector<std::vector<double>>>(j, "samples");
    if (c.labels.size() != c.samples.size()) throw DataError("corpus: labels/samples mismatch");
    std::size_t d = c.dim();
    for (const auto& s : c.samples)
        if (s.size() != d) throw DataError("corpus: sample dim does not match shape");
    return c;
}

namespace {

ShiftSpec shift_spec_from_json(const nlohmann::json& j) {
    ShiftSpec spec;
    spec.kind = shift_kind_from_name(require<std::string>(j, "kind"));
    spec.p = get_or<double>(j, "p", 0.0);
    spec.sigma = get_or<double>(j, "sigma", 0.0);
    spec.eps = get_or<double>(j, "eps", 0.0);
    spec.a = get_or<double>(j, "a", 1.0);
    spec.b = get_or<double>(j, "b", 0.0);
    spec.seed = get_or<std::uint64_t>(j, "seed", 0);
    spec.family = get_or<std::string>(j, "family", "");
    return spec;
}

} // namespace

void cmd_gen_data(const nlohmann::json& config, const fs::path& out_path) {
    std::string modality = require<std::string>(config, "modality");
    std::uint64_t seed = get_or<std::uint64_t>(config, "seed", 0);
    Corpus corpus;
    if (modality == "image") {
        std::size_t side = get_or<std::size_t>(config, "side", 16);
        std::size_t n = get_or<std::size_t>(config, "n_per_class", 64);
        std::vector<IdImageClass> classes;
        for (const auto& name : require<std::vector<std::string>>(config, "classes"))
            classes.push_back(image_class_from_name(name));
        corpus = gen_id_image_mixture(classes, n, side, seed);
    } else if (modality == "tabular") {
        std::vector<GaussianComponent> comps;
        for (const auto& cj : require<nlohmann::json>(config, "components")) {
            GaussianComponent c;
            c.mean = require<std::vector<double>>(cj, "mean");
            c.sigma = get_or<double>(cj, "sigma", 1.0);
            c.rho = get_or<double>(cj, "rho", 0.0);
            c.label = get_or<std::string>(cj, "label", "id");
            comps.push_back(std::move(c));
        }
        std::size_t n = get_or<std::size_t>(config, "n_per_comp", 64);
        corpus = gen_id_tabular(comps, n, seed);
    } else {
        throw ConfigError("gen: modality must be image or tabular");
    }

    if (config.contains("shift")) {
        ShiftSpec spec = shift_spec_from_json(config.at("shift"));
        if (spec.kind == ShiftKind::Fgsm) {
            fs::path cpath = require<std::string>(config.at("shift"), "classifier");
            ClassifierHead head = classifier_from_json(load_json_file(cpath).at("model"));
            InputGrad cb = [&head](std::span<const double> x, const std::string& label) {
                return classifier_input_grad(head, x, label);
            };
            corpus = apply_covariate_shift(corpus, spec, &cb);
        } else {
            corpus = apply_covariate_shift(corpus, spec);
        }
    }
    save_json_file(out_path, corpus_to_json(corpus));
}

void cmd_train_denoiser(const nlohmann::json& config, const fs::path& data_path,
                        const fs::path& out_path) {
    Corpus corpus = corpus_from_json(load_json_file(data_path));
    DenoiserConfig dcfg;
    dcfg.T = get_or<int>(config, "T", 200);
    dcfg.beta_min = get_or<double>(config, "beta_min", 1e-4);
    dcfg.beta_max = get_or<double>(config, "beta_max", 0.02);
    dcfg.hidden = get_or<std::vector<std::size_t>>(config, "hidden", {256, 256});
    TrainConfig tcfg;
    tcfg.learning_rate = get_or<double>(config, "learning_rate", 1e-3);
    tcfg.epochs = get_or<int>(config, "epochs", 30);
    tcfg.batch_size = get_or<int>(config, "batch_size", 32);
    tcfg.seed = get_or<std::uint64_t>(config, "seed", 0);

    DenoiserTrainResult res = train_denoiser(corpus.samples, corpus.shape, dcfg, tcfg);
    nlohmann::json out = {{"version", kToolVersion},
                          {"config", config},
                          {"config_hash", config_hash(config)},
                          {"epoch_loss", res.epoch_loss},
                          {"model", denoiser_to_json(res.model)}};
    save_json_file(out_path, out);
}

namespace {

struct EmbeddingTable {
    std::vector<std::string> columns;
    std::vector<std::uint64_t> sample_ids;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
};

EmbeddingTable load_embeddings_csv(const fs::path& path) {
    auto cells = parse_csv(read_file(path));
    if (cells.size() < 2) throw DataError("embeddings: no data rows in " + path.string());
    const auto& header = cells.front();
    if (header.size() < 3 || header[0] != "sample_id" || header[1] != "label")
        throw DataError("embeddings: unexpected header in " + path.string());
    EmbeddingTable t;
    t.columns.assign(header.begin() + 2, header.end());
    for (std::size_t r = 1; r < cells.size(); ++r) {
        const auto& row = cells[r];
        if (row.size() != header.size())
            throw DataError("embeddings: ragged row in " + path.string());
        try {
            t.sample_ids.push_back(std::stoull(row[0]));
            t.labels.push_back(row[1]);
            std::vector<double> v;
            for (std::size_t c = 2; c < row.size(); ++c) v.push_back(std::stod(row[c]));
            t.rows.push_back(std::move(v));
        } catch (const std::exception&) {
            throw DataError("embeddings: non-numeric cell in " + path.string());
        }
    }
    return t;
}

} // namespace

void cmd_embed(const fs::path& model_path, const fs::path& data_path,
               const nlohmann::json& config, const fs::path& out_csv) {
    nlohmann::json mj = load_json_file(model_path);
    DenoiserModel model = denoiser_from_json(mj.at("model"));
    Corpus corpus = corpus_from_json(load_json_file(data_path));
    if (corpus.dim() != model.data_dim())
        throw DataError("embed: corpus dimension does not match the model");

    TrajectoryConfig tcfg;
    bool image = corpus.modality == Modality::Image;
    tcfg = default_trajectory_config(model.schedule.T, image,
                                     get_or<std::uint64_t>(config, "base_seed", 0));
    if (config.contains("grid"))
        tcfg.grid = require<std::vector<int>>(config, "grid");
    else
        tcfg.grid = default_grid(model.schedule.T, get_or<int>(config, "levels", 10));
    tcfg.n_draws = get_or<int>(config, "n_draws", 1);
    if (config.contains("metrics")) {
        tcfg.metrics.clear();
        for (const auto& n : config.at("metrics"))
            tcfg.metrics.push_back(metric_from_name(n.get<std::string>()));
    }
    tcfg.params.ssim_window = get_or<int>(config, "ssim_window", tcfg.params.ssim_window);
    tcfg.params.dwt_bins = get_or<int>(config, "dwt_bins", tcfg.params.dwt_bins);
    tcfg.params.lc_draws = get_or<int>(config, "lc_draws", tcfg.params.lc_draws);
    tcfg.params.lc_radius = get_or<double>(config, "lc_radius", tcfg.params.lc_radius);

    std::vector<TrajectoryEmbedding> embs = extract_embeddings(model, corpus.samples, tcfg);
    std::vector<std::string> cols = embedding_column_names(tcfg);

    std::string csv;
    std::vector<std::string> header = {"sample_id", "label"};
    header.insert(header.end(), cols.begin(), cols.end());
    csv += csv_join(header) + "\n";
    for (std::size_t i = 0; i < embs.size(); ++i) {
        std::vector<std::string> fields = {std::to_string(embs[i].sample_id), corpus.labels[i]};
        for (double v : embs[i].values) fields.push_back(fmt_double(v));
        csv += csv_join(fields) + "\n";
    }
    atomic_write_file(out_csv, csv);

    nlohmann::json sidecar = {{"version", kToolVersion},
                              {"config", trajectory_config_to_json(tcfg)},
                              {"config_hash", trajectory_config_hash(tcfg)},
                              {"columns", cols},
                              {"model", model_path.string()},
                              {"n_samples", embs.size()}};
    fs::path meta = out_csv;
    meta += ".meta.json";
    save_json_file(meta, sidecar);
}

void cmd_fit_detector(const std::string& kind, const fs::path& embeddings_csv,
                      const nlohmann::json& config, const fs::path& out_path) {
    EmbeddingTable t = load_embeddings_csv(embeddings_csv);
    Standardizer st = fit_standardizer(t.rows);
    std::vector<std::vector<double>> rows;
    rows.reserve(t.rows.size());
    for (const auto& r : t.rows) rows.push_back(apply_standardizer(st, r));

    nlohmann::json out = {{"version", kToolVersion},
                          {"kind", kind},
                          {"config", config},
                          {"config_hash", config_hash(config)},
                          {"standardizer", {{"mean", st.mean}, {"stdev", st.stdev}}}};
    std::uint64_t seed = get_or<std::uint64_t>(config, "seed", 0);
    if (kind == "iforest") {
        std::size_t psi = get_or<std::size_t>(config, "psi", 256);
        std::size_t n_trees = get_or<std::size_t>(config, "n_trees", 100);
        out["model"] = iforest_to_json(iforest_fit(rows, psi, n_trees, seed));
    } else if (kind == "kmeans") {
        std::size_t k = require<std::size_t>(config, "k");
        int restarts = get_or<int>(config, "n_restarts", 5);
        int iters = get_or<int>(config, "max_iter", 300);
        out["model"] = kmeans_to_json(kmeans_fit(rows, k, seed, restarts, iters));
    } else {
        throw ConfigError("fit: detector kind must be iforest or kmeans");
    }
    save_json_file(out_path, out);
}

void cmd_score(const fs::path& detector_path, const fs::path& embeddings_csv,
               const fs::path& out_csv) {
    nlohmann::json dj = load_json_file(detector_path);
    std::string kind = require<std::string>(dj, "kind");
    Standardizer st;
    st.mean = require<std::vector<double>>(dj.at("standardizer"), "mean");
    st.stdev = require<std::vector<double>>(dj.at("standardizer"), "stdev");
    EmbeddingTable t = load_embeddings_csv(embeddings_csv);

    std::string csv;
    if (kind == "iforest") {
        IsolationForest forest = iforest_from_json(dj.at("model"));
        csv += "sample_id,label,anomaly_score\n";
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            double s = iforest_score(forest, apply_standardizer(st, t.rows[i]));
            csv += std::to_string(t.sample_ids[i]) + "," + t.labels[i] + "," + fmt_double(s) + "\n";
        }
    } else if (kind == "kmeans") {
        KMeansModel km = kmeans_from_json(dj.at("model"));
        csv += "sample_id,label,cluster\n";
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            std::size_t c = kmeans_assign(km, apply_standardizer(st, t.rows[i]));
            csv += std::to_string(t.sample_ids[i]) + "," + t.labels[i] + "," + std::to_string(c) +
                   "\n";
        }
    } else {
        throw DataError("score: unknown detector kind in " + detector_path.string());
    }
    atomic_write_file(out_csv, csv);
}

namespace {

TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base) {
    TrainConfig t = base;
    t.learning_rate = get_or<double>(j, "learning_rate", t.learning_rate);
    t.epochs = get_or<int>(j, "epochs", t.epochs);
    t.batch_size = get_or<int>(j, "batch_size", t.batch_size);
    return t;
}

} // namespace

ImageBenchConfig image_bench_config_from_json(const nlohmann::json& j) {
    ImageBenchConfig cfg;
    cfg.side = get_or<std::size_t>(j, "side", cfg.side);
    cfg.n_train_per_class = get_or<std::size_t>(j, "n_train_per_class", cfg.n_train_per_class);
    cfg.n_id_eval = get_or<std::size_t>(j, "n_id_eval", cfg.n_id_eval);
    cfg.n_per_family = get_or<std::size_t>(j, "n_per_family", cfg.n_per_family);
    cfg.occlusion_p = get_or<double>(j, "occlusion_p", cfg.occlusion_p);
    cfg.noise_sigma = get_or<double>(j, "noise_sigma", cfg.noise_sigma);
    cfg.fgsm_eps = get_or<double>(j, "fgsm_eps", cfg.fgsm_eps);
    cfg.traj_levels = get_or<int>(j, "traj_levels", cfg.traj_levels);
    cfg.n_draws = get_or<int>(j, "n_draws", cfg.n_draws);
    cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
    if (j.contains("denoiser")) {
        const auto& dj = j.at("denoiser");
        cfg.denoiser.T = get_or<int>(dj, "T", cfg.denoiser.T);
        cfg.denoiser.beta_min = get_or<double>(dj, "beta_min", cfg.denoiser.beta_min);
        cfg.denoiser.beta_max = get_or<double>(dj, "beta_max", cfg.denoiser.beta_max);
        cfg.denoiser.hidden = get_or<std::vector<std::size_t>>(dj, "hidden", cfg.denoiser.hidden);
    }
    if (j.contains("denoiser_train"))
        cfg.denoiser_train = train_config_from_json(j.at("denoiser_train"), cfg.denoiser_train);
    if (j.contains("classifier_train"))
        cfg.classifier_train =
            train_config_from_json(j.at("classifier_train"), cfg.classifier_train);
    if (j.contains("supervised_train"))
        cfg.supervised_train =
            train_config_from_json(j.at("supervised_train"), cfg.supervised_train);
    return cfg;
}

TabularBenchConfig tabular_bench_config_from_json(const nlohmann::json& j) {
    TabularBenchConfig cfg;
    cfg.dim = get_or<std::size_t>(j, "dim", cfg.dim);
    cfg.n_train_per_comp = get_or<std::size_t>(j, "n_train_per_comp", cfg.n_train_per_comp);
    cfg.n_id_eval = get_or<std::size_t>(j, "n_id_eval", cfg.n_id_eval);
    cfg.n_per_family = get_or<std::size_t>(j, "n_per_family", cfg.n_per_family);
    cfg.rho = get_or<double>(j, "rho", cfg.rho);
    cfg.scale_a = get_or<double>(j, "scale_a", cfg.scale_a);
    cfg.scale_b = get_or<double>(j, "scale_b", cfg.scale_b);
    cfg.noise_sigma = get_or<double>(j, "noise_sigma", cfg.noise_sigma);
    cfg.traj_levels = get_or<int>(j, "traj_levels", cfg.traj_levels);
    cfg.n_draws = get_or<int>(j, "n_draws", cfg.n_draws);
    cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
    if (j.contains("denoiser")) {
        const auto& dj = j.at("denoiser");
        cfg.denoiser.T = get_or<int>(dj, "T", cfg.denoiser.T);
        cfg.denoiser.beta_min = get_or<double>(dj, "beta_min", cfg.denoiser.beta_min);
        cfg.denoiser.beta_max = get_or<double>(dj, "beta_max", cfg.denoiser.beta_max);
        cfg.denoiser.hidden = get_or<std::vector<std::size_t>>(dj, "hidden", cfg.denoiser.hidden);
    }
    if (j.contains("denoiser_train"))
        cfg.denoiser_train = train_config_from_json(j.at("denoiser_train"), cfg.denoiser_train);
    return cfg;
}

void cmd_bench(const std::string& modality, const nlohmann::json& config,
               const fs::path& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    nlohmann::json payload;
    if (modality == "image") {
        payload = image_bench_to_json(run_image_benchmark(image_bench_config_from_json(config)));
    } else if (modality == "tabular") {
        payload =
            tabular_bench_to_json(run_tabular_benchmark(tabular_bench_config_from_json(config)));
    } else {
        throw ConfigError("bench: modality must be image or tabular");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json report = {{"version", kToolVersion},
                             {"modality", modality},
                             {"config", config},
                             {"config_hash", config_hash(config)},
                             {"results", payload},
                             {"meta", {{"wall_clock_sec", secs}}}};
    save_json_file(out_dir / "report.json", report);
    // numeric payload kept separate so re-runs are byte-comparable
    nlohmann::json stable = report;
    stable.erase("meta");
    save_json_file(out_dir / "report_payload.json", stable);
}

void cmd_theory_demo(const nlohmann::json& config, const fs::path& out_path) {
    DiscreteDistribution p;
    StatisticMap phi, psi;
    double eps_mass;
    if (config.contains("outcomes")) {
        p.outcomes = require<std::vector<std::string>>(config, "outcomes");
        p.probs = require<std::vector<double>>(config, "probs");
        phi.values = require<std::vector<double>>(config, "phi");
        psi.values = get_or<std::vector<double>>(config, "psi", {});
        eps_mass = require<double>(config, "eps_mass");
    } else {
        // two fibers of two outcomes each, uniform base distribution
        p.outcomes = {"a1", "a2", "b1", "b2"};
        p.probs = {0.25, 0.25, 0.25, 0.25};
        phi.values = {0.0, 0.0, 1.0, 1.0};
        psi.values = {1.0, 0.0, 1.0, 0.0};
        eps_mass = get_or<double>(config, "eps_mass", 0.125);
    }

    Counterexample ce = build_counterexample(p, phi, eps_mass);
    std::vector<double> taus = default_thresholds(phi);
    std::vector<PowerFprRow> rows = power_vs_fpr(ce.q1, ce.q2, phi, taus);

    double max_gap = 0.0;
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& r : rows) {
        max_gap = std::max(max_gap, std::fabs(r.power - r.fpr));
        sweep.push_back({{"tau", r.tau}, {"fpr", r.fpr}, {"power", r.power}});
    }

    nlohmann::json out = {{"version", kToolVersion},
                          {"p", {{"outcomes", p.outcomes}, {"probs", p.probs}}},
                          {"phi", phi.values},
                          {"counterexample", counterexample_to_json(ce)},
                          {"power_vs_fpr", sweep},
                          {"max_power_fpr_gap", max_gap}};
    if (!psi.values.empty()) {
        out["psi"] = psi.values;
        out["joint_separation"] = multi_statistic_separation(ce.q1, ce.q2, phi, psi);
    }
    save_json_file(out_path, out);
}

} // namespace disc
