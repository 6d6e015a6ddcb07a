#include "disc/bench.hpp"

#include <algorithm>
#include <cmath>

#include "disc/classifier.hpp"
#include "disc/errors.hpp"
#include "disc/eval.hpp"
#include "disc/iforest.hpp"
#include "disc/kmeans.hpp"
#include "disc/shiftgen.hpp"
#include "disc/trajectory.hpp"

namespace disc {

double median(std::vector<double> v) {
    if (v.empty()) throw DataError("median: empty input");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

// independent sub-seeds per role within one benchmark run
enum Role : std::uint64_t {
    kRoleIdTrain = 1,
    kRoleIdEval,
    kRoleFamilyBase,
    kRoleShift,
    kRoleSemantic,
    kRoleDenoiser,
    kRoleClassifier,
    kRoleTraj,
    kRoleSplit,
    kRoleSupervised,
    kRoleKmeans,
    kRoleIforest,
};

std::uint64_t role_seed(std::uint64_t seed, std::uint64_t role, std::uint64_t k = 0) {
    return Rng::mix64(Rng::mix64(seed + 0x5D15CB00ULL + role) + k);
}

std::vector<std::vector<double>> embed_values(const DenoiserModel& model,
                                              const std::vector<std::vector<double>>& xs,
                                              const TrajectoryConfig& tcfg) {
    std::vector<std::vector<double>> rows;
    rows.reserve(xs.size());
    for (const TrajectoryEmbedding& e : extract_embeddings(model, xs, tcfg))
        rows.push_back(e.values);
    return rows;
}

std::vector<std::vector<double>> standardize_rows(const Standardizer& s,
                                                  const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(apply_standardizer(s, r));
    return out;
}

// larger = more in-distribution
double oriented_baseline(const std::string& name, const ScalarScores& s) {
    if (name == "msp") return s.msp;
    if (name == "max_logit") return s.max_logit;
    if (name == "energy") return -s.energy; // raw energy grows for off-distribution inputs
    if (name == "mahalanobis") return s.mahalanobis;
    throw ConfigError("unknown baseline: " + name);
}

std::vector<double> score_vector(const ScalarScores& s) {
    return {s.msp, s.max_logit, s.energy, s.mahalanobis};
}

double supervised_accuracy(const std::vector<std::vector<double>>& inputs,
                           const std::vector<std::string>& labels, const SplitIndices& split,
                           const TrainConfig& cfg) {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<std::string> train_y, test_y;
    for (std::size_t i : split.a) {
        train_x.push_back(inputs[i]);
        train_y.push_back(labels[i]);
    }
    for (std::size_t i : split.b) {
        test_x.push_back(inputs[i]);
        test_y.push_back(labels[i]);
    }
    Standardizer s = fit_standardizer(train_x);
    train_x = standardize_rows(s, train_x);
    test_x = standardize_rows(s, test_x);
    ClassifierHead head = train_classifier(train_x, train_y, cfg);
    return classifier_accuracy(head, test_x, test_y);
}

struct FamilySet {
    std::string name;
    Corpus corpus;
};

ImageSeedResult run_image_seed(const ImageBenchConfig& cfg, std::uint64_t seed) {
    ImageSeedResult res;
    res.seed = seed;
    const std::vector<IdImageClass> id_classes = {IdImageClass::Blobs, IdImageClass::Stripes};

    Corpus train = gen_id_image_mixture(id_classes, cfg.n_train_per_class, cfg.side,
                                        role_seed(seed, kRoleIdTrain));
    Corpus id_eval = gen_id_image_mixture(id_classes, cfg.n_id_eval / 2, cfg.side,
                                          role_seed(seed, kRoleIdEval));

    TrainConfig ccfg = cfg.classifier_train;
    ccfg.seed = role_seed(seed, kRoleClassifier);
    ClassifierHead head = train_classifier(train.samples, train.labels, ccfg);
    res.classifier_train_acc = classifier_accuracy(head, train.samples, train.labels);

    InputGrad grad_cb = [&head](std::span<const double> x, const std::string& label) {
        return classifier_input_grad(head, x, label);
    };

    std::vector<FamilySet> families;
    auto fresh_base = [&](std::uint64_t k) {
        return gen_id_image_mixture(id_classes, cfg.n_per_family / 2, cfg.side,
                                    role_seed(seed, kRoleFamilyBase, k));
    };
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::FlipH;
        spec.seed = role_seed(seed, kRoleShift, 0);
        families.push_back({"flip_h", apply_covariate_shift(fresh_base(0), spec)});
    }
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::Occlusion;
        spec.p = cfg.occlusion_p;
        spec.seed = role_seed(seed, kRoleShift, 1);
        families.push_back({"occlusion", apply_covariate_shift(fresh_base(1), spec)});
    }
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::GaussianNoise;
        spec.sigma = cfg.noise_sigma;
        spec.seed = role_seed(seed, kRoleShift, 2);
        families.push_back({"gaussian_noise", apply_covariate_shift(fresh_base(2), spec)});
    }
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::Fgsm;
        spec.eps = cfg.fgsm_eps;
        spec.seed = role_seed(seed, kRoleShift, 3);
        families.push_back({"fgsm", apply_covariate_shift(fresh_base(3), spec, &grad_cb)});
    }
    {
        Corpus sem = gen_id_images(IdImageClass::Checkers, cfg.n_per_family, cfg.side,
                                   role_seed(seed, kRoleSemantic));
        sem.labels.assign(sem.samples.size(), "semantic");
        families.push_back({"semantic", std::move(sem)});
    }

    TrainConfig dtc = cfg.denoiser_train;
    dtc.seed = role_seed(seed, kRoleDenoiser);
    DenoiserModel model =
        train_denoiser(train.samples, {cfg.side, cfg.side}, cfg.denoiser, dtc).model;

    TrajectoryConfig tcfg =
        default_trajectory_config(cfg.denoiser.T, true, role_seed(seed, kRoleTraj));
    tcfg.grid = default_grid(cfg.denoiser.T, cfg.traj_levels);
    tcfg.n_draws = cfg.n_draws;

    std::vector<std::vector<double>> emb_train = embed_values(model, train.samples, tcfg);
    Standardizer std_fit = fit_standardizer(emb_train);
    std::vector<std::vector<double>> emb_id =
        standardize_rows(std_fit, embed_values(model, id_eval.samples, tcfg));

    std::vector<std::vector<double>> emb_ood; // pooled, family-major
    std::vector<std::size_t> ood_family_ids;
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        auto rows = standardize_rows(std_fit, embed_values(model, families[fi].corpus.samples, tcfg));
        for (auto& r : rows) {
            emb_ood.push_back(std::move(r));
            ood_family_ids.push_back(fi);
        }
    }

    // unsupervised OOD scoring: isolation forest on the trajectory embeddings
    IsolationForest forest =
        iforest_fit(standardize_rows(std_fit, emb_train), cfg.iforest_psi, cfg.iforest_trees,
                    role_seed(seed, kRoleIforest, 0));
    std::vector<double> disc_id_scores, disc_ood_scores;
    for (const auto& e : emb_id) disc_id_scores.push_back(-iforest_score(forest, e));
    for (const auto& e : emb_ood) disc_ood_scores.push_back(-iforest_score(forest, e));
    res.disc_iforest_auroc = auroc(disc_id_scores, disc_ood_scores);
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        std::vector<double> fam_scores;
        for (std::size_t i = 0; i < disc_ood_scores.size(); ++i)
            if (ood_family_ids[i] == fi) fam_scores.push_back(disc_ood_scores[i]);
        res.disc_family_auroc[families[fi].name] = auroc(disc_id_scores, fam_scores);
    }

    // scalar baselines from the toy classifier
    std::vector<std::vector<double>> feat_train;
    std::vector<std::size_t> class_ids;
    for (std::size_t i = 0; i < train.samples.size(); ++i) {
        feat_train.push_back(classifier_features(head, train.samples[i]));
        class_ids.push_back(head.class_index(train.labels[i]));
    }
    MahalanobisStats maha = fit_mahalanobis(feat_train, class_ids);

    std::vector<ScalarScores> id_scalar, ood_scalar;
    for (const auto& x : id_eval.samples) id_scalar.push_back(scalar_baselines(head, maha, x));
    for (const auto& fam : families)
        for (const auto& x : fam.corpus.samples) ood_scalar.push_back(scalar_baselines(head, maha, x));

    for (const std::string& name : scalar_baseline_names()) {
        std::vector<double> ids, oods;
        for (const auto& s : id_scalar) ids.push_back(oriented_baseline(name, s));
        for (const auto& s : ood_scalar) oods.push_back(oriented_baseline(name, s));
        res.baseline_auroc[name] = auroc(ids, oods);
    }

    // family discovery: cluster the out-of-distribution pool only; features
    // are standardized over the pool and clamped so one extreme family
    // cannot dominate the inertia objective
    auto cluster_prep = [](std::vector<std::vector<double>> rows) {
        Standardizer cs = fit_standardizer(rows);
        rows = standardize_rows(cs, rows);
        for (auto& r : rows)
            for (double& v : r) v = std::clamp(v, -3.0, 3.0);
        return rows;
    };
    std::vector<std::vector<double>> clu_disc = cluster_prep(emb_ood);
    KMeansModel km = kmeans_fit(clu_disc, families.size(), role_seed(seed, kRoleKmeans, 0));
    res.disc_cluster_acc = clustering_accuracy(kmeans_assign_all(km, clu_disc), ood_family_ids);

    std::uint64_t km_salt = 1;
    for (const std::string& name : scalar_baseline_names()) {
        std::vector<std::vector<double>> rows;
        for (const auto& s : ood_scalar) rows.push_back({oriented_baseline(name, s)});
        rows = cluster_prep(std::move(rows));
        KMeansModel km1 = kmeans_fit(rows, families.size(), role_seed(seed, kRoleKmeans, km_salt++));
        res.baseline_cluster_acc[name] =
            clustering_accuracy(kmeans_assign_all(km1, rows), ood_family_ids);
    }

    // supervised family identification over id + families
    std::vector<std::vector<double>> sup_disc, sup_all;
    std::vector<std::string> sup_labels;
    std::vector<std::size_t> strata;
    for (std::size_t i = 0; i < emb_id.size(); ++i) {
        sup_disc.push_back(emb_id[i]);
        sup_all.push_back(score_vector(id_scalar[i]));
        sup_labels.push_back("id");
        strata.push_back(0);
    }
    for (std::size_t i = 0; i < emb_ood.size(); ++i) {
        sup_disc.push_back(emb_ood[i]);
        sup_all.push_back(score_vector(ood_scalar[i]));
        sup_labels.push_back(families[ood_family_ids[i]].name);
        strata.push_back(1 + ood_family_ids[i]);
    }
    SplitIndices split = stratified_split(strata, 0.5, role_seed(seed, kRoleSplit));
    TrainConfig scfg = cfg.supervised_train;
    scfg.seed = role_seed(seed, kRoleSupervised, 0);
    res.disc_supervised_acc = supervised_accuracy(sup_disc, sup_labels, split, scfg);
    scfg.seed = role_seed(seed, kRoleSupervised, 1);
    res.all_detectors_supervised_acc = supervised_accuracy(sup_all, sup_labels, split, scfg);

    return res;
}

} // namespace

ImageBenchResult run_image_benchmark(const ImageBenchConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("image benchmark: no seeds");
    if (cfg.n_per_family < 2 || cfg.n_id_eval < 2)
        throw ConfigError("image benchmark: sample counts too small");
    ImageBenchResult result;
    result.families = {"flip_h", "occlusion", "gaussian_noise", "fgsm", "semantic"};
    for (std::uint64_t s : cfg.seeds) result.seeds.push_back(run_image_seed(cfg, s));

    auto med_of = [&](auto getter) {
        std::vector<double> vals;
        for (const auto& r : result.seeds) vals.push_back(getter(r));
        return median(vals);
    };
    result.med_disc_iforest_auroc =
        med_of([](const ImageSeedResult& r) { return r.disc_iforest_auroc; });
    result.med_disc_cluster_acc =
        med_of([](const ImageSeedResult& r) { return r.disc_cluster_acc; });
    result.med_disc_supervised_acc =
        med_of([](const ImageSeedResult& r) { return r.disc_supervised_acc; });
    result.med_all_detectors_supervised_acc =
        med_of([](const ImageSeedResult& r) { return r.all_detectors_supervised_acc; });
    for (const std::string& name : scalar_baseline_names()) {
        result.med_baseline_auroc[name] =
            med_of([&](const ImageSeedResult& r) { return r.baseline_auroc.at(name); });
        result.med_baseline_cluster_acc[name] =
            med_of([&](const ImageSeedResult& r) { return r.baseline_cluster_acc.at(name); });
    }
    return result;
}

namespace {

TabularSeedResult run_tabular_seed(const TabularBenchConfig& cfg, std::uint64_t seed) {
    TabularSeedResult res;
    res.seed = seed;
    std::size_t d = cfg.dim;

    // two components with sloped mean profiles so feature order matters
    GaussianComponent comp_a, comp_b;
    comp_a.label = "comp_a";
    comp_b.label = "comp_b";
    comp_a.rho = comp_b.rho = cfg.rho;
    comp_a.sigma = comp_b.sigma = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        double slope = -2.0 + 4.0 * static_cast<double>(j) / static_cast<double>(d - 1);
        comp_a.mean.push_back(slope);
        comp_b.mean.push_back(-slope);
    }
    std::vector<GaussianComponent> comps = {comp_a, comp_b};

    Corpus train = gen_id_tabular(comps, cfg.n_train_per_comp, role_seed(seed, kRoleIdTrain));
    Corpus id_eval = gen_id_tabular(comps, cfg.n_id_eval / 2, role_seed(seed, kRoleIdEval));

    std::vector<FamilySet> families;
    auto fresh_base = [&](std::uint64_t k) {
        return gen_id_tabular(comps, cfg.n_per_family / 2, role_seed(seed, kRoleFamilyBase, k));
    };
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::ScaleShift;
        spec.a = cfg.scale_a;
        spec.b = cfg.scale_b;
        spec.seed = role_seed(seed, kRoleShift, 0);
        families.push_back({"scale_shift", apply_covariate_shift(fresh_base(0), spec)});
    }
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::FeatureShuffle;
        spec.seed = role_seed(seed, kRoleShift, 1);
        families.push_back({"feature_shuffle", apply_covariate_shift(fresh_base(1), spec)});
    }
    {
        ShiftSpec spec;
        spec.kind = ShiftKind::GaussianNoise;
        spec.sigma = cfg.noise_sigma;
        spec.seed = role_seed(seed, kRoleShift, 2);
        families.push_back({"gaussian_noise", apply_covariate_shift(fresh_base(2), spec)});
    }
    {
        GaussianComponent novel = make_displaced_component(comps, cfg.novel_min_sds, "new_component");
        Corpus nc = gen_id_tabular({novel}, cfg.n_per_family, role_seed(seed, kRoleSemantic));
        families.push_back({"new_component", std::move(nc)});
    }

    TrainConfig dtc = cfg.denoiser_train;
    dtc.seed = role_seed(seed, kRoleDenoiser);
    DenoiserModel model = train_denoiser(train.samples, {d}, cfg.denoiser, dtc).model;

    TrajectoryConfig tcfg =
        default_trajectory_config(cfg.denoiser.T, false, role_seed(seed, kRoleTraj));
    tcfg.grid = default_grid(cfg.denoiser.T, cfg.traj_levels);
    tcfg.n_draws = cfg.n_draws;

    std::vector<std::vector<double>> emb_train = embed_values(model, train.samples, tcfg);
    std::vector<std::vector<double>> emb_id = embed_values(model, id_eval.samples, tcfg);
    std::vector<std::vector<double>> emb_ood;
    for (const auto& fam : families)
        for (auto& r : embed_values(model, fam.corpus.samples, tcfg)) emb_ood.push_back(r);

    // the reconstruction-error-only variant reuses the mse columns, which are
    // identical to a run configured with just that metric
    std::size_t n_metrics = tcfg.metrics.size();
    std::size_t mse_col = 0;
    for (std::size_t mi = 0; mi < n_metrics; ++mi)
        if (tcfg.metrics[mi] == MetricId::Mse) mse_col = mi;
    auto slice_mse = [&](const std::vector<std::vector<double>>& rows) {
        std::vector<std::vector<double>> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            std::vector<double> v;
            for (std::size_t li = 0; li < tcfg.grid.size(); ++li)
                v.push_back(r[li * n_metrics + mse_col]);
            out.push_back(std::move(v));
        }
        return out;
    };

    std::vector<std::size_t> ood_family_ids;
    for (std::size_t fi = 0; fi < families.size(); ++fi)
        for (std::size_t i = 0; i < families[fi].corpus.samples.size(); ++i)
            ood_family_ids.push_back(fi);

    auto run_variant = [&](const std::vector<std::vector<double>>& tr,
                           const std::vector<std::vector<double>>& idv,
                           const std::vector<std::vector<double>>& oodv, std::uint64_t salt,
                           std::map<std::string, double>& family_auroc) {
        Standardizer s = fit_standardizer(tr);
        IsolationForest forest = iforest_fit(standardize_rows(s, tr), cfg.iforest_psi,
                                             cfg.iforest_trees, role_seed(seed, kRoleIforest, salt));
        std::vector<double> ids, oods;
        for (const auto& e : standardize_rows(s, idv)) ids.push_back(-iforest_score(forest, e));
        for (const auto& e : standardize_rows(s, oodv)) oods.push_back(-iforest_score(forest, e));
        for (std::size_t fi = 0; fi < families.size(); ++fi) {
            std::vector<double> fam;
            for (std::size_t i = 0; i < oods.size(); ++i)
                if (ood_family_ids[i] == fi) fam.push_back(oods[i]);
            family_auroc[families[fi].name] = auroc(ids, fam);
        }
        return auroc(ids, oods);
    };

    res.full_embedding_auroc = run_variant(emb_train, emb_id, emb_ood, 0, res.full_family_auroc);
    res.mse_only_auroc = run_variant(slice_mse(emb_train), slice_mse(emb_id), slice_mse(emb_ood), 1,
                                     res.mse_family_auroc);
    return res;
}

} // namespace

TabularBenchResult run_tabular_benchmark(const TabularBenchConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("tabular benchmark: no seeds");
    if (cfg.dim < 2) throw ConfigError("tabular benchmark: need at least 2 features");
    TabularBenchResult result;
    result.families = {"scale_shift", "feature_shuffle", "gaussian_noise", "new_component"};
    for (std::uint64_t s : cfg.seeds) result.seeds.push_back(run_tabular_seed(cfg, s));
    std::vector<double> full, mse_only;
    for (const auto& r : result.seeds) {
        full.push_back(r.full_embedding_auroc);
        mse_only.push_back(r.mse_only_auroc);
    }
    result.med_full_embedding_auroc = median(full);
    result.med_mse_only_auroc = median(mse_only);
    return result;
}

nlohmann::json image_bench_to_json(const ImageBenchResult& r) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : r.seeds) {
        seeds.push_back({{"seed", s.seed},
                         {"classifier_train_acc", s.classifier_train_acc},
                         {"disc_iforest_auroc", s.disc_iforest_auroc},
                         {"disc_family_auroc", s.disc_family_auroc},
                         {"baseline_auroc", s.baseline_auroc},
                         {"disc_cluster_acc", s.disc_cluster_acc},
                         {"baseline_cluster_acc", s.baseline_cluster_acc},
                         {"disc_supervised_acc", s.disc_supervised_acc},
                         {"all_detectors_supervised_acc", s.all_detectors_supervised_acc}});
    }
    return {{"families", r.families},
            {"seeds", seeds},
            {"median",
             {{"disc_iforest_auroc", r.med_disc_iforest_auroc},
              {"baseline_auroc", r.med_baseline_auroc},
              {"disc_cluster_acc", r.med_disc_cluster_acc},
              {"baseline_cluster_acc", r.med_baseline_cluster_acc},
              {"disc_supervised_acc", r.med_disc_supervised_acc},
              {"all_detectors_supervised_acc", r.med_all_detectors_supervised_acc}}}};
}

nlohmann::json tabular_bench_to_json(const TabularBenchResult& r) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : r.seeds) {
        seeds.push_back({{"seed", s.seed},
                         {"full_embedding_auroc", s.full_embedding_auroc},
                         {"mse_only_auroc", s.mse_only_auroc},
                         {"full_family_auroc", s.full_family_auroc},
                         {"mse_family_auroc", s.mse_family_auroc}});
    }
    return {{"families", r.families},
            {"seeds", seeds},
            {"median",
             {{"full_embedding_auroc", r.med_full_embedding_auroc},
              {"mse_only_auroc", r.med_mse_only_auroc}}}};
}

} // namespace disc
