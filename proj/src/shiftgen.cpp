#include "disc/shiftgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "disc/errors.hpp"

namespace disc {

std::string image_class_name(IdImageClass c) {
    switch (c) {
        case IdImageClass::Blobs: return "blobs";
        case IdImageClass::Stripes: return "stripes";
        case IdImageClass::Checkers: return "checkers";
    }
    throw ConfigError("unknown image class");
}

IdImageClass image_class_from_name(const std::string& name) {
    if (name == "blobs") return IdImageClass::Blobs;
    if (name == "stripes") return IdImageClass::Stripes;
    if (name == "checkers") return IdImageClass::Checkers;
    throw ConfigError("unknown image class: " + name);
}

namespace {

std::vector<double> gen_blob_image(std::size_t side, Rng& rng) {
    std::vector<double> img(side * side, 0.05);
    int n_bumps = 2 + static_cast<int>(rng.next_below(2));
    double s = static_cast<double>(side);
    for (int b = 0; b < n_bumps; ++b) {
        // centers biased toward the left half so mirroring is detectable
        double cr = (0.2 + 0.6 * rng.next_uniform()) * s;
        double cc = (0.1 + 0.35 * rng.next_uniform()) * s;
        double width = (0.08 + 0.10 * rng.next_uniform()) * s;
        double amp = 0.6 + 0.4 * rng.next_uniform();
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                double dr = static_cast<double>(r) - cr;
                double dc = static_cast<double>(c) - cc;
                img[r * side + c] += amp * std::exp(-(dr * dr + dc * dc) / (2.0 * width * width));
            }
        }
    }
    for (double& v : img) v = std::clamp(v, 0.0, 1.0);
    return img;
}

std::vector<double> gen_stripe_image(std::size_t side, Rng& rng) {
    std::vector<double> img(side * side, 0.0);
    // orientations kept inside (10, 80) degrees; a horizontal mirror maps
    // them to (100, 170), outside the training range
    double angle = (10.0 + 70.0 * rng.next_uniform()) * std::numbers::pi / 180.0;
    double freq = 2.0 + 2.0 * rng.next_uniform();
    double phase = 2.0 * std::numbers::pi * rng.next_uniform();
    double s = static_cast<double>(side);
    double kx = std::cos(angle), ky = std::sin(angle);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            double u = kx * static_cast<double>(c) + ky * static_cast<double>(r);
            img[r * side + c] =
                0.5 + 0.45 * std::sin(2.0 * std::numbers::pi * freq * u / s + phase);
        }
    }
    return img;
}

std::vector<double> gen_checker_image(std::size_t side, Rng& rng) {
    std::vector<double> img(side * side, 0.0);
    std::size_t cell = rng.next_below(2) == 0 ? 2 : 4;
    std::size_t or_ = rng.next_below(cell);
    std::size_t oc = rng.next_below(cell);
    double hi = 0.8 + 0.2 * rng.next_uniform();
    double lo = 0.2 * rng.next_uniform();
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c)
            img[r * side + c] = (((r + or_) / cell + (c + oc) / cell) % 2 == 0) ? hi : lo;
    return img;
}

} // namespace

Corpus gen_id_images(IdImageClass cls, std::size_t n, std::size_t side, std::uint64_t seed) {
    if (side < 8 || side % 2 != 0) throw ConfigError("gen_id_images: side must be even and >= 8");
    Corpus corpus;
    corpus.modality = Modality::Image;
    corpus.shape = {side, side};
    Rng root(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Rng r = root.split(i);
        switch (cls) {
            case IdImageClass::Blobs: corpus.samples.push_back(gen_blob_image(side, r)); break;
            case IdImageClass::Stripes: corpus.samples.push_back(gen_stripe_image(side, r)); break;
            case IdImageClass::Checkers: corpus.samples.push_back(gen_checker_image(side, r)); break;
        }
        corpus.labels.push_back(image_class_name(cls));
    }
    return corpus;
}

Corpus gen_id_image_mixture(const std::vector<IdImageClass>& classes, std::size_t n_per_class,
                            std::size_t side, std::uint64_t seed) {
    if (classes.empty()) throw ConfigError("gen_id_image_mixture: no classes");
    Corpus corpus;
    corpus.modality = Modality::Image;
    corpus.shape = {side, side};
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        Corpus part = gen_id_images(classes[ci], n_per_class, side, Rng::mix64(seed + ci));
        for (std::size_t i = 0; i < part.samples.size(); ++i) {
            corpus.samples.push_back(std::move(part.samples[i]));
            corpus.labels.push_back(part.labels[i]);
        }
    }
    return corpus;
}

std::string shift_kind_name(ShiftKind k) {
    switch (k) {
        case ShiftKind::FlipH: return "flip_h";
        case ShiftKind::Occlusion: return "occlusion";
        case ShiftKind::GaussianNoise: return "gaussian_noise";
        case ShiftKind::Fgsm: return "fgsm";
        case ShiftKind::Semantic: return "semantic";
        case ShiftKind::ScaleShift: return "scale_shift";
        case ShiftKind::FeatureShuffle: return "feature_shuffle";
        case ShiftKind::NewComponent: return "new_component";
    }
    throw ConfigError("unknown shift kind");
}

ShiftKind shift_kind_from_name(const std::string& name) {
    for (ShiftKind k : {ShiftKind::FlipH, ShiftKind::Occlusion, ShiftKind::GaussianNoise,
                        ShiftKind::Fgsm, ShiftKind::Semantic, ShiftKind::ScaleShift,
                        ShiftKind::FeatureShuffle, ShiftKind::NewComponent}) {
        if (shift_kind_name(k) == name) return k;
    }
    throw ConfigError("unknown shift kind: " + name);
}

Corpus apply_covariate_shift(const Corpus& corpus, const ShiftSpec& spec,
                             const InputGrad* input_grad) {
    if (corpus.samples.empty()) throw DataError("apply_covariate_shift: empty corpus");
    Corpus out;
    out.modality = corpus.modality;
    out.shape = corpus.shape;
    std::string family = spec.family.empty() ? shift_kind_name(spec.kind) : spec.family;
    std::size_t n = corpus.dim();
    bool image = corpus.modality == Modality::Image;
    Rng root(spec.seed, 0);

    switch (spec.kind) {
        case ShiftKind::FlipH: {
            if (!image) throw ConfigError("flip_h requires image data");
            std::size_t h = corpus.shape[0], w = corpus.shape[1];
            for (const auto& x : corpus.samples) {
                std::vector<double> y(n);
                for (std::size_t r = 0; r < h; ++r)
                    for (std::size_t c = 0; c < w; ++c) y[r * w + c] = x[r * w + (w - 1 - c)];
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::Occlusion: {
            if (!image) throw ConfigError("occlusion requires image data");
            if (spec.p <= 0.0 || spec.p >= 1.0)
                throw ConfigError("occlusion: area fraction must lie in (0,1)");
            std::size_t count = static_cast<std::size_t>(std::floor(spec.p * static_cast<double>(n)));
            if (count == 0) throw ConfigError("occlusion: fraction too small for this image");
            for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
                Rng r = root.split(i);
                std::size_t start = r.next_below(n - count + 1);
                std::vector<double> y = corpus.samples[i];
                for (std::size_t k = 0; k < count; ++k) y[start + k] = 0.0;
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::GaussianNoise: {
            if (spec.sigma <= 0.0) throw ConfigError("gaussian_noise: sigma must be positive");
            for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
                Rng r = root.split(i);
                std::vector<double> y = corpus.samples[i];
                for (double& v : y) {
                    v += spec.sigma * r.next_gaussian();
                    if (image) v = std::clamp(v, 0.0, 1.0);
                }
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::Fgsm: {
            if (spec.eps <= 0.0) throw ConfigError("fgsm: eps must be positive");
            if (input_grad == nullptr)
                throw ConfigError("fgsm requires a classifier loss gradient");
            for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
                std::vector<double> g = (*input_grad)(corpus.samples[i], corpus.labels[i]);
                if (g.size() != n) throw NumericError("fgsm: gradient dim mismatch");
                std::vector<double> y = corpus.samples[i];
                for (std::size_t k = 0; k < n; ++k) {
                    double s = g[k] > 0.0 ? 1.0 : (g[k] < 0.0 ? -1.0 : 0.0);
                    y[k] += spec.eps * s;
                    if (image) y[k] = std::clamp(y[k], 0.0, 1.0);
                }
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::ScaleShift: {
            if (spec.a == 0.0) throw ConfigError("scale_shift: zero scale is degenerate");
            for (const auto& x : corpus.samples) {
                std::vector<double> y(n);
                for (std::size_t k = 0; k < n; ++k) y[k] = spec.a * x[k] + spec.b;
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::FeatureShuffle: {
            std::vector<std::size_t> perm(n);
            for (std::size_t k = 0; k < n; ++k) perm[k] = k;
            shuffle_indices(perm, root);
            for (const auto& x : corpus.samples) {
                std::vector<double> y(n);
                for (std::size_t k = 0; k < n; ++k) y[k] = x[perm[k]];
                out.samples.push_back(std::move(y));
            }
            break;
        }
        case ShiftKind::Semantic:
        case ShiftKind::NewComponent:
            throw ConfigError("semantic shifts are generated from held-out sources, not applied");
    }
    out.labels.assign(out.samples.size(), family);
    return out;
}

Corpus gen_id_tabular(const std::vector<GaussianComponent>& comps, std::size_t n_per_comp,
                      std::uint64_t seed) {
    if (comps.empty()) throw ConfigError("gen_id_tabular: no components");
    std::size_t d = comps.front().mean.size();
    if (d == 0) throw ConfigError("gen_id_tabular: zero-dimensional component");
    for (const auto& c : comps) {
        if (c.mean.size() != d) throw ConfigError("gen_id_tabular: component dim mismatch");
        if (c.sigma <= 0.0) throw ConfigError("gen_id_tabular: sigma must be positive");
        if (c.rho < 0.0 || c.rho >= 1.0) throw ConfigError("gen_id_tabular: rho must be in [0,1)");
    }
    Corpus corpus;
    corpus.modality = Modality::Tabular;
    corpus.shape = {d};
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const GaussianComponent& comp = comps[ci];
        Rng root(seed, ci + 1);
        double sq_ind = std::sqrt(1.0 - comp.rho);
        double sq_com = std::sqrt(comp.rho);
        for (std::size_t i = 0; i < n_per_comp; ++i) {
            Rng r = root.split(i);
            double g = r.next_gaussian();
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = comp.mean[k] + comp.sigma * (sq_ind * r.next_gaussian() + sq_com * g);
            corpus.samples.push_back(std::move(x));
            corpus.labels.push_back(comp.label);
        }
    }
    return corpus;
}

GaussianComponent make_displaced_component(const std::vector<GaussianComponent>& comps,
                                           double min_sds, const std::string& label) {
    if (comps.empty()) throw ConfigError("make_displaced_component: no reference components");
    std::size_t d = comps.front().mean.size();
    double pooled_var = 0.0;
    double mean_rho = 0.0;
    std::vector<double> centroid(d, 0.0);
    for (const auto& c : comps) {
        pooled_var += c.sigma * c.sigma;
        mean_rho += c.rho;
        for (std::size_t k = 0; k < d; ++k) centroid[k] += c.mean[k];
    }
    pooled_var /= static_cast<double>(comps.size());
    mean_rho /= static_cast<double>(comps.size());
    for (double& v : centroid) v /= static_cast<double>(comps.size());
    double pooled_sd = std::sqrt(pooled_var);

    double far = 0.0;
    for (const auto& c : comps) {
        double dist2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double dv = c.mean[k] - centroid[k];
            dist2 += dv * dv;
        }
        far = std::max(far, std::sqrt(dist2));
    }
    double offset = far + 1.05 * min_sds * pooled_sd;
    double unit = 1.0 / std::sqrt(static_cast<double>(d));
    GaussianComponent out;
    out.mean.resize(d);
    for (std::size_t k = 0; k < d; ++k) out.mean[k] = centroid[k] + offset * unit;
    out.sigma = pooled_sd;
    out.rho = mean_rho;
    out.label = label;
    return out;
}

} // namespace disc
