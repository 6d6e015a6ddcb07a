#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "disc/rng.hpp"

namespace disc {

enum class Modality { Image, Tabular };

struct Corpus {
    Modality modality = Modality::Image;
    std::vector<std::size_t> shape; // {h, w} or {d}
    std::vector<std::vector<double>> samples;
    std::vector<std::string> labels; // class or shift-family label per sample

    std::size_t dim() const {
        std::size_t n = 1;
        for (std::size_t s : shape) n *= s;
        return shape.empty() ? 0 : n;
    }
};

enum class IdImageClass { Blobs, Stripes, Checkers };

std::string image_class_name(IdImageClass c);
IdImageClass image_class_from_name(const std::string& name);

// Grayscale square images in [0,1], one deterministic stream per sample.
Corpus gen_id_images(IdImageClass cls, std::size_t n, std::size_t side, std::uint64_t seed);

// Mixed corpus of several classes (labels preserved), interleaved.
Corpus gen_id_image_mixture(const std::vector<IdImageClass>& classes, std::size_t n_per_class,
                            std::size_t side, std::uint64_t seed);

enum class ShiftKind {
    FlipH,
    Occlusion,
    GaussianNoise,
    Fgsm,
    Semantic,
    ScaleShift,
    FeatureShuffle,
    NewComponent,
};

std::string shift_kind_name(ShiftKind k);
ShiftKind shift_kind_from_name(const std::string& name);

struct ShiftSpec {
    ShiftKind kind = ShiftKind::FlipH;
    double p = 0.0;     // occlusion area fraction
    double sigma = 0.0; // gaussian noise level
    double eps = 0.0;   // fgsm step
    double a = 1.0;     // scale_shift multiplier
    double b = 0.0;     // scale_shift offset
    std::uint64_t seed = 0;
    std::string family; // label; defaults to the kind name
};

// Gradient of a per-sample loss w.r.t. the input, given (x, class label).
using InputGrad =
    std::function<std::vector<double>(std::span<const double>, const std::string&)>;

// Applies a covariate shift to every sample; labels become the shift family.
// fgsm requires a loss gradient callback.
Corpus apply_covariate_shift(const Corpus& corpus, const ShiftSpec& spec,
                             const InputGrad* input_grad = nullptr);

// Tabular generators: equicorrelated gaussian mixture components.
struct GaussianComponent {
    std::vector<double> mean;
    double sigma = 1.0;
    double rho = 0.0; // pairwise correlation in [0, 1)
    std::string label = "id";
};

Corpus gen_id_tabular(const std::vector<GaussianComponent>& comps, std::size_t n_per_comp,
                      std::uint64_t seed);

// A fresh component whose mean is displaced at least min_sds pooled standard
// deviations from every training component mean.
GaussianComponent make_displaced_component(const std::vector<GaussianComponent>& comps,
                                           double min_sds, const std::string& label);

} // namespace disc
