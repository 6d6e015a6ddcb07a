#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "disc/diffusion.hpp"
#include "disc/rng.hpp"

namespace disc {

double mse(std::span<const double> a, std::span<const double> b);

// Mean SSIM over all fully-contained sliding windows (uniform window,
// stride 1). Inputs are grayscale images in [0,1]. Falls back to a single
// whole-image window when min(h, w) < window.
double ssim(std::span<const double> a, std::span<const double> b, std::size_t h, std::size_t w,
            int window = 7);

// Smoothed, normalized histogram; mass sums to 1 and every bin is positive.
struct Histogram {
    std::vector<double> mass;
};

// mass_i = (p_i + eps) / (1 + K * eps) where p is the count-normalized mass.
Histogram make_smoothed_histogram(const std::vector<double>& counts, double eps = 1e-6);

double kl_divergence(const Histogram& h1, const Histogram& h2);

// 256-bin local binary pattern histogram over interior pixels. The 8-bit
// code reads neighbors clockwise from the top-left, most significant bit
// first; a bit is set iff neighbor >= center.
Histogram lbp_histogram(std::span<const double> img, std::size_t h, std::size_t w,
                        double eps = 1e-6);

struct DwtBands {
    std::size_t h = 0, w = 0; // band dims (input halved)
    std::vector<double> ll, lh, hl, hh;
};

// One-level orthonormal Haar transform on non-overlapping 2x2 blocks.
// Requires even h and w.
DwtBands haar_dwt(std::span<const double> img, std::size_t h, std::size_t w);

// Histograms of the LH / HL / HH detail bands, values clipped to [-1, 1],
// bins evenly spaced over that range.
std::array<Histogram, 3> dwt_band_histograms(std::span<const double> img, std::size_t h,
                                             std::size_t w, int bins = 16, double eps = 1e-6);

// 1 - cosine similarity; two zero vectors give 0, exactly one zero gives 1.
double feature_distance(std::span<const double> f1, std::span<const double> f2);

// Fraction of index pairs whose relative order agrees between x and x_hat;
// differences within tie_tol count as ties and agree only with ties.
double rank_order_consistency(std::span<const double> x, std::span<const double> x_hat,
                              double tie_tol = 1e-9);

// Mean pairwise normalized Hamming distance of hidden pre-activation sign
// patterns of the denoiser at k perturbations x_t + r * eps_j.
double local_complexity(const DenoiserModel& model, std::span<const double> x_t, int t, int k,
                        double r, Rng& rng);

enum class MetricId {
    Mse,
    Ssim,
    FeatureDistance,
    LocalComplexity,
    LbpKl,
    DwtKlLh,
    DwtKlHl,
    DwtKlHh,
    RankOrder,
};

std::string metric_name(MetricId id);
MetricId metric_from_name(const std::string& name);

std::vector<MetricId> default_image_metrics();   // 8 per noise level
std::vector<MetricId> default_tabular_metrics(); // 4 per noise level

struct MetricParams {
    int ssim_window = 7;
    int dwt_bins = 16;
    double hist_eps = 1e-6;
    int lc_draws = 4;
    double lc_radius = 0.1;
    double tie_tol = 1e-9;
};

} // namespace disc
