#include "disc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "disc/errors.hpp"

namespace disc {

double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw NumericError("mse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

namespace {

struct WindowStats {
    double mx, my, vx, vy, cov;
};

WindowStats window_stats(std::span<const double> a, std::span<const double> b, std::size_t h,
                         std::size_t w, std::size_t r0, std::size_t c0, std::size_t win_h,
                         std::size_t win_w) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = r0; i < r0 + win_h; ++i) {
        for (std::size_t j = c0; j < c0 + win_w; ++j) {
            double x = a[i * w + j];
            double y = b[i * w + j];
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
    }
    double n = static_cast<double>(win_h * win_w);
    WindowStats s;
    s.mx = sx / n;
    s.my = sy / n;
    s.vx = sxx / n - s.mx * s.mx;
    s.vy = syy / n - s.my * s.my;
    s.cov = sxy / n - s.mx * s.my;
    (void)h;
    return s;
}

} // namespace

double ssim(std::span<const double> a, std::span<const double> b, std::size_t h, std::size_t w,
            int window) {
    if (a.size() != h * w || b.size() != h * w) throw NumericError("ssim: shape mismatch");
    if (window < 1) throw NumericError("ssim: window must be positive");
    constexpr double kC1 = 1e-4; // (0.01)^2
    constexpr double kC2 = 9e-4; // (0.03)^2
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < -1e-9 || a[i] > 1.0 + 1e-9 || b[i] < -1e-9 || b[i] > 1.0 + 1e-9)
            throw NumericError("ssim: pixel values must lie in [0,1]");
    }
    std::size_t win = static_cast<std::size_t>(window);
    std::size_t win_h = win, win_w = win;
    if (h < win || w < win) {
        win_h = h;
        win_w = w;
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r0 = 0; r0 + win_h <= h; ++r0) {
        for (std::size_t c0 = 0; c0 + win_w <= w; ++c0) {
            WindowStats s = window_stats(a, b, h, w, r0, c0, win_h, win_w);
            double num = (2.0 * s.mx * s.my + kC1) * (2.0 * s.cov + kC2);
            double den = (s.mx * s.mx + s.my * s.my + kC1) * (s.vx + s.vy + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

Histogram make_smoothed_histogram(const std::vector<double>& counts, double eps) {
    if (counts.empty()) throw NumericError("histogram: no bins");
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0) throw NumericError("histogram: negative count");
        total += c;
    }
    Histogram hist;
    hist.mass.resize(counts.size());
    double k = static_cast<double>(counts.size());
    // zero total smooths to uniform: (1/k + eps) / (1 + k eps) == 1/k
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double p = total > 0.0 ? counts[i] / total : 1.0 / k;
        hist.mass[i] = (p + eps) / (1.0 + k * eps);
    }
    return hist;
}

double kl_divergence(const Histogram& h1, const Histogram& h2) {
    if (h1.mass.size() != h2.mass.size() || h1.mass.empty())
        throw NumericError("kl_divergence: bin mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < h1.mass.size(); ++i) {
        if (h1.mass[i] <= 0.0 || h2.mass[i] <= 0.0)
            throw NumericError("kl_divergence: histograms must be smoothed (positive mass)");
        kl += h1.mass[i] * std::log(h1.mass[i] / h2.mass[i]);
    }
    return kl;
}

Histogram lbp_histogram(std::span<const double> img, std::size_t h, std::size_t w, double eps) {
    if (img.size() != h * w) throw NumericError("lbp_histogram: shape mismatch");
    if (h < 3 || w < 3) throw NumericError("lbp_histogram: image too small");
    // clockwise from top-left, MSB first
    static constexpr int dr[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    static constexpr int dc[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    std::vector<double> counts(256, 0.0);
    for (std::size_t i = 1; i + 1 < h; ++i) {
        for (std::size_t j = 1; j + 1 < w; ++j) {
            double center = img[i * w + j];
            unsigned code = 0;
            for (int k = 0; k < 8; ++k) {
                std::size_t ni = i + static_cast<std::size_t>(dr[k]);
                std::size_t nj = j + static_cast<std::size_t>(dc[k]);
                code <<= 1;
                if (img[ni * w + nj] >= center) code |= 1u;
            }
            counts[code] += 1.0;
        }
    }
    return make_smoothed_histogram(counts, eps);
}

DwtBands haar_dwt(std::span<const double> img, std::size_t h, std::size_t w) {
    if (img.size() != h * w) throw NumericError("haar_dwt: shape mismatch");
    if (h % 2 != 0 || w % 2 != 0 || h == 0 || w == 0)
        throw NumericError("haar_dwt: dimensions must be even");
    DwtBands out;
    out.h = h / 2;
    out.w = w / 2;
    std::size_t n = out.h * out.w;
    out.ll.resize(n);
    out.lh.resize(n);
    out.hl.resize(n);
    out.hh.resize(n);
    for (std::size_t i = 0; i < out.h; ++i) {
        for (std::size_t j = 0; j < out.w; ++j) {
            double a = img[(2 * i) * w + 2 * j];
            double b = img[(2 * i) * w + 2 * j + 1];
            double c = img[(2 * i + 1) * w + 2 * j];
            double d = img[(2 * i + 1) * w + 2 * j + 1];
            std::size_t k = i * out.w + j;
            out.ll[k] = (a + b + c + d) / 2.0;
            out.hl[k] = (a - b + c - d) / 2.0; // responds to vertical edges
            out.lh[k] = (a + b - c - d) / 2.0; // responds to horizontal edges
            out.hh[k] = (a - b - c + d) / 2.0;
        }
    }
    return out;
}

namespace {

std::vector<double> band_counts(const std::vector<double>& band, int bins) {
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : band) {
        double c = std::clamp(v, -1.0, 1.0);
        double u = (c + 1.0) / 2.0;
        int idx = std::min(bins - 1, static_cast<int>(u * bins));
        counts[static_cast<std::size_t>(idx)] += 1.0;
    }
    return counts;
}

} // namespace

std::array<Histogram, 3> dwt_band_histograms(std::span<const double> img, std::size_t h,
                                             std::size_t w, int bins, double eps) {
    if (bins < 2) throw NumericError("dwt_band_histograms: need at least 2 bins");
    DwtBands b = haar_dwt(img, h, w);
    return {make_smoothed_histogram(band_counts(b.lh, bins), eps),
            make_smoothed_histogram(band_counts(b.hl, bins), eps),
            make_smoothed_histogram(band_counts(b.hh, bins), eps)};
}

double feature_distance(std::span<const double> f1, std::span<const double> f2) {
    if (f1.size() != f2.size() || f1.empty()) throw NumericError("feature_distance: shape mismatch");
    double dot = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        dot += f1[i] * f2[i];
        n1 += f1[i] * f1[i];
        n2 += f2[i] * f2[i];
    }
    bool z1 = n1 == 0.0, z2 = n2 == 0.0;
    if (z1 && z2) return 0.0;
    if (z1 || z2) return 1.0;
    return 1.0 - dot / (std::sqrt(n1) * std::sqrt(n2));
}

double rank_order_consistency(std::span<const double> x, std::span<const double> x_hat,
                              double tie_tol) {
    if (x.size() != x_hat.size()) throw NumericError("rank_order_consistency: shape mismatch");
    std::size_t n = x.size();
    if (n < 2) throw NumericError("rank_order_consistency: need at least 2 entries");
    auto sgn = [tie_tol](double d) { return std::fabs(d) <= tie_tol ? 0 : (d > 0 ? 1 : -1); };
    std::size_t agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ++pairs;
            if (sgn(x[i] - x[j]) == sgn(x_hat[i] - x_hat[j])) ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

double local_complexity(const DenoiserModel& model, std::span<const double> x_t, int t, int k,
                        double r, Rng& rng) {
    if (k < 2) throw NumericError("local_complexity: need at least 2 perturbations");
    if (r < 0.0) throw NumericError("local_complexity: radius must be non-negative");
    std::size_t dim = x_t.size();
    std::vector<std::vector<bool>> patterns;
    patterns.reserve(static_cast<std::size_t>(k));
    std::vector<double> probe(dim);
    for (int j = 0; j < k; ++j) {
        std::vector<double> eps = gaussian_sample(rng, dim);
        for (std::size_t i = 0; i < dim; ++i) probe[i] = x_t[i] + r * eps[i];
        std::vector<double> in(probe);
        std::vector<double> emb = timestep_embedding(t, model.schedule.T);
        in.insert(in.end(), emb.begin(), emb.end());
        ForwardTrace tr = net_forward_trace(model.net, in);
        std::vector<bool> pat;
        for (std::size_t l = 0; l + 1 < tr.pre.size(); ++l) // hidden layers only
            for (double z : tr.pre[l]) pat.push_back(z > 0.0);
        patterns.push_back(std::move(pat));
    }
    std::size_t bits = patterns.front().size();
    if (bits == 0) throw NumericError("local_complexity: denoiser has no hidden units");
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < patterns.size(); ++a) {
        for (std::size_t b = a + 1; b < patterns.size(); ++b) {
            std::size_t ham = 0;
            for (std::size_t i = 0; i < bits; ++i)
                if (patterns[a][i] != patterns[b][i]) ++ham;
            total += static_cast<double>(ham) / static_cast<double>(bits);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

std::string metric_name(MetricId id) {
    switch (id) {
        case MetricId::Mse: return "mse";
        case MetricId::Ssim: return "ssim";
        case MetricId::FeatureDistance: return "feat_dist";
        case MetricId::LocalComplexity: return "local_complexity";
        case MetricId::LbpKl: return "lbp_kl";
        case MetricId::DwtKlLh: return "dwt_kl_lh";
        case MetricId::DwtKlHl: return "dwt_kl_hl";
        case MetricId::DwtKlHh: return "dwt_kl_hh";
        case MetricId::RankOrder: return "rank_order";
    }
    throw ConfigError("unknown metric id");
}

MetricId metric_from_name(const std::string& name) {
    for (MetricId id : {MetricId::Mse, MetricId::Ssim, MetricId::FeatureDistance,
                        MetricId::LocalComplexity, MetricId::LbpKl, MetricId::DwtKlLh,
                        MetricId::DwtKlHl, MetricId::DwtKlHh, MetricId::RankOrder}) {
        if (metric_name(id) == name) return id;
    }
    throw ConfigError("unknown metric: " + name);
}

std::vector<MetricId> default_image_metrics() {
    return {MetricId::Mse,     MetricId::Ssim,     MetricId::FeatureDistance,
            MetricId::LocalComplexity, MetricId::LbpKl, MetricId::DwtKlLh,
            MetricId::DwtKlHl, MetricId::DwtKlHh};
}

std::vector<MetricId> default_tabular_metrics() {
    return {MetricId::Mse, MetricId::RankOrder, MetricId::FeatureDistance,
            MetricId::LocalComplexity};
}

} // namespace disc
