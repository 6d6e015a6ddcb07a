#include <doctest.h>

#include <cmath>
#include <vector>

#include "disc/errors.hpp"
#include "disc/metrics.hpp"

using namespace disc;

TEST_CASE("mse basics") {
    std::vector<double> a = {1.0, 2.0}, b = {0.0, 4.0};
    CHECK(mse(a, b) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(mse(a, a) == 0.0);
    std::vector<double> c = {1.0};
    CHECK_THROWS_AS(mse(a, c), NumericError);
}

TEST_CASE("ssim of an image with itself is exactly 1") {
    Rng rng(41, 0);
    std::vector<double> img(16 * 16);
    for (auto& v : img) v = rng.next_uniform();
    CHECK(ssim(img, img, 16, 16) == 1.0);
    // also exact through the whole-image fallback
    std::vector<double> small(9, 0.0);
    for (std::size_t i = 0; i < 9; ++i) small[i] = static_cast<double>(i) / 10.0;
    CHECK(ssim(small, small, 3, 3) == 1.0);
}

TEST_CASE("ssim of two constant images has a closed form") {
    std::vector<double> a(64, 0.2), b(64, 0.6);
    // zero variance everywhere: ((2*0.2*0.6 + 1e-4) * 9e-4) / ((0.04+0.36+1e-4) * 9e-4)
    CHECK(ssim(a, b, 8, 8) == doctest::Approx(0.60010).epsilon(1e-5));
    CHECK(ssim(a, b, 8, 8) == doctest::Approx(0.6000999750062485).epsilon(1e-12));
    CHECK(ssim(b, a, 8, 8) == ssim(a, b, 8, 8));
    // fallback path gives the same constant-image value
    std::vector<double> a3(9, 0.2), b3(9, 0.6);
    CHECK(ssim(a3, b3, 3, 3) == doctest::Approx(0.6000999750062485).epsilon(1e-12));
}

TEST_CASE("ssim bounds, sensitivity and validation") {
    Rng rng(42, 0);
    std::vector<double> a(16 * 16), b(16 * 16);
    for (auto& v : a) v = rng.next_uniform();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::min(1.0, a[i] * 0.5 + 0.25);
    double s = ssim(a, b, 16, 16);
    CHECK(s < 1.0);
    CHECK(s > -1.0);
    std::vector<double> bad = a;
    bad[0] = 1.5;
    CHECK_THROWS_AS(ssim(a, bad, 16, 16), NumericError);
    CHECK_THROWS_AS(ssim(a, b, 16, 15), NumericError);
}

TEST_CASE("smoothed histogram normalizes and stays positive") {
    Histogram hist = make_smoothed_histogram({3.0, 1.0});
    double sum = hist.mass[0] + hist.mass[1];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hist.mass[0] > hist.mass[1]);
    Histogram zeros = make_smoothed_histogram({0.0, 0.0, 0.0});
    for (double m : zeros.mass) {
        CHECK(m > 0.0);
        CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(make_smoothed_histogram({}), NumericError);
}

TEST_CASE("kl divergence matches hand-computed smoothed values") {
    Histogram h1 = make_smoothed_histogram({3.0, 1.0});
    Histogram h2 = make_smoothed_histogram({1.0, 1.0});
    CHECK(kl_divergence(h1, h2) == doctest::Approx(0.13081).epsilon(1e-4));
    CHECK(kl_divergence(h2, h1) == doctest::Approx(0.14384).epsilon(1e-4));
    CHECK(kl_divergence(h1, h1) == 0.0);
}

TEST_CASE("kl divergence is non-negative on random histograms") {
    Rng rng(13, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> c1(16), c2(16);
        for (auto& v : c1) v = std::floor(rng.next_uniform() * 20.0);
        for (auto& v : c2) v = std::floor(rng.next_uniform() * 20.0);
        Histogram h1 = make_smoothed_histogram(c1);
        Histogram h2 = make_smoothed_histogram(c2);
        CHECK(kl_divergence(h1, h2) >= 0.0);
    }
}

TEST_CASE("lbp code reads neighbors clockwise from the top-left") {
    // 3x3 ramp 1..9, single interior pixel (center 5):
    // neighbors clockwise from top-left are 1,2,3,6,9,8,7,4 -> bits 00011110
    std::vector<double> img = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    Histogram h = lbp_histogram(img, 3, 3);
    REQUIRE(h.mass.size() == 256);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < 256; ++i)
        if (h.mass[i] > h.mass[argmax]) argmax = i;
    CHECK(argmax == 30);

    // constant image: every neighbor >= center, all codes 255
    std::vector<double> flat(25, 0.4);
    Histogram hc = lbp_histogram(flat, 5, 5);
    std::size_t am = 0;
    for (std::size_t i = 1; i < 256; ++i)
        if (hc.mass[i] > hc.mass[am]) am = i;
    CHECK(am == 255);

    CHECK_THROWS_AS(lbp_histogram(img, 1, 9), NumericError);
}

TEST_CASE("haar transform of one block is exact") {
    std::vector<double> img = {1, 2, 3, 4};
    DwtBands b = haar_dwt(img, 2, 2);
    REQUIRE(b.ll.size() == 1);
    CHECK(b.ll[0] == 5.0);
    CHECK(b.hl[0] == -1.0);
    CHECK(b.lh[0] == -2.0);
    CHECK(b.hh[0] == 0.0);
    CHECK_THROWS_AS(haar_dwt(img, 1, 4), NumericError);
}

TEST_CASE("haar transform preserves energy") {
    Rng rng(55, 0);
    std::vector<double> img(12 * 12);
    for (auto& v : img) v = rng.next_gaussian();
    DwtBands b = haar_dwt(img, 12, 12);
    double ein = 0.0, eout = 0.0;
    for (double v : img) ein += v * v;
    for (const auto* band : {&b.ll, &b.lh, &b.hl, &b.hh})
        for (double v : *band) eout += v * v;
    CHECK(eout == doctest::Approx(ein).epsilon(1e-12));
}

TEST_CASE("vertical step excites HL only") {
    std::size_t h = 6, w = 6;
    std::vector<double> img(h * w);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) img[i * w + j] = j < 3 ? 0.0 : 1.0;
    DwtBands b = haar_dwt(img, h, w);
    double hl = 0, lh = 0, hh = 0;
    for (double v : b.hl) hl += std::fabs(v);
    for (double v : b.lh) lh += std::fabs(v);
    for (double v : b.hh) hh += std::fabs(v);
    CHECK(hl > 0.0);
    CHECK(lh == 0.0);
    CHECK(hh == 0.0);
}

TEST_CASE("dwt band histogram bin placement") {
    // build a 2x2 image whose single HH coefficient hits a chosen value
    auto hh_hist = [](double a, double bb, double c, double d) {
        std::vector<double> img = {a, bb, c, d};
        return dwt_band_histograms(img, 2, 2, 16)[2];
    };
    // hh = (a - b - c + d) / 2
    Histogram at0 = hh_hist(0.0, 0.0, 0.0, 0.0); // hh = 0 -> center bin 8
    Histogram atm1 = hh_hist(0.0, 1.0, 1.0, 0.0); // hh = -1 -> bin 0
    Histogram atp1 = hh_hist(1.0, 0.0, 0.0, 1.0); // hh = +1 -> clipped into bin 15
    auto argmax = [](const Histogram& hist) {
        std::size_t am = 0;
        for (std::size_t i = 1; i < hist.mass.size(); ++i)
            if (hist.mass[i] > hist.mass[am]) am = i;
        return am;
    };
    CHECK(at0.mass.size() == 16);
    CHECK(argmax(at0) == 8);
    CHECK(argmax(atm1) == 0);
    CHECK(argmax(atp1) == 15);
    // out-of-range coefficients clip into the edge bins
    Histogram clipped = hh_hist(10.0, 0.0, 0.0, 10.0); // hh = 10
    CHECK(argmax(clipped) == 15);
}

TEST_CASE("feature distance conventions") {
    std::vector<double> u = {1.0, 0.0}, v = {0.0, 2.0}, nu = {-3.0, 0.0}, z = {0.0, 0.0};
    CHECK(feature_distance(u, u) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(feature_distance(u, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(feature_distance(u, nu) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(feature_distance(z, z) == 0.0);
    CHECK(feature_distance(u, z) == 1.0);
    CHECK(feature_distance(z, u) == 1.0);
    std::vector<double> scaled = {5.0, 0.0};
    CHECK(feature_distance(u, scaled) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rank order consistency counts agreeing pairs") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<double> same = {10.0, 20.0, 30.0};
    std::vector<double> rev = {3.0, 2.0, 1.0};
    CHECK(rank_order_consistency(x, same) == 1.0);
    CHECK(rank_order_consistency(x, rev) == 0.0);
    // one of three pairs flipped
    std::vector<double> part = {2.0, 1.0, 3.0};
    CHECK(rank_order_consistency(x, part) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // ties agree only with ties
    std::vector<double> tx = {1.0, 1.0 + 1e-12, 2.0};
    std::vector<double> th = {5.0, 5.0, 6.0};
    CHECK(rank_order_consistency(tx, th) == 1.0);
    std::vector<double> th2 = {5.0, 5.1, 6.0};
    CHECK(rank_order_consistency(tx, th2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    std::vector<double> single = {1.0};
    CHECK_THROWS_AS(rank_order_consistency(single, single), NumericError);
}

namespace {

DenoiserModel handmade_model() {
    DenoiserModel m;
    m.schedule = make_schedule(200, 1e-4, 0.02);
    m.data_shape = {2};
    Rng rng(5, 0);
    m.net = make_dense_net({2 + kTimestepEmbedDim, 8, 8, 2},
                           {Activation::Silu, Activation::Silu, Activation::Identity}, rng);
    return m;
}

} // namespace

TEST_CASE("local complexity is a normalized hamming mean") {
    DenoiserModel m = handmade_model();
    std::vector<double> x = {0.3, -0.4};
    Rng r1(9, 0), r2(9, 0);
    double v1 = local_complexity(m, x, 50, 4, 0.1, r1);
    double v2 = local_complexity(m, x, 50, 4, 0.1, r2);
    CHECK(v1 == v2);
    CHECK(v1 >= 0.0);
    CHECK(v1 <= 1.0);
    // zero radius: identical perturbations, identical sign patterns
    Rng r3(9, 0);
    CHECK(local_complexity(m, x, 50, 4, 0.0, r3) == 0.0);
    Rng r4(9, 0);
    CHECK_THROWS_AS(local_complexity(m, x, 50, 1, 0.1, r4), NumericError);
}

TEST_CASE("metric names round trip") {
    for (MetricId id : {MetricId::Mse, MetricId::Ssim, MetricId::FeatureDistance,
                        MetricId::LocalComplexity, MetricId::LbpKl, MetricId::DwtKlLh,
                        MetricId::DwtKlHl, MetricId::DwtKlHh, MetricId::RankOrder}) {
        CHECK(metric_from_name(metric_name(id)) == id);
    }
    CHECK_THROWS_AS(metric_from_name("nope"), ConfigError);
}

TEST_CASE("default metric sets") {
    auto img = default_image_metrics();
    REQUIRE(img.size() == 8);
    CHECK(img[0] == MetricId::Mse);
    CHECK(img[1] == MetricId::Ssim);
    CHECK(img[2] == MetricId::FeatureDistance);
    CHECK(img[3] == MetricId::LocalComplexity);
    CHECK(img[4] == MetricId::LbpKl);
    CHECK(img[5] == MetricId::DwtKlLh);
    CHECK(img[6] == MetricId::DwtKlHl);
    CHECK(img[7] == MetricId::DwtKlHh);

    auto tab = default_tabular_metrics();
    REQUIRE(tab.size() == 4);
    CHECK(tab[0] == MetricId::Mse);
    CHECK(tab[1] == MetricId::RankOrder);
    CHECK(tab[2] == MetricId::FeatureDistance);
    CHECK(tab[3] == MetricId::LocalComplexity);
}
