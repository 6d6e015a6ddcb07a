#include <doctest.h>

#include <cmath>
#include <vector>

#include "disc/errors.hpp"
#include "disc/trajectory.hpp"

using namespace disc;

namespace {

DenoiserModel make_model(std::vector<std::size_t> shape, std::uint64_t seed) {
    DenoiserModel m;
    m.schedule = make_schedule(200, 1e-4, 0.02);
    m.data_shape = std::move(shape);
    Rng rng(seed, 0);
    m.net = make_dense_net({m.data_dim() + kTimestepEmbedDim, 16, 16, m.data_dim()},
                           {Activation::Silu, Activation::Silu, Activation::Identity}, rng);
    return m;
}

} // namespace

TEST_CASE("default grid spans 5 to 95 percent of the schedule") {
    CHECK(default_grid(200) ==
          std::vector<int>{10, 30, 50, 70, 90, 110, 130, 150, 170, 190});
    auto g1 = default_grid(200, 1);
    CHECK(g1 == std::vector<int>{10});
    // tiny schedules stay in range and strictly increasing after dedup
    auto tiny = default_grid(3);
    CHECK(!tiny.empty());
    for (std::size_t i = 0; i < tiny.size(); ++i) {
        CHECK(tiny[i] >= 1);
        CHECK(tiny[i] <= 3);
        if (i > 0) CHECK(tiny[i] > tiny[i - 1]);
    }
    CHECK_THROWS_AS(default_grid(0), ConfigError);
}

TEST_CASE("default configs pick modality metric sets") {
    auto img = default_trajectory_config(200, true, 7);
    CHECK(img.metrics.size() == 8);
    CHECK(img.grid.size() == 10);
    CHECK(img.base_seed == 7);
    auto tab = default_trajectory_config(200, false, 7);
    CHECK(tab.metrics.size() == 4);
}

TEST_CASE("column names are level major") {
    auto cfg = default_trajectory_config(200, true, 0);
    auto names = embedding_column_names(cfg);
    REQUIRE(names.size() == 80);
    CHECK(names[0] == "mse_t10");
    CHECK(names[1] == "ssim_t10");
    CHECK(names[7] == "dwt_kl_hh_t10");
    CHECK(names[8] == "mse_t30");
    CHECK(names[79] == "dwt_kl_hh_t190");
}

TEST_CASE("config json round trip and hash stability") {
    auto cfg = default_trajectory_config(200, false, 21);
    auto j = trajectory_config_to_json(cfg);
    auto back = trajectory_config_from_json(j);
    CHECK(back.grid == cfg.grid);
    CHECK(back.n_draws == cfg.n_draws);
    CHECK(back.metrics == cfg.metrics);
    CHECK(back.base_seed == cfg.base_seed);
    CHECK(trajectory_config_hash(back) == trajectory_config_hash(cfg));
    auto cfg2 = cfg;
    cfg2.grid[0] += 1;
    CHECK(trajectory_config_hash(cfg2) != trajectory_config_hash(cfg));
}

TEST_CASE("image embedding is finite, sized, and deterministic") {
    auto model = make_model({8, 8}, 3);
    Rng rng(1, 0);
    std::vector<double> x(64);
    for (auto& v : x) v = rng.next_uniform();
    auto cfg = default_trajectory_config(200, true, 17);
    auto e1 = extract_embedding(model, x, cfg, 5);
    auto e2 = extract_embedding(model, x, cfg, 5);
    REQUIRE(e1.values.size() == 80);
    CHECK(e1.values == e2.values);
    CHECK(e1.sample_id == 5);
    CHECK(e1.config_hash == trajectory_config_hash(cfg));
    for (double v : e1.values) CHECK(std::isfinite(v));
    // different sample id -> different noise draws -> different values
    auto e3 = extract_embedding(model, x, cfg, 6);
    CHECK(e1.values != e3.values);
}

TEST_CASE("embedding does not depend on batch composition") {
    auto model = make_model({4}, 9);
    std::vector<std::vector<double>> xs;
    Rng rng(2, 0);
    for (int i = 0; i < 3; ++i)
        xs.push_back({rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian(),
                      rng.next_gaussian()});
    auto cfg = default_trajectory_config(200, false, 40);
    auto batch = extract_embeddings(model, xs, cfg, 0);
    REQUIRE(batch.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        auto solo = extract_embedding(model, xs[i], cfg, i);
        CHECK(solo.values == batch[i].values);
    }
    // offset ids shift the noise streams
    auto shifted = extract_embeddings(model, xs, cfg, 10);
    CHECK(shifted[0].sample_id == 10);
    CHECK(shifted[0].values != batch[0].values);
}

TEST_CASE("mse-only embedding is a column slice of the full embedding") {
    auto model = make_model({6}, 13);
    Rng rng(4, 0);
    std::vector<double> x(6);
    for (auto& v : x) v = rng.next_gaussian();
    auto full = default_trajectory_config(200, false, 33);
    auto only = full;
    only.metrics = {MetricId::Mse};
    auto ef = extract_embedding(model, x, full, 2);
    auto em = extract_embedding(model, x, only, 2);
    REQUIRE(em.values.size() == full.grid.size());
    for (std::size_t li = 0; li < full.grid.size(); ++li)
        CHECK(em.values[li] == ef.values[li * full.metrics.size() + 0]);
}

TEST_CASE("n_draws averages fresh noise draws") {
    auto model = make_model({4}, 23);
    std::vector<double> x = {0.1, -0.2, 0.3, -0.4};
    auto cfg = default_trajectory_config(200, false, 50);
    cfg.metrics = {MetricId::Mse};
    auto e1 = extract_embedding(model, x, cfg, 0);
    cfg.n_draws = 3;
    auto e3 = extract_embedding(model, x, cfg, 0);
    REQUIRE(e3.values.size() == e1.values.size());
    CHECK(e3.values != e1.values);
    for (double v : e3.values) CHECK(std::isfinite(v));
}

TEST_CASE("config validation rejects bad grids and metric sets") {
    auto model = make_model({4}, 2);
    std::vector<double> x = {0.0, 0.0, 0.0, 0.0};
    TrajectoryConfig cfg = default_trajectory_config(200, false, 0);

    auto bad = cfg;
    bad.grid = {};
    CHECK_THROWS_AS(extract_embedding(model, x, bad, 0), ConfigError);

    bad = cfg;
    bad.grid = {50, 50};
    CHECK_THROWS_AS(extract_embedding(model, x, bad, 0), ConfigError);

    bad = cfg;
    bad.grid = {50, 250};
    CHECK_THROWS_AS(extract_embedding(model, x, bad, 0), ConfigError);

    bad = cfg;
    bad.metrics = {MetricId::Ssim}; // image metric on tabular data
    CHECK_THROWS_AS(extract_embedding(model, x, bad, 0), ConfigError);

    bad = cfg;
    bad.n_draws = 0;
    CHECK_THROWS_AS(extract_embedding(model, x, bad, 0), ConfigError);

    std::vector<double> short_x = {0.0};
    CHECK_THROWS_AS(extract_embedding(model, short_x, cfg, 0), DataError);
}

TEST_CASE("standardizer centers and scales") {
    std::vector<std::vector<double>> rows = {{1.0, 5.0, 2.0}, {3.0, 5.0, 4.0}, {5.0, 5.0, 9.0}};
    auto s = fit_standardizer(rows);
    REQUIRE(s.mean.size() == 3);
    CHECK(s.mean[0] == doctest::Approx(3.0));
    CHECK(s.mean[1] == doctest::Approx(5.0));
    // constant column: stdev floored, standardized value exactly 0
    CHECK(s.stdev[1] == 1e-8);
    double m0 = 0, v0 = 0;
    std::vector<std::vector<double>> std_rows;
    for (const auto& r : rows) std_rows.push_back(apply_standardizer(s, r));
    for (const auto& r : std_rows) m0 += r[0];
    m0 /= 3.0;
    for (const auto& r : std_rows) v0 += (r[0] - m0) * (r[0] - m0);
    v0 /= 3.0;
    CHECK(m0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v0 == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& r : std_rows) CHECK(r[1] == 0.0);
}
