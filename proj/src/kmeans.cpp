#include "disc/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disc/errors.hpp"
#include "disc/rng.hpp"

namespace disc {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::vector<double>> kmeanspp_seed(const std::vector<std::vector<double>>& data,
                                               std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.push_back(data[rng.next_below(data.size())]);
    std::vector<double> d2(data.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double best = dist2(data[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, dist2(data[i], centroids[c]));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.next_below(data.size());
        } else {
            double r = rng.next_uniform() * total;
            double acc = 0.0;
            pick = data.size() - 1;
            for (std::size_t i = 0; i < data.size(); ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(data[pick]);
    }
    return centroids;
}

KMeansModel lloyd(const std::vector<std::vector<double>>& data, std::size_t k, Rng& rng,
                  int max_iter, std::uint64_t seed) {
    KMeansModel model;
    model.seed = seed;
    model.centroids = kmeanspp_seed(data, k, rng);
    std::size_t d = data.front().size();
    std::vector<std::size_t> assign(data.size(), 0);
    std::vector<std::size_t> prev_assign;
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::size_t best = 0;
            double best_d = dist2(data[i], model.centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double dd = dist2(data[i], model.centroids[c]);
                if (dd < best_d) { // strict: ties stay with the lowest id
                    best_d = dd;
                    best = c;
                }
            }
            assign[i] = best;
            inertia += best_d;
        }
        if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12)
            throw NumericError("kmeans: inertia increased between iterations");
        prev_inertia = inertia;
        model.inertia = inertia;
        model.iterations = iter + 1;
        if (assign == prev_assign) break;
        prev_assign = assign;

        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            ++counts[assign[i]];
            for (std::size_t j = 0; j < d; ++j) sums[assign[i]][j] += data[i][j];
        }
        std::vector<std::size_t> taken; // points promoted to centroids this round
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed to the farthest point from its centroid
                double far_d = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < data.size(); ++i) {
                    if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
                    double dd = dist2(data[i], model.centroids[assign[i]]);
                    if (dd > far_d) {
                        far_d = dd;
                        far_i = i;
                    }
                }
                model.centroids[c] = data[far_i];
                taken.push_back(far_i);
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    model.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
            }
        }
    }
    return model;
}

} // namespace

KMeansModel kmeans_fit(const std::vector<std::vector<double>>& data, std::size_t k,
                       std::uint64_t seed, int n_restarts, int max_iter) {
    if (data.empty()) throw DataError("kmeans_fit: empty dataset");
    std::size_t d = data.front().size();
    for (const auto& r : data)
        if (r.size() != d || d == 0) throw DataError("kmeans_fit: ragged rows");
    if (k < 1 || k > data.size()) throw ConfigError("kmeans_fit: k out of range");
    if (n_restarts < 1 || max_iter < 1) throw ConfigError("kmeans_fit: bad restarts/iterations");

    KMeansModel best;
    bool have = false;
    for (int r = 0; r < n_restarts; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        KMeansModel m = lloyd(data, k, rng, max_iter, seed);
        if (!have || m.inertia < best.inertia) {
            best = std::move(m);
            have = true;
        }
    }
    return best;
}

std::size_t kmeans_assign(const KMeansModel& model, std::span<const double> x) {
    if (model.centroids.empty() || x.size() != model.centroids.front().size())
        throw DataError("kmeans_assign: dim mismatch");
    std::size_t best = 0;
    double best_d = dist2(x, model.centroids[0]);
    for (std::size_t c = 1; c < model.centroids.size(); ++c) {
        double dd = dist2(x, model.centroids[c]);
        if (dd < best_d) {
            best_d = dd;
            best = c;
        }
    }
    return best;
}

std::vector<std::size_t> kmeans_assign_all(const KMeansModel& model,
                                           const std::vector<std::vector<double>>& data) {
    std::vector<std::size_t> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = kmeans_assign(model, data[i]);
    return out;
}

nlohmann::json kmeans_to_json(const KMeansModel& m) {
    return {{"centroids", m.centroids},
            {"inertia", m.inertia},
            {"iterations", m.iterations},
            {"seed", m.seed}};
}

KMeansModel kmeans_from_json(const nlohmann::json& j) {
    KMeansModel m;
    m.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    m.inertia = j.at("inertia").get<double>();
    m.iterations = j.at("iterations").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

} // namespace disc
