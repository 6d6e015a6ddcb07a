#include "disc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "disc/errors.hpp"

namespace disc {

std::size_t ClassifierHead::class_index(const std::string& label) const {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw DataError("unknown class label: " + label);
    return static_cast<std::size_t>(it - classes.begin());
}

ClassifierHead train_classifier(const std::vector<std::vector<double>>& inputs,
                                const std::vector<std::string>& labels, const TrainConfig& cfg,
                                const std::vector<std::size_t>& hidden) {
    if (inputs.empty() || inputs.size() != labels.size())
        throw DataError("train_classifier: bad dataset");
    ClassifierHead head;
    std::set<std::string> uniq(labels.begin(), labels.end());
    head.classes.assign(uniq.begin(), uniq.end());
    if (head.classes.size() < 2) throw DataError("train_classifier: need at least 2 classes");

    std::vector<std::vector<double>> targets;
    targets.reserve(labels.size());
    for (const std::string& l : labels) {
        std::vector<double> t(head.classes.size(), 0.0);
        t[head.class_index(l)] = 1.0;
        targets.push_back(std::move(t));
    }

    std::vector<std::size_t> dims;
    dims.push_back(inputs.front().size());
    for (std::size_t hsz : hidden) dims.push_back(hsz);
    dims.push_back(head.classes.size());
    std::vector<Activation> acts(dims.size() - 1, Activation::Relu);
    acts.back() = Activation::Identity;

    Rng init_rng(cfg.seed, 5);
    DenseNet net = make_dense_net(dims, acts, init_rng);
    head.net = train(net, inputs, targets, LossKind::CrossEntropy, cfg).net;
    return head;
}

std::vector<double> classifier_logits(const ClassifierHead& head, std::span<const double> x) {
    return net_forward(head.net, x);
}

std::vector<double> classifier_posterior(const ClassifierHead& head, std::span<const double> x) {
    return softmax(classifier_logits(head, x));
}

std::vector<double> classifier_features(const ClassifierHead& head, std::span<const double> x) {
    if (head.net.layers.size() < 2) throw NumericError("classifier_features: no hidden layer");
    ForwardTrace tr = net_forward_trace(head.net, x);
    return tr.post[tr.post.size() - 2];
}

std::vector<double> classifier_input_grad(const ClassifierHead& head, std::span<const double> x,
                                          const std::string& label) {
    std::size_t ci = head.class_index(label);
    ForwardTrace tr = net_forward_trace(head.net, x);
    std::vector<double> dLdy = softmax(tr.post.back());
    dLdy[ci] -= 1.0;
    Gradients grads = zero_gradients(head.net);
    net_backward(head.net, x, tr, dLdy, grads);
    return grads.dx;
}

double classifier_accuracy(const ClassifierHead& head,
                           const std::vector<std::vector<double>>& inputs,
                           const std::vector<std::string>& labels) {
    if (inputs.empty() || inputs.size() != labels.size())
        throw DataError("classifier_accuracy: bad dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::vector<double> logits = classifier_logits(head, inputs[i]);
        std::size_t arg = static_cast<std::size_t>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (head.classes[arg] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

namespace {

// lower-triangular cholesky factor; throws if not positive definite
Matrix cholesky(const Matrix& a) {
    std::size_t n = a.rows;
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw NumericError("cholesky: matrix not positive definite");
                l(i, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

Matrix spd_inverse(const Matrix& a) {
    std::size_t n = a.rows;
    Matrix l = cholesky(a);
    Matrix inv(n, n);
    std::vector<double> y(n), x(n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = i == col ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
            x[ii] = s / l(ii, ii);
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

} // namespace

MahalanobisStats fit_mahalanobis(const std::vector<std::vector<double>>& features,
                                 const std::vector<std::size_t>& class_ids, double ridge) {
    if (features.empty() || features.size() != class_ids.size())
        throw DataError("fit_mahalanobis: bad dataset");
    std::size_t d = features.front().size();
    std::size_t n_classes = *std::max_element(class_ids.begin(), class_ids.end()) + 1;

    MahalanobisStats stats;
    stats.ridge = ridge;
    stats.class_means.assign(n_classes, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        ++counts[class_ids[i]];
        for (std::size_t j = 0; j < d; ++j) stats.class_means[class_ids[i]][j] += features[i][j];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (counts[c] == 0) throw DataError("fit_mahalanobis: empty class");
        for (double& v : stats.class_means[c]) v /= static_cast<double>(counts[c]);
    }

    Matrix cov(d, d);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& mu = stats.class_means[class_ids[i]];
        for (std::size_t r = 0; r < d; ++r) {
            double dr = features[i][r] - mu[r];
            for (std::size_t c = 0; c <= r; ++c) {
                double dc = features[i][c] - mu[c];
                cov(r, c) += dr * dc;
            }
        }
    }
    double inv_n = 1.0 / static_cast<double>(features.size());
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            cov(r, c) *= inv_n;
            cov(c, r) = cov(r, c);
        }
    for (std::size_t r = 0; r < d; ++r) cov(r, r) += ridge;
    stats.cov_inv = spd_inverse(cov);
    return stats;
}

double mahalanobis_sq_distance(const MahalanobisStats& stats, std::span<const double> f) {
    std::size_t d = stats.cov_inv.rows;
    if (f.size() != d) throw DataError("mahalanobis_sq_distance: dim mismatch");
    double best = 0.0;
    bool have = false;
    std::vector<double> diff(d);
    for (const auto& mu : stats.class_means) {
        for (std::size_t j = 0; j < d; ++j) diff[j] = f[j] - mu[j];
        double q = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) acc += stats.cov_inv(r, c) * diff[c];
            q += diff[r] * acc;
        }
        if (!have || q < best) {
            best = q;
            have = true;
        }
    }
    return best;
}

ScalarScores scalar_baselines(const ClassifierHead& head, const MahalanobisStats& stats,
                              std::span<const double> x) {
    std::vector<double> logits = classifier_logits(head, x);
    std::vector<double> post = softmax(logits);
    ScalarScores s;
    s.msp = *std::max_element(post.begin(), post.end());
    s.max_logit = *std::max_element(logits.begin(), logits.end());
    s.energy = -log_sum_exp(logits);
    s.mahalanobis = -mahalanobis_sq_distance(stats, classifier_features(head, x));
    return s;
}

std::vector<std::string> scalar_baseline_names() {
    return {"msp", "max_logit", "energy", "mahalanobis"};
}

Decision threshold_decide(double score, double tau) {
    return score < tau ? Decision::Out : Decision::In;
}

nlohmann::json classifier_to_json(const ClassifierHead& head) {
    return {{"classes", head.classes}, {"net", dense_net_to_json(head.net)}};
}

ClassifierHead classifier_from_json(const nlohmann::json& j) {
    ClassifierHead head;
    head.classes = j.at("classes").get<std::vector<std::string>>();
    head.net = dense_net_from_json(j.at("net"));
    return head;
}

} // namespace disc
