#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "disc/dense_net.hpp"

namespace disc {

struct ClassifierHead {
    DenseNet net; // outputs raw logits
    std::vector<std::string> classes;

    std::size_t class_index(const std::string& label) const;
};

// Two relu hidden layers by default, softmax cross-entropy training.
ClassifierHead train_classifier(const std::vector<std::vector<double>>& inputs,
                                const std::vector<std::string>& labels, const TrainConfig& cfg,
                                const std::vector<std::size_t>& hidden = {64, 64});

std::vector<double> classifier_logits(const ClassifierHead& head, std::span<const double> x);
std::vector<double> classifier_posterior(const ClassifierHead& head, std::span<const double> x);

// Penultimate post-activation features.
std::vector<double> classifier_features(const ClassifierHead& head, std::span<const double> x);

// d cross-entropy(x, label) / dx, used for gradient-sign attacks.
std::vector<double> classifier_input_grad(const ClassifierHead& head, std::span<const double> x,
                                          const std::string& label);

double classifier_accuracy(const ClassifierHead& head,
                           const std::vector<std::vector<double>>& inputs,
                           const std::vector<std::string>& labels);

// Class-conditional gaussian scorer on classifier features with a shared
// (pooled within-class) covariance and a small diagonal ridge.
struct MahalanobisStats {
    std::vector<std::vector<double>> class_means;
    Matrix cov_inv;
    double ridge = 1e-6;
};

MahalanobisStats fit_mahalanobis(const std::vector<std::vector<double>>& features,
                                 const std::vector<std::size_t>& class_ids, double ridge = 1e-6);

double mahalanobis_sq_distance(const MahalanobisStats& stats, std::span<const double> f);

struct ScalarScores {
    double msp = 0.0;         // max softmax probability
    double max_logit = 0.0;   // largest raw logit
    double energy = 0.0;      // -logsumexp(logits)
    double mahalanobis = 0.0; // negated min squared distance over classes
};

ScalarScores scalar_baselines(const ClassifierHead& head, const MahalanobisStats& stats,
                              std::span<const double> x);

std::vector<std::string> scalar_baseline_names();

enum class Decision { In, Out };

// Scores are oriented so that larger means more in-distribution.
Decision threshold_decide(double score, double tau);

nlohmann::json classifier_to_json(const ClassifierHead& head);
ClassifierHead classifier_from_json(const nlohmann::json& j);

} // namespace disc
