#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace disc {

struct DiscreteDistribution {
    std::vector<std::string> outcomes;
    std::vector<double> probs;
};

// One statistic value per outcome, aligned with DiscreteDistribution.
struct StatisticMap {
    std::vector<double> values;
};

void validate_distribution(const DiscreteDistribution& d);

// Pushforward of the distribution under the statistic: outcomes become the
// distinct statistic values in ascending order.
DiscreteDistribution statistic_marginal(const DiscreteDistribution& d, const StatisticMap& phi);

double total_variation(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct Counterexample {
    DiscreteDistribution q1;
    DiscreteDistribution q2;
    double eps_mass = 0.0;
    double qualifying_mass = 0.0; // P-mass of fibers with >= 2 positive outcomes
    double tv = 0.0;              // measured TV(q1, q2)
    double expected_tv = 0.0;     // 2 * eps_mass * qualifying_mass
    double marginal_gap = 0.0;    // max bin gap between the phi-marginals
};

// Builds two distributions that differ in TV but share P's phi-marginal:
// on every fiber of phi with at least two positive-mass outcomes, move
// eps_mass conditional probability from the second-lowest-indexed positive
// outcome to the lowest (q1), and the reverse (q2).
Counterexample build_counterexample(const DiscreteDistribution& p, const StatisticMap& phi,
                                    double eps_mass);

struct PowerFprRow {
    double tau = 0.0;
    double fpr = 0.0;   // null mass with phi > tau
    double power = 0.0; // alt mass with phi > tau
};

std::vector<PowerFprRow> power_vs_fpr(const DiscreteDistribution& null_dist,
                                      const DiscreteDistribution& alt_dist,
                                      const StatisticMap& phi,
                                      const std::vector<double>& thresholds);

// Default threshold sweep: below min, between each adjacent pair of distinct
// statistic values, and above max.
std::vector<double> default_thresholds(const StatisticMap& phi);

// TV distance between the joint pushforwards under (phi, psi).
double multi_statistic_separation(const DiscreteDistribution& q1, const DiscreteDistribution& q2,
                                  const StatisticMap& phi, const StatisticMap& psi);

nlohmann::json counterexample_to_json(const Counterexample& ce);

} // namespace disc
