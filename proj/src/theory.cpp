#include "disc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "disc/errors.hpp"
#include "disc/io.hpp"

namespace disc {

void validate_distribution(const DiscreteDistribution& d) {
    if (d.outcomes.empty() || d.outcomes.size() != d.probs.size())
        throw DataError("distribution: outcomes/probs mismatch");
    double total = 0.0;
    for (double p : d.probs) {
        if (!(p >= 0.0)) throw DataError("distribution: negative or NaN mass");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw DataError("distribution: mass does not sum to 1");
}

DiscreteDistribution statistic_marginal(const DiscreteDistribution& d, const StatisticMap& phi) {
    validate_distribution(d);
    if (phi.values.size() != d.probs.size())
        throw DataError("statistic_marginal: statistic/outcome mismatch");
    std::map<double, double> mass;
    for (std::size_t i = 0; i < d.probs.size(); ++i) mass[phi.values[i]] += d.probs[i];
    DiscreteDistribution out;
    for (const auto& [v, m] : mass) {
        out.outcomes.push_back(fmt_double(v));
        out.probs.push_back(m);
    }
    return out;
}

double total_variation(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.outcomes != q.outcomes)
        throw DataError("total_variation: distributions over different outcomes");
    double s = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) s += std::fabs(p.probs[i] - q.probs[i]);
    return 0.5 * s;
}

Counterexample build_counterexample(const DiscreteDistribution& p, const StatisticMap& phi,
                                    double eps_mass) {
    validate_distribution(p);
    if (phi.values.size() != p.probs.size())
        throw DataError("build_counterexample: statistic/outcome mismatch");
    if (!(eps_mass > 0.0) || eps_mass >= 1.0)
        throw ConfigError("build_counterexample: eps_mass must lie in (0,1)");

    // fibers of phi, in first-appearance order
    std::map<double, std::vector<std::size_t>> fibers;
    for (std::size_t i = 0; i < phi.values.size(); ++i) fibers[phi.values[i]].push_back(i);

    Counterexample ce;
    ce.eps_mass = eps_mass;
    ce.q1 = p;
    ce.q2 = p;

    std::size_t touched = 0;
    for (const auto& [value, members] : fibers) {
        std::vector<std::size_t> positive;
        double fiber_mass = 0.0;
        for (std::size_t i : members) {
            fiber_mass += p.probs[i];
            if (p.probs[i] > 0.0) positive.push_back(i);
        }
        if (positive.size() < 2) continue;
        std::size_t a = positive[0];
        std::size_t b = positive[1];
        double move = eps_mass * fiber_mass;
        if (p.probs[a] < move || p.probs[b] < move)
            throw ConfigError("build_counterexample: eps_mass too large for fiber at statistic " +
                              fmt_double(value));
        ce.q1.probs[a] += move;
        ce.q1.probs[b] -= move;
        ce.q2.probs[a] -= move;
        ce.q2.probs[b] += move;
        ce.qualifying_mass += fiber_mass;
        ++touched;
    }
    if (touched == 0)
        throw ConfigError(
            "build_counterexample: statistic is injective on the support; no fiber has two "
            "positive-mass outcomes");

    ce.tv = total_variation(ce.q1, ce.q2);
    ce.expected_tv = 2.0 * eps_mass * ce.qualifying_mass;

    DiscreteDistribution m1 = statistic_marginal(ce.q1, phi);
    DiscreteDistribution m2 = statistic_marginal(ce.q2, phi);
    for (std::size_t i = 0; i < m1.probs.size(); ++i)
        ce.marginal_gap = std::max(ce.marginal_gap, std::fabs(m1.probs[i] - m2.probs[i]));
    return ce;
}

std::vector<PowerFprRow> power_vs_fpr(const DiscreteDistribution& null_dist,
                                      const DiscreteDistribution& alt_dist,
                                      const StatisticMap& phi,
                                      const std::vector<double>& thresholds) {
    validate_distribution(null_dist);
    validate_distribution(alt_dist);
    if (null_dist.outcomes != alt_dist.outcomes)
        throw DataError("power_vs_fpr: distributions over different outcomes");
    if (phi.values.size() != null_dist.probs.size())
        throw DataError("power_vs_fpr: statistic/outcome mismatch");
    std::vector<PowerFprRow> rows;
    for (double tau : thresholds) {
        PowerFprRow row;
        row.tau = tau;
        for (std::size_t i = 0; i < phi.values.size(); ++i) {
            if (phi.values[i] > tau) {
                row.fpr += null_dist.probs[i];
                row.power += alt_dist.probs[i];
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> default_thresholds(const StatisticMap& phi) {
    std::vector<double> vals(phi.values);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.empty()) throw DataError("default_thresholds: empty statistic");
    std::vector<double> taus;
    taus.push_back(vals.front() - 1.0);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) taus.push_back(0.5 * (vals[i] + vals[i + 1]));
    taus.push_back(vals.back() + 1.0);
    return taus;
}

double multi_statistic_separation(const DiscreteDistribution& q1, const DiscreteDistribution& q2,
                                  const StatisticMap& phi, const StatisticMap& psi) {
    validate_distribution(q1);
    validate_distribution(q2);
    if (q1.outcomes != q2.outcomes)
        throw DataError("multi_statistic_separation: distributions over different outcomes");
    if (phi.values.size() != q1.probs.size() || psi.values.size() != q1.probs.size())
        throw DataError("multi_statistic_separation: statistic/outcome mismatch");
    std::map<std::pair<double, double>, std::pair<double, double>> cells;
    for (std::size_t i = 0; i < q1.probs.size(); ++i) {
        auto& cell = cells[{phi.values[i], psi.values[i]}];
        cell.first += q1.probs[i];
        cell.second += q2.probs[i];
    }
    double s = 0.0;
    for (const auto& [key, cell] : cells) s += std::fabs(cell.first - cell.second);
    return 0.5 * s;
}

nlohmann::json counterexample_to_json(const Counterexample& ce) {
    return {{"q1", {{"outcomes", ce.q1.outcomes}, {"probs", ce.q1.probs}}},
            {"q2", {{"outcomes", ce.q2.outcomes}, {"probs", ce.q2.probs}}},
            {"eps_mass", ce.eps_mass},
            {"qualifying_mass", ce.qualifying_mass},
            {"tv", ce.tv},
            {"expected_tv", ce.expected_tv},
            {"marginal_gap", ce.marginal_gap}};
}

} // namespace disc
