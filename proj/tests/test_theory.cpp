#include <doctest.h>

#include <vector>

#include "disc/errors.hpp"
#include "disc/io.hpp"
#include "disc/theory.hpp"

using namespace disc;

namespace {

DiscreteDistribution uniform4() {
    DiscreteDistribution p;
    p.outcomes = {"a1", "a2", "b1", "b2"};
    p.probs = {0.25, 0.25, 0.25, 0.25};
    return p;
}

} // namespace

TEST_CASE("distribution validation") {
    DiscreteDistribution p = uniform4();
    validate_distribution(p);
    p.probs[0] = -0.1;
    CHECK_THROWS_AS(validate_distribution(p), DataError);
    p = uniform4();
    p.probs[0] = 0.5;
    CHECK_THROWS_AS(validate_distribution(p), DataError);
    p = uniform4();
    p.probs.pop_back();
    CHECK_THROWS_AS(validate_distribution(p), DataError);
}

TEST_CASE("statistic marginal groups by value in ascending order") {
    DiscreteDistribution p;
    p.outcomes = {"w", "x", "y", "z"};
    p.probs = {0.1, 0.2, 0.3, 0.4};
    StatisticMap phi{{1.0, 0.0, 0.0, 1.0}};
    DiscreteDistribution m = statistic_marginal(p, phi);
    REQUIRE(m.probs.size() == 2);
    CHECK(m.outcomes[0] == fmt_double(0.0));
    CHECK(m.outcomes[1] == fmt_double(1.0));
    CHECK(m.probs[0] == 0.5);
    CHECK(m.probs[1] == 0.5);
}

TEST_CASE("total variation basics") {
    DiscreteDistribution p = uniform4();
    CHECK(total_variation(p, p) == 0.0);
    DiscreteDistribution q = uniform4();
    q.probs = {0.5, 0.0, 0.25, 0.25};
    CHECK(total_variation(p, q) == 0.25);
    DiscreteDistribution r;
    r.outcomes = {"a1"};
    r.probs = {1.0};
    CHECK_THROWS_AS(total_variation(p, r), DataError);
}

TEST_CASE("counterexample on the uniform four-outcome instance is exact") {
    DiscreteDistribution p = uniform4();
    StatisticMap phi{{0.0, 0.0, 1.0, 1.0}};
    Counterexample ce = build_counterexample(p, phi, 0.125);

    // every fiber has two positive outcomes, so all mass qualifies and the
    // conditional move is 0.125 * 0.5 = 0.0625 per fiber; all values dyadic
    CHECK(ce.qualifying_mass == 1.0);
    CHECK(ce.q1.probs == std::vector<double>{0.3125, 0.1875, 0.3125, 0.1875});
    CHECK(ce.q2.probs == std::vector<double>{0.1875, 0.3125, 0.1875, 0.3125});
    CHECK(ce.tv == 0.25);
    CHECK(ce.expected_tv == 0.25);
    CHECK(ce.tv == ce.expected_tv);
    CHECK(ce.marginal_gap == 0.0);

    // both directions remain valid distributions
    validate_distribution(ce.q1);
    validate_distribution(ce.q2);
}

TEST_CASE("scalar threshold tests have power equal to false positive rate") {
    DiscreteDistribution p = uniform4();
    StatisticMap phi{{0.0, 0.0, 1.0, 1.0}};
    Counterexample ce = build_counterexample(p, phi, 0.125);
    std::vector<double> taus = default_thresholds(phi);
    REQUIRE(taus.size() == 3); // below, between, above
    auto rows = power_vs_fpr(ce.q1, ce.q2, phi, taus);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row.power == row.fpr);
    CHECK(rows[0].fpr == 1.0);
    CHECK(rows[1].fpr == 0.5);
    CHECK(rows[2].fpr == 0.0);
}

TEST_CASE("a second statistic separates what the first cannot") {
    DiscreteDistribution p = uniform4();
    StatisticMap phi{{0.0, 0.0, 1.0, 1.0}};
    StatisticMap psi{{1.0, 0.0, 1.0, 0.0}};
    Counterexample ce = build_counterexample(p, phi, 0.125);
    // the (phi, psi) pushforward is injective here, so the joint recovers
    // the full total variation that the phi-marginal hides
    CHECK(multi_statistic_separation(ce.q1, ce.q2, phi, psi) == 0.25);
    CHECK(ce.marginal_gap == 0.0);
}

TEST_CASE("fibers with fewer than two positive outcomes do not move") {
    DiscreteDistribution p;
    p.outcomes = {"lone", "x", "y"};
    p.probs = {0.5, 0.25, 0.25};
    StatisticMap phi{{0.0, 1.0, 1.0}};
    Counterexample ce = build_counterexample(p, phi, 0.125);
    CHECK(ce.qualifying_mass == 0.5);
    CHECK(ce.q1.probs == std::vector<double>{0.5, 0.3125, 0.1875});
    CHECK(ce.tv == 0.125);
    CHECK(ce.expected_tv == 0.125);
    CHECK(ce.marginal_gap == 0.0);

    // zero-mass outcomes are transparent
    DiscreteDistribution z;
    z.outcomes = {"u", "v", "dead"};
    z.probs = {0.5, 0.5, 0.0};
    StatisticMap flat{{0.0, 0.0, 0.0}};
    Counterexample cz = build_counterexample(z, flat, 0.125);
    CHECK(cz.q1.probs == std::vector<double>{0.625, 0.375, 0.0});
    CHECK(cz.qualifying_mass == 1.0);
}

TEST_CASE("counterexample rejects degenerate requests") {
    DiscreteDistribution p = uniform4();
    StatisticMap injective{{0.0, 1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(build_counterexample(p, injective, 0.125), ConfigError);

    StatisticMap phi{{0.0, 0.0, 1.0, 1.0}};
    CHECK_THROWS_AS(build_counterexample(p, phi, 0.0), ConfigError);
    CHECK_THROWS_AS(build_counterexample(p, phi, 1.0), ConfigError);
    CHECK_THROWS_AS(build_counterexample(p, phi, 0.6), ConfigError); // move would exceed fiber mass

    StatisticMap short_phi{{0.0, 0.0}};
    CHECK_THROWS_AS(build_counterexample(p, short_phi, 0.125), DataError);
}

TEST_CASE("counterexample json carries the full record") {
    DiscreteDistribution p = uniform4();
    StatisticMap phi{{0.0, 0.0, 1.0, 1.0}};
    Counterexample ce = build_counterexample(p, phi, 0.125);
    auto j = counterexample_to_json(ce);
    CHECK(j.at("q1").at("probs").size() == 4);
    CHECK(j.at("tv").get<double>() == 0.25);
    CHECK(j.at("expected_tv").get<double>() == 0.25);
    CHECK(j.at("marginal_gap").get<double>() == 0.0);
    CHECK(j.at("qualifying_mass").get<double>() == 1.0);
    CHECK(j.at("eps_mass").get<double>() == 0.125);
}
