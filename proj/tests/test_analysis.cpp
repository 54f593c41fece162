#include <gtest/gtest.h>

#include "reference.hpp"
#include "semiqsum/semiqsum.hpp"

using namespace semiqsum;

namespace {

SessionConfig config(std::uint64_t n = 8, std::uint64_t lambda = 2, std::uint64_t epsilon = 2, double gamma = 8) {
    SessionConfig c;
    c.n = n;
    c.lambda = lambda;
    c.epsilon = epsilon;
    c.gamma = gamma;
    return c;
}

double reference_probability(AttackKind k) {
    switch (k) {
        case AttackKind::MeasureResend: return ref::measure_resend();
        case AttackKind::InterceptResend: return ref::intercept_resend();
        case AttackKind::DoubleCnot: return ref::double_cnot().detection;
        case AttackKind::AliceAttackI: return ref::alice_attack_one();
        case AttackKind::AliceAttackIISilent: return ref::alice_attack_two(false);
        case AttackKind::AliceAttackIIRandomized: return ref::alice_attack_two(true);
        case AttackKind::BobProbe: return ref::bob_probe();
    }
    return -1;
}

}  // namespace

TEST(Oracle, ExactPerEventValues) {
    const std::map<AttackKind, std::string> want{
        {AttackKind::MeasureResend, "1/4"},       {AttackKind::InterceptResend, "1/4"},
        {AttackKind::DoubleCnot, "0/1"},          {AttackKind::AliceAttackI, "1/8"},
        {AttackKind::AliceAttackIISilent, "0/1"}, {AttackKind::AliceAttackIIRandomized, "1/8"},
        {AttackKind::BobProbe, "1/8"},
    };
    for (auto k : kAllAttacks) EXPECT_EQ(enumerate_event_probability(k, primary_event(k)).str(), want.at(k)) << to_token(k);
}

TEST(Oracle, MatchesIndependentReference) {
    for (auto k : kAllAttacks) {
        const auto exact = enumerate_event_probability(k, primary_event(k));
        EXPECT_NEAR(exact.value(), reference_probability(k), 1e-12) << to_token(k);
    }
}

TEST(Oracle, HonestChecksNeverErr) {
    EXPECT_EQ(enumerate_event_probability(std::nullopt, CheckEvent::Step3ChosenParticle), Rational(0));
    EXPECT_EQ(enumerate_event_probability(std::nullopt, CheckEvent::Step4ChosenGroup), Rational(0));
}

TEST(Oracle, ResultsAreDyadicProbabilities) {
    for (auto k : kAllAttacks) {
        const auto p = enumerate_event_probability(k, primary_event(k));
        EXPECT_TRUE(p.is_dyadic());
        EXPECT_TRUE(p.is_probability());
    }
}

TEST(Oracle, RejectsMismatchedEvent) {
    EXPECT_THROW(enumerate_event_probability(AttackKind::MeasureResend, CheckEvent::Step4ChosenGroup),
                 std::invalid_argument);
    EXPECT_THROW(enumerate_event_probability(AttackKind::AliceAttackI, CheckEvent::Step3ChosenParticle),
                 std::invalid_argument);
}

TEST(Oracle, HonestSummationRates) {
    const auto r = honest_summation_rate();
    const auto want = ref::honest_rates();
    EXPECT_EQ(r.marginal, Rational(3, 8));
    EXPECT_EQ(r.both_sift, Rational(1, 8));
    EXPECT_EQ(r.both_ctrl, Rational(0));
    EXPECT_NEAR(r.marginal.value(), want.marginal, 1e-12);
    EXPECT_NEAR(r.both_sift.value(), want.both_sift, 1e-12);
    EXPECT_NEAR(r.both_ctrl.value(), want.both_ctrl, 1e-12);
}

TEST(Oracle, DoubleCnotAncillaAlwaysZero) {
    for (const auto& b : double_cnot_ancilla_branches()) EXPECT_TRUE(b.ancilla.same_ray(states::zero()));
    EXPECT_EQ(double_cnot_ancilla_tvd(), Rational(0));
    EXPECT_NEAR(ref::double_cnot().ancilla_one, 0.0, 1e-12);
}

TEST(Oracle, WholeRunClosedForm) {
    EXPECT_NEAR(whole_run_detection(Rational(1, 4), 8), 0.8999, 5e-5);
    EXPECT_NEAR(whole_run_detection(Rational(1, 4), 16), ref::whole_run(0.25, 16), 1e-12);
    EXPECT_NEAR(whole_run_detection(Rational(1, 8), 16), ref::whole_run(0.125, 16), 1e-12);
    EXPECT_EQ(whole_run_detection(Rational(1, 8), 0), 0.0);
    EXPECT_EQ(whole_run_detection(Rational(0), 100), 0.0);
    EXPECT_EQ(whole_run_detection_exact(Rational(1, 4), 2), Rational(7, 16));
}

TEST(Efficiency, FormulaAndIdentity) {
    const auto e = qubit_efficiency(config());
    EXPECT_EQ(e.eta, Rational(1, 63));
    EXPECT_EQ(Rational(e.v, e.q + e.f), e.eta);
    EXPECT_EQ(baseline_efficiency({}), Rational(1, 147));
    const auto small = qubit_efficiency(config(1, 2, 2, 2));
    EXPECT_EQ(small.eta, Rational(1, 45));
    EXPECT_TRUE(efficiency_dominates(config(1, 2, 2, 2), {}));
}

TEST(Efficiency, GridAgainstDirectFormula) {
    for (std::uint64_t n : {1, 3, 8})
        for (std::uint64_t l = 1; l <= 4; ++l)
            for (std::uint64_t e = 1; e <= 4; ++e)
                for (std::uint64_t g : {1, 8, 16, 40}) {
                    const auto eff = qubit_efficiency(config(n, l, e, static_cast<double>(g)));
                    EXPECT_EQ(eff.eta, Rational(1, 3 * (8 + l + e + g) + 3));
                    EXPECT_EQ(eff.q / n, 3 * (8 + l + e + g));
                    EXPECT_EQ(Rational(eff.v, eff.q + eff.f), eff.eta);
                }
}

TEST(Efficiency, DominancePredicateMatchesComparison) {
    RandomStream rng(99);
    for (int t = 0; t < 100; ++t) {
        const auto l = 1 + rng.below(60), e = 1 + rng.below(60), g = 1 + rng.below(80);
        const BaselineParams b{rng.below(30), rng.below(30), rng.below(30)};
        const auto c = config(1 + rng.below(5), l, e, static_cast<double>(g));
        EXPECT_EQ(efficiency_dominates(c, b), qubit_efficiency(c).eta > baseline_efficiency(b));
    }
}

TEST(Wilson, ContainsEstimate) {
    for (std::uint64_t s : {0u, 1u, 50u, 99u, 100u}) {
        const auto w = wilson_interval(s, 100);
        const double p = s / 100.0;
        EXPECT_LE(w.low, p);
        EXPECT_GE(w.high, p);
        EXPECT_GE(w.low, 0.0);
        EXPECT_LE(w.high, 1.0);
    }
}

TEST(Agreement, ExactEndpointsNeedExactEstimates) {
    DetectionStats s;
    s.mc_trials = 100;
    s.expected = 0;
    s.mc_estimate = 0.01;
    EXPECT_FALSE(s.agrees());
    s.mc_estimate = 0;
    EXPECT_TRUE(s.agrees());
    s.expected = 0.25;
    s.mc_estimate = 0.25 + 4.1 * std::sqrt(0.25 * 0.75 / 100);
    EXPECT_FALSE(s.agrees());
}

TEST(MonteCarlo, EveryAttackAgreesWithOracle) {
    for (auto k : kAllAttacks) {
        const auto r = monte_carlo_detection(k, config(), 600, 17);
        EXPECT_TRUE(r.per_event.agrees()) << to_token(k) << " " << r.per_event.mc_estimate;
        EXPECT_TRUE(r.whole_run.agrees()) << to_token(k) << " " << r.whole_run.mc_estimate;
        EXPECT_LE(r.per_event.ci_low, r.per_event.mc_estimate);
        EXPECT_GE(r.per_event.ci_high, r.per_event.mc_estimate);
    }
}

TEST(MonteCarlo, WorkersDoNotChangeResults) {
    const auto a = monte_carlo_detection(AttackKind::BobProbe, config(), 300, 5, {TapTarget::B, 1});
    const auto b = monte_carlo_detection(AttackKind::BobProbe, config(), 300, 5, {TapTarget::B, 3});
    EXPECT_EQ(campaign_report(a).dump(), campaign_report(b).dump());
}

TEST(MonteCarlo, BothLegsDoubleTheExposure) {
    const auto r = monte_carlo_detection(AttackKind::MeasureResend, config(2, 2), 400, 3, {TapTarget::Both, 1});
    EXPECT_NEAR(r.whole_run.expected, ref::whole_run(0.25, 8), 1e-12);
    EXPECT_TRUE(r.agrees());
}

TEST(MonteCarlo, RejectsZeroTrials) {
    EXPECT_THROW(monte_carlo_detection(AttackKind::MeasureResend, config(), 0, 0), ConfigError);
}

TEST(Reports, OracleReportIsStable) {
    EXPECT_EQ(oracle_report().dump(), oracle_report().dump());
    EXPECT_EQ(oracle_report()["schema_version"], 1);
    const auto csv = oracle_csv();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}
