#include <set>

#include <gtest/gtest.h>

#include "semiqsum/random_stream.hpp"
#include "semiqsum/rational.hpp"
#include "semiqsum/transcript.hpp"

using namespace semiqsum;

TEST(RandomStream, SameSeedSameSequence) {
    RandomStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        differs = differs || x != c();
    }
    EXPECT_TRUE(differs);
}

TEST(RandomStream, DerivedStreamsAreDistinct) {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t label = 0; label < 64; ++label) seeds.insert(derive_seed(9, label));
    EXPECT_EQ(seeds.size(), 64u);
    EXPECT_EQ(RandomStream::derive(9, 3)(), RandomStream(derive_seed(9, 3))());
}

TEST(RandomStream, BelowIsInRangeAndRoughlyUniform) {
    RandomStream rng(1);
    std::array<int, 6> counts{};
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        const auto v = rng.below(6);
        ASSERT_LT(v, 6u);
        ++counts[v];
    }
    for (int c : counts) EXPECT_NEAR(c, draws / 6.0, 4 * std::sqrt(draws * (1.0 / 6) * (5.0 / 6)));
    EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(RandomStream, Uniform01AndBits) {
    RandomStream rng(2);
    int ones = 0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ones += rng.bit();
    }
    EXPECT_NEAR(ones / 20000.0, 0.5, 4 * std::sqrt(0.25 / 20000));
}

TEST(RandomStream, SampleWithoutReplacement) {
    RandomStream rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto s = rng.sample_without_replacement(10, 30);
        ASSERT_EQ(s.size(), 10u);
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
        EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 10u);
        EXPECT_LT(s.back(), 30u);
    }
    EXPECT_THROW(rng.sample_without_replacement(4, 3), std::invalid_argument);
    EXPECT_EQ(rng.sample_without_replacement(3, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Rational, ReducesAndPrints) {
    EXPECT_EQ(Rational(2, 8).str(), "1/4");
    EXPECT_EQ(Rational(0, 7).str(), "0/1");
    EXPECT_EQ(Rational(2, 294), Rational(1, 147));
    EXPECT_EQ(Rational::parse("6/8"), Rational(3, 4));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 4) + Rational(1, 8), Rational(3, 8));
    EXPECT_EQ(Rational(1, 2) * Rational(1, 2) * Rational(1, 2), Rational(1, 8));
    EXPECT_EQ(Rational(1) - Rational(1, 4), Rational(3, 4));
    EXPECT_THROW(Rational(1, 4) - Rational(1, 2), std::domain_error);
    EXPECT_LT(Rational(1, 147), Rational(1, 45));
    EXPECT_TRUE(Rational(3, 8).is_dyadic());
    EXPECT_FALSE(Rational(1, 63).is_dyadic());
}

TEST(Rational, CheckedPow) {
    EXPECT_EQ(checked_pow(Rational(3, 4), 2), Rational(9, 16));
    EXPECT_EQ(checked_pow(Rational(1, 2), 0), Rational(1));
    EXPECT_EQ(checked_pow(Rational(3, 4), 16)->str(), "43046721/4294967296");
    EXPECT_FALSE(checked_pow(Rational(3, 4), 200));
}

TEST(Transcript, DisabledRecordsNothing) {
    Transcript t(false);
    EXPECT_FALSE(t.record(1, Role::Alice, EventType::Prepared));
    EXPECT_EQ(t.size(), 0u);
}

TEST(Transcript, JsonLineShape) {
    Transcript t;
    EventPayload p;
    p.subseq = Subsequence::C;
    p.index = 4;
    p.fields = {{"basis", "X"}};
    p.state = StateVector{kInvSqrt2, -kInvSqrt2};
    EXPECT_EQ(t.record(1, Role::Alice, EventType::Prepared, p), 0u);
    EXPECT_EQ(t.record(2, Role::Charlie, EventType::ActionTaken), 1u);
    const auto j = Transcript::to_json(t.events()[0]);
    EXPECT_EQ(j["seq_no"], 0);
    EXPECT_EQ(j["role"], "alice");
    EXPECT_EQ(j["event_type"], "prepared");
    EXPECT_EQ(j["payload"]["subseq"], "C");
    EXPECT_EQ(j["payload"]["index"], 4);
    EXPECT_EQ(j["payload"]["basis"], "X");
    EXPECT_EQ(j["payload"]["amps"].size(), 2u);
    const auto lines = t.to_jsonl();
    EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}
