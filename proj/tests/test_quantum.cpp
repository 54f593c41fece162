#include <gtest/gtest.h>

#include "reference.hpp"
#include "semiqsum/quantum.hpp"

using namespace semiqsum;

namespace {

StateVector from_ref(const ref::Q1& q) { return StateVector(std::array<Amplitude, 2>{q[0], q[1]}); }

StateVector random_state(RandomStream& rng, std::size_t dim) {
    std::array<Amplitude, 4> a{};
    double norm = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        a[k] = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
        norm += std::norm(a[k]);
    }
    for (auto& x : a) x /= std::sqrt(norm);
    if (dim == 2) return StateVector(std::array<Amplitude, 2>{a[0], a[1]});
    return StateVector(a);
}

}  // namespace

TEST(StateVector, RejectsBadDimensionAndNorm) {
    EXPECT_THROW((StateVector{1.0, 0.0, 0.0}), QuantumError);
    EXPECT_THROW((StateVector{1.0, 1.0}), QuantumError);
    EXPECT_NO_THROW((StateVector{0.6, 0.8}));
}

TEST(Tensor, MatchesHandKronecker) {
    const ref::Q1 singles[] = {ref::ket(0), ref::ket(1), ref::plus(), ref::minus()};
    for (const auto& a : singles)
        for (const auto& b : singles) {
            const auto got = tensor(from_ref(a), from_ref(b));
            const auto want = ref::kron(a, b);
            for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-12);
        }
    const auto pp = tensor(states::plus(), states::plus());
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(pp[k].real(), 0.5, 1e-12);
    EXPECT_TRUE(tensor(states::zero(), states::one()).approx_equal(StateVector{0.0, 1.0, 0.0, 0.0}));
    EXPECT_THROW(tensor(tensor(states::zero(), states::zero()), states::zero()), QuantumError);
}

TEST(Bell, DecompositionTable) {
    struct Row {
        StateVector a, b;
        std::array<double, 4> p;
    };
    const Row rows[] = {
        {states::zero(), states::zero(), {0.5, 0.5, 0, 0}},
        {states::zero(), states::one(), {0, 0, 0.5, 0.5}},
        {states::one(), states::zero(), {0, 0, 0.5, 0.5}},
        {states::one(), states::one(), {0.5, 0.5, 0, 0}},
        {states::plus(), states::plus(), {0.5, 0, 0.5, 0}},
        {states::zero(), states::plus(), {0.25, 0.25, 0.25, 0.25}},
    };
    for (const auto& r : rows) {
        const auto d = probabilities(tensor(r.a, r.b), Basis::Bell);
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(d.p[k], r.p[k], 1e-12);
    }
}

TEST(Bell, LibraryVectorsMatchReference) {
    for (int k = 0; k < 4; ++k) {
        const auto got = bell_state(static_cast<BellOutcome>(k));
        const auto want = ref::bell(k);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-12);
    }
}

TEST(Bell, RandomProductsMatchReferenceInnerProducts) {
    RandomStream rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto a = random_state(rng, 2), b = random_state(rng, 2);
        const ref::Q1 ra{a[0], a[1]}, rb{b[0], b[1]};
        const auto d = probabilities(tensor(a, b), Basis::Bell);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(d.p[k], ref::born(ref::bell(k), ref::kron(ra, rb)), 1e-12);
    }
}

TEST(Cnot, BasisMapAndPhiPlus) {
    EXPECT_TRUE(cnot(StateVector{0.0, 0.0, 1.0, 0.0}).approx_equal(StateVector{0.0, 0.0, 0.0, 1.0}));
    EXPECT_TRUE(cnot(StateVector{1.0, 0.0, 0.0, 0.0}).approx_equal(StateVector{1.0, 0.0, 0.0, 0.0}));
    EXPECT_TRUE(cnot(tensor(states::plus(), states::zero())).approx_equal(bell_state(BellOutcome::PhiPlus)));
    EXPECT_THROW(cnot(states::zero()), QuantumError);
}

TEST(Cnot, InvolutionAndNormOnRandomStates) {
    RandomStream rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto s = random_state(rng, 4);
        EXPECT_TRUE(cnot(cnot(s)).approx_equal(s));
        EXPECT_NEAR(cnot(s).norm_squared(), 1.0, 1e-12);
    }
}

TEST(Measure, BornCompletenessAndDimensionChecks) {
    RandomStream rng(7);
    for (int t = 0; t < 100; ++t) {
        const auto s1 = random_state(rng, 2);
        EXPECT_NEAR(probabilities(s1, Basis::Computational).total(), 1.0, 1e-12);
        EXPECT_NEAR(probabilities(s1, Basis::Hadamard).total(), 1.0, 1e-12);
        EXPECT_NEAR(probabilities(random_state(rng, 4), Basis::Bell).total(), 1.0, 1e-12);
    }
    EXPECT_THROW(probabilities(states::zero(), Basis::Bell), QuantumError);
    EXPECT_THROW(probabilities(tensor(states::zero(), states::zero()), Basis::Computational), QuantumError);
}

TEST(Measure, Idempotent) {
    RandomStream rng(3);
    for (int t = 0; t < 200; ++t) {
        for (auto basis : {Basis::Computational, Basis::Hadamard}) {
            const auto first = measure(random_state(rng, 2), basis, rng);
            const auto again = measure(first.collapsed, basis, rng);
            EXPECT_EQ(first.outcome, again.outcome);
            EXPECT_NEAR(first.collapsed.norm_squared(), 1.0, 1e-12);
        }
        const auto first = measure(random_state(rng, 4), Basis::Bell, rng);
        EXPECT_EQ(measure(first.collapsed, Basis::Bell, rng).outcome, first.outcome);
    }
}

TEST(Measure, PlusPlusNeverGivesMinusBellStates) {
    RandomStream rng(19);
    const auto pp = tensor(states::plus(), states::plus());
    int phi = 0;
    for (int t = 0; t < 4000; ++t) {
        const auto o = static_cast<BellOutcome>(measure(pp, Basis::Bell, rng).outcome);
        ASSERT_TRUE(o == BellOutcome::PhiPlus || o == BellOutcome::PsiPlus);
        phi += o == BellOutcome::PhiPlus;
    }
    EXPECT_NEAR(phi / 4000.0, 0.5, 4 * std::sqrt(0.25 / 4000));
}

TEST(Measure, ZeroIsDeterministic) {
    RandomStream rng(1);
    for (int t = 0; t < 100; ++t) EXPECT_EQ(measure(states::zero(), Basis::Computational, rng).outcome, 0u);
}

TEST(Qubit, CollapseAndSplit) {
    const auto phi = bell_state(BellOutcome::PhiPlus);
    const auto c = collapse_qubit(phi, 0, 1);
    EXPECT_TRUE(c.approx_equal(StateVector{0.0, 0.0, 0.0, 1.0}));
    const auto parts = split_product(tensor(states::minus(), states::one()));
    ASSERT_TRUE(parts);
    EXPECT_TRUE(parts->first.same_ray(states::minus()));
    EXPECT_TRUE(parts->second.same_ray(states::one()));
    EXPECT_FALSE(split_product(phi));
    EXPECT_THROW(collapse_qubit(tensor(states::zero(), states::zero()), 0, 1), QuantumError);
}

TEST(Prepare, RejectsBellAndBadIndex) {
    EXPECT_THROW(prepare(Basis::Bell, 0), QuantumError);
    EXPECT_THROW(prepare(Basis::Hadamard, 2), QuantumError);
    EXPECT_TRUE(prepare(Basis::Hadamard, 1).approx_equal(states::minus()));
}
