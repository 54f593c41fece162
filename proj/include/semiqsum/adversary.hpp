#pragma once

// Attacks: outside taps on a quantum channel, and dishonest-participant
// strategies. All of them plug into run_session through an Adversary.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semiqsum/roles.hpp"

namespace semiqsum {

enum class AttackKind {
    MeasureResend,
    InterceptResend,
    DoubleCnot,
    AliceAttackI,
    AliceAttackIISilent,
    AliceAttackIIRandomized,
    BobProbe,
};

inline constexpr std::array<AttackKind, 7> kAllAttacks{
    AttackKind::MeasureResend,       AttackKind::InterceptResend,         AttackKind::DoubleCnot,
    AttackKind::AliceAttackI,        AttackKind::AliceAttackIISilent,     AttackKind::AliceAttackIIRandomized,
    AttackKind::BobProbe,
};

/// Stable CLI token.
constexpr std::string_view to_token(AttackKind k) noexcept {
    switch (k) {
        case AttackKind::MeasureResend: return "measure-resend";
        case AttackKind::InterceptResend: return "intercept-resend";
        case AttackKind::DoubleCnot: return "double-cnot";
        case AttackKind::AliceAttackI: return "alice-i";
        case AttackKind::AliceAttackIISilent: return "alice-ii-silent";
        case AttackKind::AliceAttackIIRandomized: return "alice-ii-random";
        case AttackKind::BobProbe: return "bob-probe";
    }
    return "?";
}

/// Enumerator name, used in serialized reports.
constexpr std::string_view to_string(AttackKind k) noexcept {
    switch (k) {
        case AttackKind::MeasureResend: return "MEASURE_RESEND";
        case AttackKind::InterceptResend: return "INTERCEPT_RESEND";
        case AttackKind::DoubleCnot: return "DOUBLE_CNOT";
        case AttackKind::AliceAttackI: return "ALICE_ATTACK_I";
        case AttackKind::AliceAttackIISilent: return "ALICE_ATTACK_II_SILENT";
        case AttackKind::AliceAttackIIRandomized: return "ALICE_ATTACK_II_RANDOMIZED";
        case AttackKind::BobProbe: return "BOB_PROBE";
    }
    return "?";
}

inline std::optional<AttackKind> parse_attack_kind(std::string_view token) {
    for (auto k : kAllAttacks)
        if (token == to_token(k) || token == to_string(k)) return k;
    return std::nullopt;
}

constexpr bool is_channel_tap(AttackKind k) noexcept {
    return k == AttackKind::MeasureResend || k == AttackKind::InterceptResend || k == AttackKind::DoubleCnot;
}

constexpr bool is_alice_attack(AttackKind k) noexcept {
    return k == AttackKind::AliceAttackI || k == AttackKind::AliceAttackIISilent ||
           k == AttackKind::AliceAttackIIRandomized;
}

// ---------------------------------------------------------------------------
// Outside taps

/// Measures every forward particle in the computational basis and forwards
/// the collapsed state.
class MeasureResendTap final : public ChannelTap {
public:
    explicit MeasureResendTap(std::uint64_t seed) : rng_(seed) {}
    std::string_view name() const override { return "measure-resend"; }

    Particle on_forward(Subsequence, Particle p) override {
        p.state = measure(p.state, Basis::Computational, rng_).collapsed;
        return p;
    }
    Particle on_return(Subsequence, Particle p) override { return p; }

private:
    RandomStream rng_;
};

/// Keeps the genuine particle, sends a uniformly random computational-basis
/// fake to the party, and returns the genuine particle to Alice.
class InterceptResendTap final : public ChannelTap {
public:
    explicit InterceptResendTap(std::uint64_t seed) : rng_(seed) {}
    std::string_view name() const override { return "intercept-resend"; }

    Particle on_forward(Subsequence leg, Particle p) override {
        Particle fake{p.subseq, p.index, prepare(Basis::Computational, rng_.bit()), p.history};
        held_.insert_or_assign({leg, p.index}, std::move(p));
        return fake;
    }

    Particle on_return(Subsequence leg, Particle returned) override {
        const auto it = held_.find({leg, returned.index});
        if (it == held_.end()) throw ProtocolError("intercept-resend: no stored particle for this position");
        Particle genuine = std::move(it->second);
        held_.erase(it);
        genuine.history = std::move(returned.history);
        return genuine;
    }

private:
    RandomStream rng_;
    std::map<std::pair<Subsequence, std::uint64_t>, Particle> held_;
};

/// CNOT from the particle onto a fresh |0> ancilla on the way out, and again on
/// the way back; the ancilla is then detached and kept.
class DoubleCnotTap final : public ChannelTap {
public:
    struct AncillaRecord {
        Subsequence leg;
        std::uint64_t index;
        StateVector ancilla;
    };

    std::string_view name() const override { return "double-cnot"; }

    Particle on_forward(Subsequence, Particle p) override {
        p.state = cnot(tensor(p.state, states::zero()));
        return p;
    }

    Particle on_return(Subsequence leg, Particle p) override {
        const auto parts = split_product(cnot(p.state));
        if (!parts) throw ProtocolError("double-cnot: ancilla did not disentangle");
        p.state = parts->first;
        ancillas_.push_back({leg, p.index, parts->second});
        return p;
    }

    const std::vector<AncillaRecord>& ancillas() const noexcept { return ancillas_; }

private:
    std::vector<AncillaRecord> ancillas_;
};

// ---------------------------------------------------------------------------
// Dishonest Alice

/// Attack I: prepares every particle in a random computational-basis state and
/// otherwise behaves honestly. Her own eavesdropping check compares against
/// what she actually prepared, so it stays clean.
class AliceAttackI final : public AliceStrategy {
public:
    std::string_view name() const override { return "alice-i"; }
    PreparedState prepare(Subsequence, std::uint64_t, RandomStream& rng) override {
        return {Basis::Computational, rng.bit()};
    }
};

/// Attack II: measures each group in the computational basis and announces a
/// fake Bell result consistent with the bits (phi+ for equal, psi+ for
/// unequal). The randomized variant replaces the fake with SUMMATION half the
/// time.
class AliceAttackII final : public AliceStrategy {
public:
    enum class Variant { Silent, Randomized };

    explicit AliceAttackII(Variant v) : variant_(v) {}
    std::string_view name() const override {
        return variant_ == Variant::Silent ? "alice-ii-silent" : "alice-ii-random";
    }

    AliceDeclaration measure_group(const ParticleGroup& g, RandomStream& rng) override {
        const auto zb = measure(g.bob_particle.state, Basis::Computational, rng).outcome;
        const auto zc = measure(g.charlie_particle.state, Basis::Computational, rng).outcome;
        const bool equal = zb == zc;
        AliceDeclaration d;
        d.measured_in = Basis::Computational;
        d.outcome_label = std::to_string(zb) + std::to_string(zc);
        d.announcement = equal ? Announcement::PhiPlus : Announcement::PsiPlus;
        if (variant_ == Variant::Randomized && rng.bit()) {
            d.announcement = Announcement::Summation;
            // The bits she saw fix the parity a real phi-/psi- would have given.
            d.retained = equal ? BellOutcome::PhiMinus : BellOutcome::PsiMinus;
        }
        return d;
    }

private:
    Variant variant_;
};

// ---------------------------------------------------------------------------
// Dishonest Bob

/// Measures Charlie's forward particle in the computational basis at every
/// position where Bob himself took SIFT.
class BobProbe final : public BobStrategy {
public:
    explicit BobProbe(std::uint64_t seed) : rng_(seed) {}
    std::string_view name() const override { return "bob-probe"; }

    Particle on_charlie_forward(Particle p, Action own_action) override {
        if (own_action != Action::Sift) return p;
        auto m = measure(p.state, Basis::Computational, rng_);
        p.state = m.collapsed;
        observed_[p.index] = static_cast<std::uint8_t>(m.outcome);
        return p;
    }

    const std::map<std::uint64_t, std::uint8_t>& observed() const noexcept { return observed_; }

private:
    RandomStream rng_;
    std::map<std::uint64_t, std::uint8_t> observed_;
};

// ---------------------------------------------------------------------------

/// Which legs an outside tap sits on.
enum class TapTarget { B, C, Both };

inline Adversary make_adversary(AttackKind kind, std::uint64_t seed, TapTarget target = TapTarget::B) {
    Adversary adv;
    auto install = [&](auto make) {
        if (target != TapTarget::C) adv.tap_b = make(mix64(seed ^ 0xb));
        if (target != TapTarget::B) adv.tap_c = make(mix64(seed ^ 0xc));
    };
    switch (kind) {
        case AttackKind::MeasureResend:
            install([](std::uint64_t s) { return std::make_unique<MeasureResendTap>(s); });
            break;
        case AttackKind::InterceptResend:
            install([](std::uint64_t s) { return std::make_unique<InterceptResendTap>(s); });
            break;
        case AttackKind::DoubleCnot:
            install([](std::uint64_t) { return std::make_unique<DoubleCnotTap>(); });
            break;
        case AttackKind::AliceAttackI:
            adv.alice = std::make_unique<AliceAttackI>();
            break;
        case AttackKind::AliceAttackIISilent:
            adv.alice = std::make_unique<AliceAttackII>(AliceAttackII::Variant::Silent);
            break;
        case AttackKind::AliceAttackIIRandomized:
            adv.alice = std::make_unique<AliceAttackII>(AliceAttackII::Variant::Randomized);
            break;
        case AttackKind::BobProbe:
            adv.bob = std::make_unique<BobProbe>(seed);
            break;
    }
    return adv;
}

}  // namespace semiqsum
