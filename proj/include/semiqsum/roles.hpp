#pragma once

// Extension points for dishonest behaviour. A session runs with honest roles
// unless an Adversary supplies replacements.

#include <memory>
#include <string>
#include <string_view>

#include "semiqsum/protocol.hpp"

namespace semiqsum {

/// Outside eavesdropper on one quantum channel. Taps see only the particle in
/// transit (position, subsequence, quantum state); no classical role data is
/// passed through this interface.
class ChannelTap {
public:
    virtual ~ChannelTap() = default;
    virtual std::string_view name() const = 0;
    /// Alice -> party.
    virtual Particle on_forward(Subsequence leg, Particle p) = 0;
    /// Party -> Alice.
    virtual Particle on_return(Subsequence leg, Particle p) = 0;
};

/// Alice's behaviour in the preparation and Bell-measurement steps.
class AliceStrategy {
public:
    virtual ~AliceStrategy() = default;
    virtual std::string_view name() const { return "honest"; }

    virtual PreparedState prepare(Subsequence /*leg*/, std::uint64_t /*index*/, RandomStream& /*rng*/) {
        return {Basis::Hadamard, 0};
    }

    virtual AliceDeclaration measure_group(const ParticleGroup& group, RandomStream& rng) {
        return bell_measure_group(group, rng);
    }
};

/// A dishonest Bob that intercepts Charlie's particles on the Alice -> Charlie
/// leg. Bob is the only role allowed to see his own action at that position.
class BobStrategy {
public:
    virtual ~BobStrategy() = default;
    virtual std::string_view name() const = 0;
    virtual Particle on_charlie_forward(Particle p, Action own_action) = 0;
};

struct Adversary {
    std::unique_ptr<ChannelTap> tap_b;
    std::unique_ptr<ChannelTap> tap_c;
    std::unique_ptr<AliceStrategy> alice;
    std::unique_ptr<BobStrategy> bob;

    bool honest() const noexcept { return !tap_b && !tap_c && !alice && !bob; }
    ChannelTap* tap(Subsequence leg) const noexcept { return leg == Subsequence::B ? tap_b.get() : tap_c.get(); }
};

}  // namespace semiqsum
