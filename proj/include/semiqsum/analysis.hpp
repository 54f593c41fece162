#pragma once

// Detection-probability oracle, Monte Carlo campaigns, and qubit efficiency.
//
// The oracle walks the full branch tree of one check event (party actions x
// measurement outcomes) with exact weights. Born probabilities come from
// quantum_core as doubles and are snapped to multiples of 1/4, which is exact
// for every state the protocol can produce; anything else throws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "semiqsum/adversary.hpp"
#include "semiqsum/rational.hpp"
#include "semiqsum/session.hpp"

namespace semiqsum {

// ---------------------------------------------------------------------------
// Exact enumeration

enum class CheckEvent {
    /// One position chosen for the eavesdropping check (on the attacked subsequence).
    Step3ChosenParticle,
    /// One group chosen for the honesty check of Alice.
    Step4ChosenGroup,
};

constexpr std::string_view to_string(CheckEvent e) noexcept {
    return e == CheckEvent::Step3ChosenParticle ? "step3-chosen-particle" : "step4-chosen-group";
}

inline Rational snap_quarter(double p) {
    const double k = std::round(p * 4.0);
    if (std::abs(p * 4.0 - k) > 4e-9 || k < 0 || k > 4)
        throw std::logic_error("oracle: Born probability is not a multiple of 1/4");
    return {static_cast<std::uint64_t>(k), 4};
}

namespace oracle {

struct Branch {
    Rational weight;
    StateVector state;
};

struct SiftBranch {
    std::uint8_t bit;
    Rational weight;
    StateVector state;
};

struct Declared {
    Rational weight;
    Announcement announcement;
};

using ChannelMap = std::function<std::vector<Branch>(const StateVector&)>;
using AliceMap = std::function<std::vector<Declared>(const StateVector& bob, const StateVector& charlie)>;

inline const Rational kHalf{1, 2};

inline std::vector<Branch> identity(const StateVector& s) { return {{Rational{1}, s}}; }

/// Computational-basis branches of a single qubit.
inline std::vector<Branch> z_branches(const StateVector& s) {
    const auto d = probabilities(s, Basis::Computational);
    std::vector<Branch> out;
    for (std::size_t k = 0; k < 2; ++k)
        if (auto w = snap_quarter(d[k]); w.num() != 0) out.push_back({w, basis_vector(Basis::Computational, k)});
    return out;
}

/// A classical party's SIFT on a particle (q0 of a joint state if an ancilla is attached).
inline std::vector<SiftBranch> sift_branches(const StateVector& s) {
    std::vector<SiftBranch> out;
    if (s.dim() == 2) {
        const auto d = probabilities(s, Basis::Computational);
        for (std::size_t k = 0; k < 2; ++k)
            if (auto w = snap_quarter(d[k]); w.num() != 0)
                out.push_back({static_cast<std::uint8_t>(k), w, basis_vector(Basis::Computational, k)});
    } else {
        const auto d = qubit_probabilities(s, 0);
        for (std::size_t k = 0; k < 2; ++k)
            if (auto w = snap_quarter(d[k]); w.num() != 0)
                out.push_back({static_cast<std::uint8_t>(k), w, collapse_qubit(s, 0, static_cast<int>(k))});
    }
    return out;
}

/// Weight of outcomes other than `expected` when measuring `s` in `basis`.
inline Rational mismatch(const StateVector& s, Basis basis, std::size_t expected) {
    const auto d = probabilities(s, basis);
    Rational total;
    for (std::size_t k = 0; k < d.size; ++k)
        if (k != expected) total += snap_quarter(d[k]);
    return total;
}

/// Probability that one chosen check position shows an error, for a particle
/// prepared as `prep` that passes `forward`, a uniformly random CTRL/SIFT, and
/// `back` before Alice measures it.
inline Rational step3_error(const PreparedState& prep, const ChannelMap& forward, const ChannelMap& back) {
    Rational total;
    for (const auto& f : forward(prepare(prep.basis, prep.index))) {
        for (const auto& r : back(f.state))
            total += kHalf * f.weight * r.weight * mismatch(r.state, prep.basis, static_cast<std::size_t>(prep.index));
        for (const auto& b : sift_branches(f.state))
            for (const auto& r : back(b.state))
                total += kHalf * f.weight * b.weight * r.weight * mismatch(r.state, Basis::Computational, b.bit);
    }
    return total;
}

struct GroupBranch {
    Action bob_action, charlie_action;
    std::optional<std::uint8_t> bob_bit, charlie_bit;
    Announcement announcement;
};

using GroupPredicate = std::function<bool(const GroupBranch&)>;

struct PreparedPair {
    Rational weight;
    StateVector bob, charlie;
};

/// Total weight of group branches satisfying `pred`.
inline Rational group_probability(const std::vector<PreparedPair>& preps, const AliceMap& alice,
                                  const GroupPredicate& pred) {
    struct Side {
        Action action;
        std::optional<std::uint8_t> bit;
        Rational weight;
        StateVector state;
    };
    auto sides = [](const StateVector& s) {
        std::vector<Side> out{{Action::Ctrl, std::nullopt, kHalf, s}};
        for (const auto& b : sift_branches(s)) out.push_back({Action::Sift, b.bit, kHalf * b.weight, b.state});
        return out;
    };
    Rational total;
    for (const auto& p : preps)
        for (const auto& b : sides(p.bob))
            for (const auto& c : sides(p.charlie))
                for (const auto& a : alice(b.state, c.state))
                    if (pred({b.action, c.action, b.bit, c.bit, a.announcement}))
                        total += p.weight * b.weight * c.weight * a.weight;
    return total;
}

/// Written out from the protocol text rather than shared with the session code.
inline bool honesty_flags(const GroupBranch& g) {
    if (g.bob_action == Action::Ctrl && g.charlie_action == Action::Ctrl)
        return g.announcement == Announcement::Summation;
    if (g.bob_action == Action::Sift && g.charlie_action == Action::Sift) {
        const bool equal = *g.bob_bit == *g.charlie_bit;
        if (g.announcement == Announcement::PhiPlus) return !equal;
        if (g.announcement == Announcement::PsiPlus) return equal;
    }
    return false;
}

inline std::vector<Declared> honest_alice(const StateVector& b, const StateVector& c) {
    const auto d = probabilities(tensor(b, c), Basis::Bell);
    std::vector<Declared> out;
    for (std::size_t k = 0; k < 4; ++k)
        if (auto w = snap_quarter(d[k]); w.num() != 0) out.push_back({w, announce(static_cast<BellOutcome>(k))});
    return out;
}

inline AliceMap z_measuring_alice(bool randomized) {
    return [randomized](const StateVector& b, const StateVector& c) {
        std::vector<Declared> out;
        for (const auto& zb : z_branches(b))
            for (const auto& zc : z_branches(c)) {
                const bool equal = zb.state.approx_equal(zc.state);
                const Announcement fake = equal ? Announcement::PhiPlus : Announcement::PsiPlus;
                const Rational w = zb.weight * zc.weight;
                if (randomized) {
                    out.push_back({w * kHalf, fake});
                    out.push_back({w * kHalf, Announcement::Summation});
                } else {
                    out.push_back({w, fake});
                }
            }
        return out;
    };
}

inline std::vector<PreparedPair> honest_pair() { return {{Rational{1}, states::plus(), states::plus()}}; }

inline std::vector<PreparedPair> computational_pairs() {
    std::vector<PreparedPair> out;
    for (int zb = 0; zb < 2; ++zb)
        for (int zc = 0; zc < 2; ++zc)
            out.push_back({Rational{1, 4}, prepare(Basis::Computational, zb), prepare(Basis::Computational, zc)});
    return out;
}

inline std::vector<Branch> double_cnot_forward(const StateVector& s) {
    return {{Rational{1}, cnot(tensor(s, states::zero()))}};
}

inline std::vector<Branch> double_cnot_back(const StateVector& s) {
    const auto parts = split_product(cnot(s));
    if (!parts) throw std::logic_error("oracle: ancilla did not disentangle");
    return {{Rational{1}, parts->first}};
}

}  // namespace oracle

/// Exact per-event detection probability. `attack == nullopt` is the honest
/// protocol. Throws std::invalid_argument for combinations that have no check
/// event (for example an outside tap against the honesty check).
inline ExactProbability enumerate_event_probability(std::optional<AttackKind> attack, CheckEvent event) {
    using namespace oracle;
    const PreparedState plus{Basis::Hadamard, 0};
    if (event == CheckEvent::Step3ChosenParticle) {
        if (!attack) return step3_error(plus, identity, identity);
        switch (*attack) {
            case AttackKind::MeasureResend:
                return step3_error(plus, z_branches, identity);
            case AttackKind::InterceptResend: {
                // The party acts on a uniformly random fake; Alice always gets
                // the untouched |+> back.
                const std::vector<Branch> fakes{{kHalf, states::zero()}, {kHalf, states::one()}};
                Rational total;
                for (const auto& f : fakes) {
                    total += kHalf * f.weight * mismatch(states::plus(), Basis::Hadamard, 0);
                    for (const auto& b : sift_branches(f.state))
                        total += kHalf * f.weight * b.weight * mismatch(states::plus(), Basis::Computational, b.bit);
                }
                return total;
            }
            case AttackKind::DoubleCnot:
                return step3_error(plus, double_cnot_forward, double_cnot_back);
            case AttackKind::BobProbe: {
                // Bob's own action on the matching B particle decides whether he measures.
                const auto untouched = step3_error(plus, identity, identity);
                const auto probed = step3_error(plus, z_branches, identity);
                return kHalf * untouched + kHalf * probed;
            }
            default:
                break;
        }
    } else {
        if (!attack) return group_probability(honest_pair(), honest_alice, honesty_flags);
        switch (*attack) {
            case AttackKind::AliceAttackI:
                return group_probability(computational_pairs(), honest_alice, honesty_flags);
            case AttackKind::AliceAttackIISilent:
                return group_probability(honest_pair(), z_measuring_alice(false), honesty_flags);
            case AttackKind::AliceAttackIIRandomized:
                return group_probability(honest_pair(), z_measuring_alice(true), honesty_flags);
            default:
                break;
        }
    }
    throw std::invalid_argument("enumerate_event_probability: attack has no such check event");
}

/// The check event an attack is analysed against.
constexpr CheckEvent primary_event(AttackKind k) noexcept {
    return is_alice_attack(k) ? CheckEvent::Step4ChosenGroup : CheckEvent::Step3ChosenParticle;
}

struct AncillaBranch {
    Action action;
    Rational weight;
    StateVector ancilla;
};

/// Every branch of one particle under the double-CNOT tap, with Eve's final ancilla.
inline std::vector<AncillaBranch> double_cnot_ancilla_branches() {
    using namespace oracle;
    std::vector<AncillaBranch> out;
    const StateVector joint = double_cnot_forward(states::plus())[0].state;
    auto finish = [](const StateVector& s) {
        const auto parts = split_product(cnot(s));
        if (!parts) throw std::logic_error("oracle: ancilla did not disentangle");
        return parts->second;
    };
    out.push_back({Action::Ctrl, kHalf, finish(joint)});
    for (const auto& b : sift_branches(joint)) out.push_back({Action::Sift, kHalf * b.weight, finish(b.state)});
    return out;
}

/// Total variation distance between the ancilla's computational-basis
/// statistics conditioned on CTRL and on SIFT.
inline Rational double_cnot_ancilla_tvd() {
    std::array<Rational, 2> ctrl{}, sift{};
    Rational ctrl_mass, sift_mass;
    for (const auto& b : double_cnot_ancilla_branches()) {
        const auto d = probabilities(b.ancilla, Basis::Computational);
        auto& dist = b.action == Action::Ctrl ? ctrl : sift;
        (b.action == Action::Ctrl ? ctrl_mass : sift_mass) += b.weight;
        for (std::size_t k = 0; k < 2; ++k) dist[k] += b.weight * snap_quarter(d[k]);
    }
    Rational tvd;
    for (std::size_t k = 0; k < 2; ++k) {
        const Rational a = ctrl[k] * Rational(ctrl_mass.den(), ctrl_mass.num());
        const Rational b = sift[k] * Rational(sift_mass.den(), sift_mass.num());
        tvd += a > b ? a - b : b - a;
    }
    return tvd * oracle::kHalf;
}

struct SummationRates {
    ExactProbability marginal;   ///< P(SUMMATION)
    ExactProbability both_sift;  ///< P(both SIFT and SUMMATION)
    ExactProbability both_ctrl;  ///< P(both CTRL and SUMMATION)
};

inline SummationRates honest_summation_rate() {
    using namespace oracle;
    auto summation = [](const GroupBranch& g) { return g.announcement == Announcement::Summation; };
    auto with = [&](Action a) {
        return [=](const GroupBranch& g) {
            return g.bob_action == a && g.charlie_action == a && g.announcement == Announcement::Summation;
        };
    };
    return {group_probability(honest_pair(), honest_alice, summation),
            group_probability(honest_pair(), honest_alice, with(Action::Sift)),
            group_probability(honest_pair(), honest_alice, with(Action::Ctrl))};
}

/// 1 - (1 - p)^m.
inline double whole_run_detection(const ExactProbability& p_event, std::uint64_t m) {
    return 1.0 - std::pow(1.0 - p_event.value(), static_cast<double>(m));
}

inline std::optional<ExactProbability> whole_run_detection_exact(const ExactProbability& p_event, std::uint64_t m) {
    auto miss = checked_pow(Rational{1} - p_event, m);
    if (!miss) return std::nullopt;
    return Rational{1} - *miss;
}

// ---------------------------------------------------------------------------
// Monte Carlo

enum class Scope { PerEvent, WholeRun };

constexpr std::string_view to_string(Scope s) noexcept { return s == Scope::PerEvent ? "PER_EVENT" : "WHOLE_RUN"; }

struct DetectionStats {
    AttackKind attack = AttackKind::MeasureResend;
    Scope scope = Scope::PerEvent;
    std::optional<ExactProbability> exact;
    double expected = 0;
    double mc_estimate = 0;
    std::uint64_t mc_trials = 0;
    std::uint64_t detections = 0;
    double ci_low = 0, ci_high = 0;
    std::uint64_t seed = 0;

    /// |estimate - expected| < 4 sigma; exact equality when expected is 0 or 1.
    bool agrees() const {
        if (mc_trials == 0) return true;
        if (expected <= 0.0 || expected >= 1.0) return mc_estimate == expected;
        return std::abs(mc_estimate - expected) < 4.0 * std::sqrt(expected * (1 - expected) / static_cast<double>(mc_trials));
    }
};

struct WilsonInterval {
    double low, high;
};

/// 95% Wilson score interval.
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

struct CampaignResult {
    AttackKind attack = AttackKind::MeasureResend;
    SessionConfig config;
    std::uint64_t sessions = 0;
    std::uint64_t master_seed = 0;
    DetectionStats per_event;
    DetectionStats whole_run;
    std::map<SessionStatus, std::uint64_t> status_counts;

    bool agrees() const { return per_event.agrees() && whole_run.agrees(); }
};

struct CampaignOptions {
    TapTarget target = TapTarget::B;
    unsigned workers = 1;
};

/// Whether a session ended at the check the attack's closed form describes.
/// Other aborts (e.g. a tapped particle later upsetting the honesty check) are
/// real but outside that closed form; they still show up in status_counts.
constexpr bool detected_by_analysed_check(AttackKind attack, TapTarget target, SessionStatus s) noexcept {
    switch (attack) {
        case AttackKind::MeasureResend:
        case AttackKind::InterceptResend:
        case AttackKind::DoubleCnot:
            return (target != TapTarget::C && s == SessionStatus::AbortEveCheckB) ||
                   (target != TapTarget::B && s == SessionStatus::AbortEveCheckC);
        case AttackKind::BobProbe:
            return s == SessionStatus::AbortEveCheckC;
        case AttackKind::AliceAttackI:
        case AttackKind::AliceAttackIIRandomized:
            return s == SessionStatus::AbortHonestyCheck;
        case AttackKind::AliceAttackIISilent:
            return s == SessionStatus::AbortSummationRate;
    }
    return false;
}

namespace detail {

struct CampaignCounts {
    std::uint64_t events = 0, event_detections = 0, run_detections = 0;
    std::map<SessionStatus, std::uint64_t> statuses;

    void merge(const CampaignCounts& o) {
        events += o.events;
        event_detections += o.event_detections;
        run_detections += o.run_detections;
        for (const auto& [k, v] : o.statuses) statuses[k] += v;
    }
};

inline void count_session(AttackKind attack, TapTarget target, const SessionOutcome& out, CampaignCounts& c) {
    const auto& d = out.diagnostics;
    auto add_check = [&](const std::optional<CheckReport>& r) {
        if (!r) return;
        c.events += r->total();
        c.event_detections += r->errors();
    };
    if (is_channel_tap(attack)) {
        if (target != TapTarget::C) add_check(d.check_b);
        if (target != TapTarget::B) add_check(d.check_c);
    } else if (attack == AttackKind::BobProbe) {
        add_check(d.check_c);
    } else if (d.honesty) {
        c.events += d.honesty->chosen.size();
        c.event_detections += d.honesty->errors;
    }
    c.run_detections += detected_by_analysed_check(attack, target, out.status);
    ++c.statuses[out.status];
}

}  // namespace detail

/// Number of per-event checks a whole run exposes the attack to.
inline std::uint64_t whole_run_events(AttackKind attack, const SessionConfig& config, TapTarget target) {
    if (is_channel_tap(attack)) return config.eve_check_count() * (target == TapTarget::Both ? 2 : 1);
    if (attack == AttackKind::BobProbe) return config.eve_check_count();
    return config.honesty_check_count();
}

/// Runs `trials` independent sessions with the attack installed. Session i uses
/// seed derive_seed(master_seed, i), so results do not depend on `workers`.
inline CampaignResult monte_carlo_detection(AttackKind attack, const SessionConfig& config, std::uint64_t trials,
                                            std::uint64_t master_seed, CampaignOptions options = {}) {
    if (trials < 1) throw ConfigError("monte_carlo_detection: trials must be >= 1");
    config.validate();
    const unsigned workers = std::max(1u, options.workers);

    std::vector<detail::CampaignCounts> partial(workers);
    auto work = [&](unsigned w) {
        for (std::uint64_t i = w; i < trials; i += workers) {
            SessionConfig cfg = config;
            cfg.seed = derive_seed(master_seed, i);
            Adversary adv = make_adversary(attack, derive_seed(cfg.seed, stream_label::kAdversary), options.target);
            const auto out = run_session(cfg, seeded_inputs(cfg), adv, SessionOptions{false});
            detail::count_session(attack, options.target, out, partial[w]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    detail::CampaignCounts total;
    for (const auto& p : partial) total.merge(p);

    CampaignResult r;
    r.attack = attack;
    r.config = config;
    r.sessions = trials;
    r.master_seed = master_seed;
    r.status_counts = total.statuses;

    const auto p_event = enumerate_event_probability(attack, primary_event(attack));
    auto& pe = r.per_event;
    pe.attack = attack;
    pe.scope = Scope::PerEvent;
    pe.exact = p_event;
    pe.expected = p_event.value();
    pe.mc_trials = total.events;
    pe.detections = total.event_detections;
    pe.mc_estimate = total.events ? static_cast<double>(total.event_detections) / static_cast<double>(total.events) : 0;
    pe.seed = master_seed;
    const auto ci_e = wilson_interval(pe.detections, pe.mc_trials);
    pe.ci_low = ci_e.low;
    pe.ci_high = ci_e.high;

    auto& wr = r.whole_run;
    wr.attack = attack;
    wr.scope = Scope::WholeRun;
    if (attack == AttackKind::AliceAttackIISilent) {
        // Zero SUMMATION announcements abort whenever the rate threshold is positive.
        const bool aborts =
            !step4_summation_rate_check(std::vector<Announcement>(config.group_count(), Announcement::PhiPlus), config)
                 .pass;
        wr.exact = Rational{aborts ? 1u : 0u};
        wr.expected = aborts ? 1.0 : 0.0;
    } else {
        const auto m = whole_run_events(attack, config, options.target);
        wr.exact = whole_run_detection_exact(p_event, m);
        wr.expected = whole_run_detection(p_event, m);
    }
    wr.mc_trials = trials;
    wr.detections = total.run_detections;
    wr.mc_estimate = static_cast<double>(total.run_detections) / static_cast<double>(trials);
    wr.seed = master_seed;
    const auto ci_w = wilson_interval(wr.detections, wr.mc_trials);
    wr.ci_low = ci_w.low;
    wr.ci_high = ci_w.high;
    return r;
}

// ---------------------------------------------------------------------------
// Qubit efficiency

struct Efficiency {
    std::uint64_t v = 0;  ///< private bits per party
    std::uint64_t q = 0;  ///< qubits consumed
    std::uint64_t f = 0;  ///< classical bits announced
    Rational eta;         ///< v / (q + f)
};

/// v = n, q = 3n(8 + lambda + epsilon + gamma), f = 3n. Check traffic is not counted.
inline Efficiency qubit_efficiency(const SessionConfig& config) {
    config.validate();
    Efficiency e;
    e.v = config.n;
    e.q = 3 * config.sequence_length();
    e.f = 3 * config.n;
    e.eta = Rational(e.v, e.q + e.f);
    return e;
}

/// Parameters of the comparison protocol with a semi-honest third party.
struct BaselineParams {
    std::uint64_t r = 0, d = 0, delta = 0;
};

/// 2 / (9(32 + r + d + delta) + 6).
inline Rational baseline_efficiency(const BaselineParams& p) {
    return Rational(2, 9 * (32 + p.r + p.d + p.delta) + 6);
}

/// 2(8 + lambda + epsilon + gamma) < 3(32 + r + d + delta), evaluated exactly
/// (both sides scaled by n so gamma stays integral).
inline bool efficiency_dominates(const SessionConfig& config, const BaselineParams& p) {
    config.validate();
    return 2 * config.sequence_length() < 3 * config.n * (32 + p.r + p.d + p.delta);
}

}  // namespace semiqsum
