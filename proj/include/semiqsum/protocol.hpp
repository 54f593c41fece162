#pragma once

// Protocol data types and the individual step operations.
//
// Positions are 0-based throughout: particle t in [0, sequence_length()),
// group l in [0, group_count()).

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semiqsum/quantum.hpp"
#include "semiqsum/random_stream.hpp"
#include "semiqsum/transcript.hpp"

namespace semiqsum {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Internal inconsistency between protocol steps (never a user error).
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Bit strings

class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n) : bits_(n, 0) {}
    explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_)
            if (b > 1) throw ConfigError("BitString: bits must be 0 or 1");
    }

    /// Parses a string of '0'/'1' characters.
    static BitString parse(std::string_view text) {
        BitString s;
        s.bits_.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') throw ConfigError("BitString: expected only '0' and '1'");
            s.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return s;
    }

    static BitString random(std::size_t n, RandomStream& rng) {
        BitString s(n);
        for (auto& b : s.bits_) b = static_cast<std::uint8_t>(rng.bit());
        return s;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits_.at(i); }
    void set(std::size_t i, std::uint8_t b) { bits_.at(i) = b & 1u; }
    void push_back(std::uint8_t b) { bits_.push_back(b & 1u); }

    std::string str() const {
        std::string out(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] ? '1' : '0';
        return out;
    }

    friend BitString operator^(const BitString& a, const BitString& b) {
        if (a.size() != b.size()) throw ConfigError("BitString: length mismatch");
        BitString out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out.bits_[i] = a.bits_[i] ^ b.bits_[i];
        return out;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Configuration

/// Operational meaning of "abnormally high" check errors and "abnormally low"
/// summation counts.
struct AbortThresholds {
    std::uint64_t max_check_errors = 0;
    double summation_rate_sigma = 4.0;
};

struct SessionConfig {
    std::uint64_t n = 1;
    std::uint64_t lambda = 2;
    std::uint64_t epsilon = 2;
    double gamma = 8.0;
    std::uint64_t seed = 0;
    AbortThresholds thresholds{};

    /// n*gamma as an exact integer; throws if it is not integral.
    std::uint64_t n_gamma() const {
        const double ng = static_cast<double>(n) * gamma;
        const double r = std::round(ng);
        if (!std::isfinite(ng) || std::abs(ng - r) > 1e-9 || r < 1)
            throw ConfigError("SessionConfig: n*gamma must be a positive integer");
        return static_cast<std::uint64_t>(r);
    }

    void validate() const {
        if (n < 1) throw ConfigError("SessionConfig: n must be >= 1");
        if (lambda < 1) throw ConfigError("SessionConfig: lambda must be >= 1");
        if (epsilon < 1) throw ConfigError("SessionConfig: epsilon must be >= 1");
        if (!(gamma > 0) || !std::isfinite(gamma)) throw ConfigError("SessionConfig: gamma must be > 0");
        (void)n_gamma();
        if (!(thresholds.summation_rate_sigma > 0))
            throw ConfigError("SessionConfig: summation_rate_sigma must be > 0");
    }

    /// Length of each of P_b and P_c: n(8 + lambda + epsilon + gamma).
    std::uint64_t sequence_length() const { return n * (8 + lambda + epsilon) + n_gamma(); }
    std::uint64_t eve_check_count() const { return n * lambda; }
    std::uint64_t honesty_check_count() const { return n * epsilon; }
    /// Groups formed in the Bell-measurement step: n(8 + epsilon + gamma).
    std::uint64_t group_count() const { return sequence_length() - eve_check_count(); }
    /// Groups left after the honesty check: n(8 + gamma).
    std::uint64_t remaining_group_count() const { return group_count() - honesty_check_count(); }
    /// Expected number of key-bearing groups, n + n*gamma/8.
    double expected_qualifying() const { return static_cast<double>(n) + static_cast<double>(n_gamma()) / 8.0; }
    bool qualifying_is_integral() const { return n_gamma() % 8 == 0; }
};

// ---------------------------------------------------------------------------
// Protocol objects

enum class Action { Ctrl, Sift };

constexpr std::string_view to_string(Action a) noexcept { return a == Action::Ctrl ? "CTRL" : "SIFT"; }

struct Particle {
    Subsequence subseq = Subsequence::B;
    std::uint64_t index = 0;
    /// Dimension 2, or 4 while an outside ancilla is entangled with it (the
    /// particle is q0, the ancilla q1).
    StateVector state = states::plus();
    std::vector<std::uint64_t> history;
};

struct ParticleGroup {
    std::uint64_t group_index = 0;
    Particle bob_particle;
    Particle charlie_particle;
};

enum class Announcement { PhiPlus, PsiPlus, Summation };

constexpr std::string_view to_string(Announcement a) noexcept {
    switch (a) {
        case Announcement::PhiPlus: return "PHI_PLUS";
        case Announcement::PsiPlus: return "PSI_PLUS";
        case Announcement::Summation: return "SUMMATION";
    }
    return "?";
}

/// Public announcement for a Bell outcome: phi-/psi- are hidden behind SUMMATION.
constexpr Announcement announce(BellOutcome o) noexcept {
    switch (o) {
        case BellOutcome::PhiPlus: return Announcement::PhiPlus;
        case BellOutcome::PsiPlus: return Announcement::PsiPlus;
        default: return Announcement::Summation;
    }
}

struct PrivateInputs {
    BitString x, y, z;

    void validate(std::uint64_t n) const {
        if (x.size() != n || y.size() != n || z.size() != n)
            throw ConfigError("PrivateInputs: X, Y, Z must each have length n");
    }

    static PrivateInputs random(std::uint64_t n, RandomStream& rng) {
        PrivateInputs in;
        in.x = BitString::random(n, rng);
        in.y = BitString::random(n, rng);
        in.z = BitString::random(n, rng);
        return in;
    }
};

struct KeyMaterial {
    BitString k_a, k_b, k_c;
    BitString r_a, r_b, r_c;
};

enum class SessionStatus {
    Completed,
    AbortEveCheckB,
    AbortEveCheckC,
    AbortSummationRate,
    AbortHonestyCheck,
    AbortInsufficientGroups,
};

constexpr std::string_view to_string(SessionStatus s) noexcept {
    switch (s) {
        case SessionStatus::Completed: return "COMPLETED";
        case SessionStatus::AbortEveCheckB: return "ABORT_EVE_CHECK_B";
        case SessionStatus::AbortEveCheckC: return "ABORT_EVE_CHECK_C";
        case SessionStatus::AbortSummationRate: return "ABORT_SUMMATION_RATE";
        case SessionStatus::AbortHonestyCheck: return "ABORT_HONESTY_CHECK";
        case SessionStatus::AbortInsufficientGroups: return "ABORT_INSUFFICIENT_GROUPS";
    }
    return "?";
}

/// True for aborts raised by a security check (as opposed to running short of groups).
constexpr bool is_detection(SessionStatus s) noexcept {
    return s == SessionStatus::AbortEveCheckB || s == SessionStatus::AbortEveCheckC ||
           s == SessionStatus::AbortSummationRate || s == SessionStatus::AbortHonestyCheck;
}

/// What Alice prepared for one particle; private to Alice.
struct PreparedState {
    Basis basis = Basis::Hadamard;
    int index = 0;
};

// ---------------------------------------------------------------------------
// Step 1 and Step 2

/// Both subsequences of honest |+> particles, as Alice would prepare them.
struct ParticleSequences {
    std::vector<Particle> b, c;
};

inline ParticleSequences step1_prepare(const SessionConfig& config) {
    config.validate();
    const auto len = config.sequence_length();
    ParticleSequences seq;
    seq.b.reserve(len);
    seq.c.reserve(len);
    for (std::uint64_t t = 0; t < len; ++t) {
        seq.b.push_back({Subsequence::B, t, states::plus(), {}});
        seq.c.push_back({Subsequence::C, t, states::plus(), {}});
    }
    return seq;
}

inline std::vector<Action> choose_actions(std::uint64_t length, RandomStream& rng) {
    std::vector<Action> actions(length);
    for (auto& a : actions) a = rng.bit() ? Action::Sift : Action::Ctrl;
    return actions;
}

struct ActionResult {
    Particle returned;
    std::optional<std::uint8_t> sift_bit;
};

/// A classical party's action. SIFT measures the party's qubit in the
/// computational basis and sends back the state found; if an outside ancilla is
/// attached the joint state collapses accordingly.
inline ActionResult classical_action(Particle p, Action action, RandomStream& rng) {
    if (action == Action::Ctrl) return {std::move(p), std::nullopt};
    std::size_t bit;
    if (p.state.dim() == 2) {
        auto m = measure(p.state, Basis::Computational, rng);
        bit = m.outcome;
        p.state = m.collapsed;
    } else {
        auto m = measure_qubit(p.state, 0, rng);
        bit = m.outcome;
        p.state = m.collapsed;
    }
    return {std::move(p), static_cast<std::uint8_t>(bit)};
}

// ---------------------------------------------------------------------------
// Step 3

struct CheckedParticle {
    std::uint64_t position;
    Action action;
    Basis basis;
    std::size_t outcome;
    std::size_t expected;
    bool error;
};

struct CheckReport {
    Subsequence subseq = Subsequence::B;
    std::vector<CheckedParticle> checked;
    std::uint64_t ctrl_errors = 0, ctrl_total = 0;
    std::uint64_t sift_errors = 0, sift_total = 0;
    bool pass = true;

    std::uint64_t errors() const noexcept { return ctrl_errors + sift_errors; }
    std::uint64_t total() const noexcept { return ctrl_total + sift_total; }
};

/// Eavesdropping check on one returned subsequence. Alice picks n*lambda
/// positions; CTRL particles are measured in the basis Alice prepared them in
/// and compared with the prepared state, SIFT particles in the computational
/// basis and compared with the party's reported bit.
inline CheckReport step3_eve_check(Subsequence subseq,
                                   const std::vector<Particle>& returned,
                                   const std::vector<Action>& actions,
                                   const std::vector<std::optional<std::uint8_t>>& sift_records,
                                   const std::vector<PreparedState>& prepared,
                                   const SessionConfig& config,
                                   RandomStream& rng) {
    const auto k = config.eve_check_count();
    if (returned.size() < k) throw ConfigError("step3_eve_check: fewer particles than check positions");
    if (actions.size() != returned.size() || sift_records.size() != returned.size() ||
        prepared.size() != returned.size())
        throw ProtocolError("step3_eve_check: per-particle records have mismatched lengths");

    CheckReport report;
    report.subseq = subseq;
    for (const auto pos : rng.sample_without_replacement(k, returned.size())) {
        const Particle& p = returned[pos];
        if (p.state.dim() != 2) throw ProtocolError("step3_eve_check: particle still entangled with an ancilla");
        CheckedParticle c{pos, actions[pos], Basis::Computational, 0, 0, false};
        if (actions[pos] == Action::Ctrl) {
            c.basis = prepared[pos].basis;
            c.expected = static_cast<std::size_t>(prepared[pos].index);
            c.outcome = measure(p.state, c.basis, rng).outcome;
            c.error = c.outcome != c.expected;
            ++report.ctrl_total;
            report.ctrl_errors += c.error;
        } else {
            if (!sift_records[pos]) throw ProtocolError("step3_eve_check: SIFT particle without a record");
            c.expected = *sift_records[pos];
            c.outcome = measure(p.state, Basis::Computational, rng).outcome;
            c.error = c.outcome != c.expected;
            ++report.sift_total;
            report.sift_errors += c.error;
        }
        report.checked.push_back(c);
    }
    report.pass = report.errors() <= config.thresholds.max_check_errors;
    return report;
}

/// Positions of [0, length) not in the (sorted) checked set, in order.
inline std::vector<std::uint64_t> surviving_positions(std::uint64_t length, const CheckReport& report) {
    std::vector<std::uint64_t> out;
    out.reserve(length);
    std::size_t j = 0;
    for (std::uint64_t t = 0; t < length; ++t) {
        if (j < report.checked.size() && report.checked[j].position == t) {
            ++j;
            continue;
        }
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Step 4

/// Alice's result for one group: the public announcement and the Bell outcome
/// she keeps privately for key derivation.
struct AliceDeclaration {
    Announcement announcement = Announcement::PhiPlus;
    std::optional<BellOutcome> retained;
    Basis measured_in = Basis::Bell;
    std::string outcome_label;
};

/// Honest Alice: Bell measurement and truthful announcement.
inline AliceDeclaration bell_measure_group(const ParticleGroup& g, RandomStream& rng) {
    const auto m = measure(tensor(g.bob_particle.state, g.charlie_particle.state), Basis::Bell, rng);
    const auto outcome = static_cast<BellOutcome>(m.outcome);
    return {announce(outcome), outcome, Basis::Bell, std::string(to_string(outcome))};
}

inline std::vector<AliceDeclaration> step4_measure_and_announce(const std::vector<ParticleGroup>& groups,
                                                                RandomStream& rng) {
    std::vector<AliceDeclaration> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(bell_measure_group(g, rng));
    return out;
}

/// Honest marginal probability that a group is announced SUMMATION.
inline constexpr double kHonestSummationRate = 3.0 / 8.0;

struct RateCheck {
    std::uint64_t observed = 0;
    std::uint64_t groups = 0;
    double expected = 0;
    double threshold = 0;
    bool pass = true;
};

/// Aborts iff the SUMMATION count is below 3/8*N - sigma*sqrt(N*(3/8)*(5/8)).
inline RateCheck step4_summation_rate_check(const std::vector<Announcement>& announcements,
                                            const SessionConfig& config) {
    RateCheck r;
    r.groups = announcements.size();
    for (auto a : announcements) r.observed += a == Announcement::Summation;
    const double n = static_cast<double>(r.groups);
    r.expected = kHonestSummationRate * n;
    r.threshold = r.expected - config.thresholds.summation_rate_sigma *
                                   std::sqrt(n * kHonestSummationRate * (1.0 - kHonestSummationRate));
    r.pass = !(static_cast<double>(r.observed) < r.threshold);
    return r;
}

/// What Bob and Charlie know about one group after exchanging records.
struct GroupRecord {
    Action bob_action = Action::Ctrl;
    Action charlie_action = Action::Ctrl;
    std::optional<std::uint8_t> bob_bit;
    std::optional<std::uint8_t> charlie_bit;

    bool both(Action a) const noexcept { return bob_action == a && charlie_action == a; }
};

/// Honesty rule for one chosen group: nullopt if the group is not checkable,
/// otherwise whether Alice's announcement is inconsistent.
inline std::optional<bool> honesty_error(const GroupRecord& g, Announcement a) {
    if (g.both(Action::Ctrl)) return a == Announcement::Summation;
    if (g.both(Action::Sift)) {
        if (a == Announcement::Summation) return std::nullopt;
        if (!g.bob_bit || !g.charlie_bit) throw ProtocolError("honesty_error: SIFT group without records");
        const bool equal = *g.bob_bit == *g.charlie_bit;
        return a == Announcement::PhiPlus ? !equal : equal;
    }
    return std::nullopt;
}

struct HonestyReport {
    std::vector<std::uint64_t> chosen;
    std::uint64_t checked = 0;
    std::uint64_t errors = 0;
    bool pass = true;
};

/// Bob and Charlie pick n*epsilon groups and test each checkable one.
inline HonestyReport step4_honesty_check(const std::vector<GroupRecord>& groups,
                                         const std::vector<Announcement>& announcements,
                                         const SessionConfig& config,
                                         RandomStream& rng) {
    const auto k = config.honesty_check_count();
    if (groups.size() < k) throw ConfigError("step4_honesty_check: fewer groups than check count");
    if (announcements.size() != groups.size())
        throw ProtocolError("step4_honesty_check: announcement count differs from group count");
    HonestyReport r;
    r.chosen = [&] {
        auto s = rng.sample_without_replacement(k, groups.size());
        return std::vector<std::uint64_t>(s.begin(), s.end());
    }();
    for (const auto l : r.chosen) {
        if (auto err = honesty_error(groups[l], announcements[l])) {
            ++r.checked;
            r.errors += *err;
        }
    }
    r.pass = r.errors <= config.thresholds.max_check_errors;
    return r;
}

// ---------------------------------------------------------------------------
// Step 5

struct GroupSelection {
    std::uint64_t qualifying = 0;
    std::vector<std::uint64_t> selected;
    bool sufficient = false;
};

/// First n groups (ascending, among `remaining`) where both parties took SIFT
/// and the announcement was SUMMATION.
inline GroupSelection step5_select_groups(const std::vector<GroupRecord>& groups,
                                          const std::vector<Announcement>& announcements,
                                          const std::vector<std::uint64_t>& remaining,
                                          std::uint64_t n) {
    GroupSelection s;
    for (const auto l : remaining) {
        if (groups.at(l).both(Action::Sift) && announcements.at(l) == Announcement::Summation) {
            ++s.qualifying;
            if (s.selected.size() < n) s.selected.push_back(l);
        }
    }
    s.sufficient = s.selected.size() == n;
    return s;
}

/// Key bits for the selected groups: k_a = 0 iff phi-, k_b and k_c are the parties' SIFT bits.
inline KeyMaterial derive_keys(const std::vector<std::uint64_t>& selected,
                               const std::vector<std::optional<BellOutcome>>& alice_outcomes,
                               const std::vector<GroupRecord>& groups) {
    KeyMaterial km;
    for (const auto l : selected) {
        const auto& o = alice_outcomes.at(l);
        const auto& g = groups.at(l);
        if (!o || (*o != BellOutcome::PhiMinus && *o != BellOutcome::PsiMinus))
            throw ProtocolError("derive_keys: selected group has no retained phi-/psi- outcome");
        if (!g.bob_bit || !g.charlie_bit) throw ProtocolError("derive_keys: selected group missing a SIFT record");
        km.k_a.push_back(*o == BellOutcome::PhiMinus ? 0 : 1);
        km.k_b.push_back(*g.bob_bit);
        km.k_c.push_back(*g.charlie_bit);
    }
    return km;
}

/// Fills the public R strings into `keys` and returns S = R_A ^ R_B ^ R_C.
inline BitString compute_summation(KeyMaterial& keys, const PrivateInputs& inputs) {
    const auto n = keys.k_a.size();
    if (keys.k_b.size() != n || keys.k_c.size() != n) throw ConfigError("compute_summation: key length mismatch");
    inputs.validate(n);
    keys.r_a = keys.k_a ^ inputs.x;
    keys.r_b = keys.k_b ^ inputs.y;
    keys.r_c = keys.k_c ^ inputs.z;
    return keys.r_a ^ keys.r_b ^ keys.r_c;
}

}  // namespace semiqsum
