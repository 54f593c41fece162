#pragma once

// End-to-end session: Steps 1-5 with all three security checks.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semiqsum/protocol.hpp"
#include "semiqsum/roles.hpp"

namespace semiqsum {

/// Labels of the per-role streams derived from SessionConfig::seed.
namespace stream_label {
inline constexpr std::uint64_t kAlice = 1;
inline constexpr std::uint64_t kBob = 2;
inline constexpr std::uint64_t kCharlie = 3;
inline constexpr std::uint64_t kInputs = 4;
inline constexpr std::uint64_t kAdversary = 5;
}  // namespace stream_label

struct SessionOptions {
    bool record_transcript = true;
};

/// Omniscient view of a session, for tests and statistics. None of this is
/// visible to the roles beyond what the protocol lets them learn.
struct SessionDiagnostics {
    std::vector<Action> bob_actions, charlie_actions;
    std::vector<PreparedState> prepared_b, prepared_c;
    std::optional<CheckReport> check_b, check_c;
    std::vector<Announcement> announcements;
    std::vector<std::optional<BellOutcome>> alice_outcomes;
    std::vector<GroupRecord> groups;
    std::optional<RateCheck> rate;
    std::optional<HonestyReport> honesty;
    std::optional<GroupSelection> selection;
};

struct SessionOutcome {
    SessionStatus status = SessionStatus::Completed;
    std::optional<BitString> s;
    PrivateInputs inputs;
    KeyMaterial keys;
    Transcript transcript;
    SessionDiagnostics diagnostics;
    std::vector<std::string> warnings;

    bool completed() const noexcept { return status == SessionStatus::Completed; }
};

namespace detail {

inline EventPayload payload(std::optional<Subsequence> subseq, std::optional<std::uint64_t> index,
                            std::vector<std::pair<std::string_view, std::string>> fields = {},
                            std::optional<StateVector> state = std::nullopt) {
    return {subseq, index, std::move(fields), std::move(state)};
}

inline std::string action_string(const std::vector<Action>& actions) {
    std::string s(actions.size(), 'C');
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i] == Action::Sift) s[i] = 'S';
    return s;
}

inline std::string join(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

class SessionRunner {
public:
    SessionRunner(const SessionConfig& config, PrivateInputs inputs, Adversary& adversary, SessionOptions options)
        : config_(config),
          adversary_(adversary),
          alice_(adversary.alice ? adversary.alice.get() : &honest_alice_),
          alice_rng_(RandomStream::derive(config.seed, stream_label::kAlice)),
          bob_rng_(RandomStream::derive(config.seed, stream_label::kBob)),
          charlie_rng_(RandomStream::derive(config.seed, stream_label::kCharlie)) {
        out_.inputs = std::move(inputs);
        out_.transcript = Transcript(options.record_transcript);
    }

    SessionOutcome run() {
        config_.validate();
        out_.inputs.validate(config_.n);
        if (!config_.qualifying_is_integral())
            out_.warnings.push_back("n*gamma/8 is not an integer; n + n*gamma/8 is treated as an expectation");

        const auto len = config_.sequence_length();
        auto& d = out_.diagnostics;
        d.bob_actions = choose_actions(len, bob_rng_);
        d.charlie_actions = choose_actions(len, charlie_rng_);

        transmit_all(len);

        if (!eve_check(Subsequence::B)) return abort(3, SessionStatus::AbortEveCheckB);
        if (!eve_check(Subsequence::C)) return abort(3, SessionStatus::AbortEveCheckC);

        bell_step();
        d.rate = step4_summation_rate_check(d.announcements, config_);
        record(4, Role::Bob, EventType::CheckResult,
               payload(std::nullopt, std::nullopt,
                       {{"check", "summation_rate"},
                        {"observed", std::to_string(d.rate->observed)},
                        {"groups", std::to_string(d.rate->groups)},
                        {"pass", d.rate->pass ? "true" : "false"}}));
        if (!d.rate->pass) return abort(4, SessionStatus::AbortSummationRate);

        if (!honesty_step()) return abort(4, SessionStatus::AbortHonestyCheck);

        return key_step();
    }

private:
    std::optional<std::uint64_t> record(int step, Role role, EventType type, EventPayload p = {}) {
        return out_.transcript.record(step, role, type, std::move(p));
    }

    void track(Particle& p, std::optional<std::uint64_t> seq) {
        if (seq) p.history.push_back(*seq);
    }

    // Steps 1-2. Each particle makes its round trip before Alice sends the next
    // one on the same subsequence.
    void transmit_all(std::uint64_t len) {
        auto& d = out_.diagnostics;
        returned_b_.reserve(len);
        returned_c_.reserve(len);
        sift_b_.assign(len, std::nullopt);
        sift_c_.assign(len, std::nullopt);
        for (std::uint64_t t = 0; t < len; ++t) {
            round_trip(Subsequence::B, t, d.bob_actions[t]);
            round_trip(Subsequence::C, t, d.charlie_actions[t]);
        }
    }

    void round_trip(Subsequence leg, std::uint64_t t, Action action) {
        auto& d = out_.diagnostics;
        const Role party = leg == Subsequence::B ? Role::Bob : Role::Charlie;
        const char* fwd = leg == Subsequence::B ? "alice->bob" : "alice->charlie";
        const char* back = leg == Subsequence::B ? "bob->alice" : "charlie->alice";

        const PreparedState prep = alice_->prepare(leg, t, alice_rng_);
        (leg == Subsequence::B ? d.prepared_b : d.prepared_c).push_back(prep);
        Particle p{leg, t, prepare(prep.basis, prep.index), {}};
        track(p, record(1, Role::Alice, EventType::Prepared,
                        payload(leg, t, {{"basis", std::string(to_string(prep.basis))},
                                         {"state_index", std::to_string(prep.index)}},
                                p.state)));
        track(p, record(1, Role::Alice, EventType::Sent, payload(leg, t, {{"direction", fwd}})));

        if (auto* tap = adversary_.tap(leg)) {
            p = tap->on_forward(leg, std::move(p));
            track(p, record(1, Role::Eve, EventType::Tapped,
                            payload(leg, t, {{"direction", fwd}, {"tap", std::string(tap->name())}})));
        }
        if (leg == Subsequence::C && adversary_.bob) {
            p = adversary_.bob->on_charlie_forward(std::move(p), d.bob_actions[t]);
            track(p, record(1, Role::Bob, EventType::Tapped,
                            payload(leg, t, {{"direction", fwd}, {"tap", std::string(adversary_.bob->name())}})));
        }

        RandomStream& party_rng = leg == Subsequence::B ? bob_rng_ : charlie_rng_;
        auto result = classical_action(std::move(p), action, party_rng);
        p = std::move(result.returned);
        track(p, record(2, party, EventType::ActionTaken, payload(leg, t, {{"action", std::string(to_string(action))}})));
        if (result.sift_bit) {
            track(p, record(2, party, EventType::Measured,
                            payload(leg, t, {{"basis", "Z"}, {"outcome", std::to_string(*result.sift_bit)}})));
            (leg == Subsequence::B ? sift_b_ : sift_c_)[t] = result.sift_bit;
        }
        track(p, record(2, party, EventType::Sent, payload(leg, t, {{"direction", back}})));

        if (auto* tap = adversary_.tap(leg)) {
            p = tap->on_return(leg, std::move(p));
            track(p, record(2, Role::Eve, EventType::Tapped,
                            payload(leg, t, {{"direction", back}, {"tap", std::string(tap->name())}})));
        }
        if (p.state.dim() != 2) throw ProtocolError("session: returned particle is still entangled");
        (leg == Subsequence::B ? returned_b_ : returned_c_).push_back(std::move(p));
    }

    bool eve_check(Subsequence leg) {
        auto& d = out_.diagnostics;
        const bool is_b = leg == Subsequence::B;
        const Role party = is_b ? Role::Bob : Role::Charlie;
        auto report = step3_eve_check(leg, is_b ? returned_b_ : returned_c_, is_b ? d.bob_actions : d.charlie_actions,
                                      is_b ? sift_b_ : sift_c_, is_b ? d.prepared_b : d.prepared_c, config_,
                                      alice_rng_);
        std::vector<std::uint64_t> positions;
        for (const auto& c : report.checked) positions.push_back(c.position);
        record(3, Role::Alice, EventType::Announced, payload(leg, std::nullopt, {{"check_positions", join(positions)}}));
        for (const auto& c : report.checked) {
            std::vector<std::pair<std::string_view, std::string>> f{{"action", std::string(to_string(c.action))}};
            if (c.action == Action::Sift) f.emplace_back("reported_bit", std::to_string(c.expected));
            record(3, party, EventType::Announced, payload(leg, c.position, std::move(f)));
            record(3, Role::Alice, EventType::Measured,
                   payload(leg, c.position, {{"basis", std::string(to_string(c.basis))},
                                             {"outcome", std::to_string(c.outcome)},
                                             {"error", c.error ? "true" : "false"}}));
        }
        record(3, Role::Alice, EventType::CheckResult,
               payload(leg, std::nullopt,
                       {{"check", "eve"},
                        {"ctrl_errors", std::to_string(report.ctrl_errors)},
                        {"ctrl_total", std::to_string(report.ctrl_total)},
                        {"sift_errors", std::to_string(report.sift_errors)},
                        {"sift_total", std::to_string(report.sift_total)},
                        {"pass", report.pass ? "true" : "false"}}));
        const bool pass = report.pass;
        survivors(leg) = surviving_positions(is_b ? returned_b_.size() : returned_c_.size(), report);
        (is_b ? d.check_b : d.check_c) = std::move(report);
        return pass;
    }

    std::vector<std::uint64_t>& survivors(Subsequence leg) { return leg == Subsequence::B ? survivors_b_ : survivors_c_; }

    void bell_step() {
        auto& d = out_.diagnostics;
        const auto groups = config_.group_count();
        if (survivors_b_.size() != groups || survivors_c_.size() != groups)
            throw ProtocolError("session: survivor count differs from group count");
        d.announcements.reserve(groups);
        d.groups.reserve(groups);
        for (std::uint64_t l = 0; l < groups; ++l) {
            const auto tb = survivors_b_[l];
            const auto tc = survivors_c_[l];
            ParticleGroup g{l, returned_b_[tb], returned_c_[tc]};
            const AliceDeclaration decl = alice_->measure_group(g, alice_rng_);
            record(4, Role::Alice, EventType::Measured,
                   payload(std::nullopt, l, {{"basis", std::string(to_string(decl.measured_in))},
                                             {"outcome", decl.outcome_label},
                                             {"bob_position", std::to_string(tb)},
                                             {"charlie_position", std::to_string(tc)}}));
            record(4, Role::Alice, EventType::Announced,
                   payload(std::nullopt, l, {{"announcement", std::string(to_string(decl.announcement))}}));
            d.announcements.push_back(decl.announcement);
            d.alice_outcomes.push_back(decl.retained);
            d.groups.push_back({d.bob_actions[tb], d.charlie_actions[tc], sift_b_[tb], sift_c_[tc]});
        }
    }

    // Bob and Charlie exchange their action lists over the private side
    // channel, then pick and test n*epsilon groups.
    bool honesty_step() {
        auto& d = out_.diagnostics;
        std::vector<Action> bob_group_actions, charlie_group_actions;
        for (const auto& g : d.groups) {
            bob_group_actions.push_back(g.bob_action);
            charlie_group_actions.push_back(g.charlie_action);
        }
        record(4, Role::Bob, EventType::Announced,
               payload(std::nullopt, std::nullopt, {{"channel", "private"}, {"actions", action_string(bob_group_actions)}}));
        record(4, Role::Charlie, EventType::Announced,
               payload(std::nullopt, std::nullopt,
                       {{"channel", "private"}, {"actions", action_string(charlie_group_actions)}}));

        d.honesty = step4_honesty_check(d.groups, d.announcements, config_, bob_rng_);
        record(4, Role::Bob, EventType::Announced,
               payload(std::nullopt, std::nullopt, {{"honesty_groups", join(d.honesty->chosen)}}));
        for (const auto l : d.honesty->chosen) {
            const auto& g = d.groups[l];
            if (!g.both(Action::Sift) || d.announcements[l] == Announcement::Summation) continue;
            record(4, Role::Bob, EventType::Announced,
                   payload(std::nullopt, l, {{"channel", "private"}, {"bit", std::to_string(*g.bob_bit)}}));
            record(4, Role::Charlie, EventType::Announced,
                   payload(std::nullopt, l, {{"channel", "private"}, {"bit", std::to_string(*g.charlie_bit)}}));
        }
        record(4, Role::Bob, EventType::CheckResult,
               payload(std::nullopt, std::nullopt,
                       {{"check", "honesty"},
                        {"checked", std::to_string(d.honesty->checked)},
                        {"errors", std::to_string(d.honesty->errors)},
                        {"pass", d.honesty->pass ? "true" : "false"}}));
        return d.honesty->pass;
    }

    SessionOutcome key_step() {
        auto& d = out_.diagnostics;
        std::vector<std::uint64_t> remaining;
        remaining.reserve(d.groups.size());
        std::size_t j = 0;
        for (std::uint64_t l = 0; l < d.groups.size(); ++l) {
            if (j < d.honesty->chosen.size() && d.honesty->chosen[j] == l) {
                ++j;
                continue;
            }
            remaining.push_back(l);
        }
        if (remaining.size() != config_.remaining_group_count())
            throw ProtocolError("session: remaining group count is inconsistent");

        d.selection = step5_select_groups(d.groups, d.announcements, remaining, config_.n);
        record(5, Role::Bob, EventType::Announced,
               payload(std::nullopt, std::nullopt,
                       {{"selected_groups", join(d.selection->selected)},
                        {"qualifying", std::to_string(d.selection->qualifying)}}));
        if (!d.selection->sufficient) return abort(5, SessionStatus::AbortInsufficientGroups);

        out_.keys = derive_keys(d.selection->selected, d.alice_outcomes, d.groups);
        BitString s = compute_summation(out_.keys, out_.inputs);
        record(5, Role::Alice, EventType::Announced, payload(std::nullopt, std::nullopt, {{"R_A", out_.keys.r_a.str()}}));
        record(5, Role::Bob, EventType::Announced, payload(std::nullopt, std::nullopt, {{"R_B", out_.keys.r_b.str()}}));
        record(5, Role::Charlie, EventType::Announced,
               payload(std::nullopt, std::nullopt, {{"R_C", out_.keys.r_c.str()}}));
        record(5, Role::Session, EventType::Completed, payload(std::nullopt, std::nullopt, {{"S", s.str()}}));
        out_.s = std::move(s);
        out_.status = SessionStatus::Completed;
        return std::move(out_);
    }

    SessionOutcome abort(int step, SessionStatus status) {
        record(step, Role::Session, EventType::Aborted,
               payload(std::nullopt, std::nullopt, {{"status", std::string(to_string(status))}}));
        out_.status = status;
        return std::move(out_);
    }

    const SessionConfig& config_;
    Adversary& adversary_;
    AliceStrategy honest_alice_;
    AliceStrategy* alice_;
    RandomStream alice_rng_, bob_rng_, charlie_rng_;
    SessionOutcome out_;
    std::vector<Particle> returned_b_, returned_c_;
    std::vector<std::optional<std::uint8_t>> sift_b_, sift_c_;
    std::vector<std::uint64_t> survivors_b_, survivors_c_;
};

}  // namespace detail

/// Inputs derived from the session seed, for runs without explicit inputs.
inline PrivateInputs seeded_inputs(const SessionConfig& config) {
    auto rng = RandomStream::derive(config.seed, stream_label::kInputs);
    return PrivateInputs::random(config.n, rng);
}

inline SessionOutcome run_session(const SessionConfig& config, PrivateInputs inputs, Adversary& adversary,
                                  SessionOptions options = {}) {
    return detail::SessionRunner(config, std::move(inputs), adversary, options).run();
}

inline SessionOutcome run_session(const SessionConfig& config, PrivateInputs inputs, SessionOptions options = {}) {
    Adversary none;
    return run_session(config, std::move(inputs), none, options);
}

}  // namespace semiqsum
