#pragma once

// Ordered event log of one session, and its JSON-lines form.
//
// Line schema (one object per event, keys in this order):
//   {"seq_no": 0, "step": 1, "role": "alice", "event_type": "prepared",
//    "payload": {"subseq": "B", "index": 0, ..., "amps": [[re, im], ...]}}
// Payload keys other than "subseq", "index" and "amps" are strings.
// Amplitudes are rounded to 15 significant digits.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semiqsum/quantum.hpp"

namespace semiqsum {

enum class Role { Alice, Bob, Charlie, Eve, Session };
enum class Subsequence { B, C };
enum class EventType { Prepared, Sent, Tapped, ActionTaken, Measured, Announced, CheckResult, Aborted, Completed };

constexpr std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::Alice: return "alice";
        case Role::Bob: return "bob";
        case Role::Charlie: return "charlie";
        case Role::Eve: return "eve";
        case Role::Session: return "session";
    }
    return "?";
}

constexpr std::string_view to_string(Subsequence s) noexcept { return s == Subsequence::B ? "B" : "C"; }

constexpr std::string_view to_string(EventType t) noexcept {
    switch (t) {
        case EventType::Prepared: return "prepared";
        case EventType::Sent: return "sent";
        case EventType::Tapped: return "tapped";
        case EventType::ActionTaken: return "action_taken";
        case EventType::Measured: return "measured";
        case EventType::Announced: return "announced";
        case EventType::CheckResult: return "check_result";
        case EventType::Aborted: return "aborted";
        case EventType::Completed: return "completed";
    }
    return "?";
}

struct EventPayload {
    std::optional<Subsequence> subseq;
    std::optional<std::uint64_t> index;
    std::vector<std::pair<std::string_view, std::string>> fields;
    std::optional<StateVector> state;

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return &v;
        return nullptr;
    }
};

struct TranscriptEvent {
    std::uint64_t seq_no = 0;
    int step = 0;
    Role role = Role::Session;
    EventType type = EventType::Prepared;
    EventPayload payload;
};

/// 15-significant-digit rounding used for serialized amplitudes.
inline double round15(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;  // drop negative zero
}

class Transcript {
public:
    explicit Transcript(bool enabled = true) : enabled_(enabled) {}

    bool enabled() const noexcept { return enabled_; }

    /// Appends an event and returns its sequence number (or nullopt when recording is off).
    std::optional<std::uint64_t> record(int step, Role role, EventType type, EventPayload payload = {}) {
        if (!enabled_) return std::nullopt;
        const auto seq = static_cast<std::uint64_t>(events_.size());
        events_.push_back({seq, step, role, type, std::move(payload)});
        return seq;
    }

    const std::vector<TranscriptEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }

    static nlohmann::ordered_json to_json(const TranscriptEvent& e) {
        nlohmann::ordered_json payload = nlohmann::ordered_json::object();
        if (e.payload.subseq) payload["subseq"] = std::string(to_string(*e.payload.subseq));
        if (e.payload.index) payload["index"] = *e.payload.index;
        for (const auto& [k, v] : e.payload.fields) payload[std::string(k)] = v;
        if (e.payload.state) {
            auto amps = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < e.payload.state->dim(); ++k) {
                const Amplitude a = (*e.payload.state)[k];
                amps.push_back({round15(a.real()), round15(a.imag())});
            }
            payload["amps"] = std::move(amps);
        }
        nlohmann::ordered_json line;
        line["seq_no"] = e.seq_no;
        line["step"] = e.step;
        line["role"] = std::string(to_string(e.role));
        line["event_type"] = std::string(to_string(e.type));
        line["payload"] = std::move(payload);
        return line;
    }

    void write_jsonl(std::ostream& os) const {
        for (const auto& e : events_) os << to_json(e).dump() << '\n';
    }

    std::string to_jsonl() const {
        std::ostringstream os;
        write_jsonl(os);
        return os.str();
    }

private:
    bool enabled_;
    std::vector<TranscriptEvent> events_;
};

}  // namespace semiqsum
