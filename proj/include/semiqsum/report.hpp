#pragma once

// JSON and CSV report emission. Every JSON document carries
// "schema_version": 1.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiqsum/analysis.hpp"

namespace semiqsum {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline Json to_json(const SessionConfig& c) {
    Json j;
    j["n"] = c.n;
    j["lambda"] = c.lambda;
    j["epsilon"] = c.epsilon;
    j["gamma"] = c.gamma;
    j["seed"] = c.seed;
    j["max_check_errors"] = c.thresholds.max_check_errors;
    j["summation_rate_sigma"] = c.thresholds.summation_rate_sigma;
    return j;
}

inline Json to_json(const DetectionStats& s) {
    Json j;
    j["attack"] = std::string(to_token(s.attack));
    j["scope"] = std::string(to_string(s.scope));
    j["exact"] = s.exact ? Json(s.exact->str()) : Json(nullptr);
    j["expected"] = s.expected;
    j["mc_estimate"] = s.mc_estimate;
    j["ci"] = {s.ci_low, s.ci_high};
    j["trials"] = s.mc_trials;
    j["detections"] = s.detections;
    j["seed"] = s.seed;
    j["agrees"] = s.agrees();
    return j;
}

inline Json campaign_report(const CampaignResult& r) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["attack"] = std::string(to_token(r.attack));
    j["config"] = to_json(r.config);
    j["sessions"] = r.sessions;
    j["seed"] = r.master_seed;
    Json statuses = Json::object();
    for (const auto& [status, count] : r.status_counts) statuses[std::string(to_string(status))] = count;
    j["status_counts"] = std::move(statuses);
    j["results"] = {to_json(r.per_event), to_json(r.whole_run)};
    j["agrees"] = r.agrees();
    return j;
}

inline std::string stats_csv_header() {
    return "attack,scope,exact,expected,mc_estimate,ci_low,ci_high,trials,detections,seed,agrees\n";
}

inline std::string stats_csv_row(const DetectionStats& s) {
    const Json j = to_json(s);
    std::ostringstream os;
    os << to_token(s.attack) << ',' << to_string(s.scope) << ',' << (s.exact ? s.exact->str() : "") << ','
       << j["expected"].dump() << ',' << j["mc_estimate"].dump() << ',' << j["ci"][0].dump() << ','
       << j["ci"][1].dump() << ',' << s.mc_trials << ',' << s.detections << ',' << s.seed << ','
       << (s.agrees() ? "true" : "false") << '\n';
    return os.str();
}

inline std::string campaign_csv(const CampaignResult& r) {
    return stats_csv_header() + stats_csv_row(r.per_event) + stats_csv_row(r.whole_run);
}

inline Json session_report(const SessionConfig& config, const SessionOutcome& out) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(config);
    j["status"] = std::string(to_string(out.status));
    j["X"] = out.inputs.x.str();
    j["Y"] = out.inputs.y.str();
    j["Z"] = out.inputs.z.str();
    if (out.s) {
        j["R_A"] = out.keys.r_a.str();
        j["R_B"] = out.keys.r_b.str();
        j["R_C"] = out.keys.r_c.str();
        j["S"] = out.s->str();
        j["S_matches_xor"] = *out.s == (out.inputs.x ^ out.inputs.y ^ out.inputs.z);
    } else {
        j["S"] = nullptr;
    }
    const auto& d = out.diagnostics;
    Json checks = Json::object();
    auto check_json = [](const CheckReport& r) {
        return Json{{"ctrl_errors", r.ctrl_errors}, {"ctrl_total", r.ctrl_total}, {"sift_errors", r.sift_errors},
                    {"sift_total", r.sift_total}, {"pass", r.pass}};
    };
    if (d.check_b) checks["eve_B"] = check_json(*d.check_b);
    if (d.check_c) checks["eve_C"] = check_json(*d.check_c);
    if (d.rate) checks["summation_rate"] = {{"observed", d.rate->observed}, {"groups", d.rate->groups},
                                            {"threshold", d.rate->threshold}, {"pass", d.rate->pass}};
    if (d.honesty) checks["honesty"] = {{"chosen", d.honesty->chosen.size()}, {"checked", d.honesty->checked},
                                        {"errors", d.honesty->errors}, {"pass", d.honesty->pass}};
    if (d.selection) checks["qualifying_groups"] = d.selection->qualifying;
    j["checks"] = std::move(checks);
    j["warnings"] = out.warnings;
    j["transcript_events"] = out.transcript.size();
    return j;
}

struct OracleEntry {
    AttackKind attack;
    CheckEvent event;
    ExactProbability exact;
};

/// Per-event probabilities of every attack at its own check.
inline std::vector<OracleEntry> oracle_table() {
    std::vector<OracleEntry> out;
    for (auto k : kAllAttacks) out.push_back({k, primary_event(k), enumerate_event_probability(k, primary_event(k))});
    return out;
}

inline Json oracle_report() {
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json rows = Json::array();
    for (const auto& e : oracle_table())
        rows.push_back({{"attack", std::string(to_token(e.attack))},
                        {"event", std::string(to_string(e.event))},
                        {"exact", e.exact.str()},
                        {"value", e.exact.value()}});
    j["per_event"] = std::move(rows);
    const auto rates = honest_summation_rate();
    j["honest"] = {{"step3_error", enumerate_event_probability(std::nullopt, CheckEvent::Step3ChosenParticle).str()},
                   {"step4_error", enumerate_event_probability(std::nullopt, CheckEvent::Step4ChosenGroup).str()},
                   {"summation_rate", rates.marginal.str()},
                   {"both_sift_summation", rates.both_sift.str()},
                   {"both_ctrl_summation", rates.both_ctrl.str()}};
    j["double_cnot_ancilla_tvd"] = double_cnot_ancilla_tvd().str();
    return j;
}

inline std::string oracle_csv() {
    std::string out = "attack,event,exact,value\n";
    for (const auto& e : oracle_table())
        out += std::string(to_token(e.attack)) + "," + std::string(to_string(e.event)) + "," + e.exact.str() + "," +
               Json(e.exact.value()).dump() + "\n";
    return out;
}

inline Json to_json(const Efficiency& e) {
    return Json{{"v", e.v}, {"q", e.q}, {"f", e.f}, {"eta", e.eta.str()}, {"eta_value", e.eta.value()}};
}

}  // namespace semiqsum
