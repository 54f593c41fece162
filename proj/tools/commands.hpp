#pragma once

// Subcommand implementations behind the semiqsum CLI. Kept separate from
// argument parsing so the tests can drive them directly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "semiqsum/semiqsum.hpp"

namespace semiqsum::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kAbortOrDisagree = 2 };

struct RunSpec {
    std::string subcommand;
    SessionConfig config{8, 2, 2, 8.0, 0, {}};
    std::optional<AttackKind> attack;
    std::uint64_t trials = 10000;
    std::string output_path;
    std::string format = "json";
    std::string transcript_path;
    std::optional<std::string> x, y, z;
    std::string inputs_file;
    std::vector<std::uint64_t> lambdas{1, 2};
    std::vector<std::uint64_t> epsilons{1, 2};
    std::vector<double> gammas{8, 16};
    BaselineParams baseline{};
    TapTarget target = TapTarget::B;
    unsigned workers = 1;
};

/// Writes to a sibling temp file and renames it into place, so a failed run
/// never leaves a partial file behind.
inline void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

inline void emit(const RunSpec& spec, const std::string& content, std::ostream& out) {
    if (spec.output_path.empty())
        out << content;
    else
        write_atomically(spec.output_path, content);
}

/// A bit field given either as '0'/'1' characters or as hex with a 0x prefix.
/// Hex expands MSB-first; surplus leading bits must be zero.
inline BitString parse_bits(std::string value, std::uint64_t n) {
    while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
    while (!value.empty() && std::isspace(static_cast<unsigned char>(value.front()))) value.erase(value.begin());
    if (value.rfind("0x", 0) == 0 || value.rfind("0X", 0) == 0) {
        std::string bits;
        for (char c : value.substr(2)) {
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
            else throw ConfigError("invalid hex digit in input bits");
            for (int b = 3; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
        }
        if (bits.size() < n) throw ConfigError("hex input has fewer than n bits");
        const auto surplus = bits.size() - n;
        if (bits.find('1') < surplus) throw ConfigError("hex input does not fit in n bits");
        value = bits.substr(surplus);
    }
    BitString s = BitString::parse(value);
    if (s.size() != n) throw ConfigError("input bit string must have length n");
    return s;
}

/// Inputs file: one "X=...", "Y=...", "Z=..." line each (':' also accepted,
/// case-insensitive, '#' starts a comment).
inline PrivateInputs read_inputs_file(const std::string& path, std::uint64_t n) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read inputs file " + path);
    std::optional<BitString> x, y, z;
    std::string line;
    while (std::getline(is, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto sep = line.find_first_of("=:");
        if (sep == std::string::npos) continue;
        std::string key = line.substr(0, sep);
        std::erase_if(key, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
        const auto bits = parse_bits(line.substr(sep + 1), n);
        if (key == "X" || key == "x") x = bits;
        else if (key == "Y" || key == "y") y = bits;
        else if (key == "Z" || key == "z") z = bits;
        else throw ConfigError("unknown key '" + key + "' in inputs file");
    }
    if (!x || !y || !z) throw ConfigError("inputs file must define X, Y and Z");
    return {*x, *y, *z};
}

inline PrivateInputs resolve_inputs(const RunSpec& spec) {
    const auto n = spec.config.n;
    if (!spec.inputs_file.empty()) return read_inputs_file(spec.inputs_file, n);
    PrivateInputs in = seeded_inputs(spec.config);
    if (spec.x) in.x = parse_bits(*spec.x, n);
    if (spec.y) in.y = parse_bits(*spec.y, n);
    if (spec.z) in.z = parse_bits(*spec.z, n);
    return in;
}

inline int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    spec.config.validate();
    const auto inputs = resolve_inputs(spec);
    Adversary adversary;
    if (spec.attack)
        adversary = make_adversary(*spec.attack, derive_seed(spec.config.seed, stream_label::kAdversary), spec.target);
    const auto outcome = run_session(spec.config, inputs, adversary);
    for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';

    Json report = session_report(spec.config, outcome);
    if (spec.attack) report["attack"] = std::string(to_token(*spec.attack));
    if (!spec.transcript_path.empty()) write_atomically(spec.transcript_path, outcome.transcript.to_jsonl());
    emit(spec, report.dump(2) + "\n", out);
    return outcome.completed() ? kOk : kAbortOrDisagree;
}

inline int cmd_attack(const RunSpec& spec, std::ostream& out, std::ostream&) {
    if (!spec.attack) throw ConfigError("attack: --kind is required");
    const auto result =
        monte_carlo_detection(*spec.attack, spec.config, spec.trials, spec.config.seed, {spec.target, spec.workers});
    emit(spec, spec.format == "csv" ? campaign_csv(result) : campaign_report(result).dump(2) + "\n", out);
    return result.agrees() ? kOk : kAbortOrDisagree;
}

inline int cmd_oracle(const RunSpec& spec, std::ostream& out, std::ostream&) {
    emit(spec, spec.format == "csv" ? oracle_csv() : oracle_report().dump(2) + "\n", out);
    return kOk;
}

inline int cmd_efficiency(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const auto eff = qubit_efficiency(spec.config);
    const auto base = baseline_efficiency(spec.baseline);
    if (spec.format == "csv") {
        std::ostringstream os;
        os << "n,lambda,epsilon,gamma,v,q,f,eta,baseline_eta,dominates\n"
           << spec.config.n << ',' << spec.config.lambda << ',' << spec.config.epsilon << ','
           << Json(spec.config.gamma).dump() << ',' << eff.v << ',' << eff.q << ',' << eff.f << ',' << eff.eta << ','
           << base << ',' << (efficiency_dominates(spec.config, spec.baseline) ? "true" : "false") << '\n';
        emit(spec, os.str(), out);
        return kOk;
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(spec.config);
    j["efficiency"] = to_json(eff);
    j["baseline"] = {{"r", spec.baseline.r}, {"d", spec.baseline.d}, {"delta", spec.baseline.delta},
                     {"eta", base.str()}, {"eta_value", base.value()}};
    j["dominates"] = efficiency_dominates(spec.config, spec.baseline);
    emit(spec, j.dump(2) + "\n", out);
    return kOk;
}

struct SweepRow {
    SessionConfig config;
    Efficiency efficiency;
    bool dominates = false;
    std::vector<std::pair<AttackKind, double>> closed_forms;
    std::optional<CampaignResult> campaign;
};

inline std::vector<SweepRow> sweep_rows(const RunSpec& spec) {
    std::vector<SweepRow> rows;
    for (auto lambda : spec.lambdas)
        for (auto epsilon : spec.epsilons)
            for (auto gamma : spec.gammas) {
                SweepRow row;
                row.config = spec.config;
                row.config.lambda = lambda;
                row.config.epsilon = epsilon;
                row.config.gamma = gamma;
                row.config.validate();
                row.efficiency = qubit_efficiency(row.config);
                row.dominates = efficiency_dominates(row.config, spec.baseline);
                for (auto k : kAllAttacks) {
                    if (k == AttackKind::AliceAttackIISilent) continue;
                    const auto p = enumerate_event_probability(k, primary_event(k));
                    row.closed_forms.emplace_back(k, whole_run_detection(p, whole_run_events(k, row.config, spec.target)));
                }
                if (spec.attack)
                    row.campaign = monte_carlo_detection(*spec.attack, row.config, spec.trials, spec.config.seed,
                                                         {spec.target, spec.workers});
                rows.push_back(std::move(row));
            }
    return rows;
}

inline int cmd_sweep(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const auto rows = sweep_rows(spec);
    const auto base = baseline_efficiency(spec.baseline);
    bool agree = true;
    for (const auto& r : rows)
        if (r.campaign) agree = agree && r.campaign->agrees();

    if (spec.format == "csv") {
        std::ostringstream os;
        os << "n,lambda,epsilon,gamma,v,q,f,eta,eta_value,baseline_eta,dominates";
        for (auto k : kAllAttacks)
            if (k != AttackKind::AliceAttackIISilent) os << ",detect_" << to_token(k);
        if (spec.attack) os << ",mc_attack,mc_per_event,mc_whole_run,mc_agrees";
        os << '\n';
        for (const auto& r : rows) {
            os << r.config.n << ',' << r.config.lambda << ',' << r.config.epsilon << ',' << Json(r.config.gamma).dump()
               << ',' << r.efficiency.v << ',' << r.efficiency.q << ',' << r.efficiency.f << ',' << r.efficiency.eta
               << ',' << Json(r.efficiency.eta.value()).dump() << ',' << base << ','
               << (r.dominates ? "true" : "false");
            for (const auto& [k, v] : r.closed_forms) os << ',' << Json(v).dump();
            if (r.campaign)
                os << ',' << to_token(r.campaign->attack) << ',' << Json(r.campaign->per_event.mc_estimate).dump() << ','
                   << Json(r.campaign->whole_run.mc_estimate).dump() << ','
                   << (r.campaign->agrees() ? "true" : "false");
            os << '\n';
        }
        emit(spec, os.str(), out);
    } else {
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["baseline"] = {{"r", spec.baseline.r}, {"d", spec.baseline.d}, {"delta", spec.baseline.delta},
                         {"eta", base.str()}};
        Json arr = Json::array();
        for (const auto& r : rows) {
            Json row;
            row["config"] = to_json(r.config);
            row["efficiency"] = to_json(r.efficiency);
            row["dominates"] = r.dominates;
            Json det = Json::object();
            for (const auto& [k, v] : r.closed_forms) det[std::string(to_token(k))] = v;
            row["whole_run_detection"] = std::move(det);
            if (r.campaign) row["campaign"] = campaign_report(*r.campaign);
            arr.push_back(std::move(row));
        }
        j["rows"] = std::move(arr);
        emit(spec, j.dump(2) + "\n", out);
    }
    return agree ? kOk : kAbortOrDisagree;
}

inline int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        if (spec.format != "json" && spec.format != "csv") throw ConfigError("--format must be json or csv");
        if (spec.trials < 1) throw ConfigError("--trials must be >= 1");
        if (spec.subcommand == "run") return cmd_run(spec, out, err);
        if (spec.subcommand == "attack") return cmd_attack(spec, out, err);
        if (spec.subcommand == "sweep") return cmd_sweep(spec, out, err);
        if (spec.subcommand == "oracle") return cmd_oracle(spec, out, err);
        if (spec.subcommand == "efficiency") return cmd_efficiency(spec, out, err);
        throw ConfigError("unknown subcommand '" + spec.subcommand + "'");
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace semiqsum::cli
