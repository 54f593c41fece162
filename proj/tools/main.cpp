#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using semiqsum::cli::RunSpec;

void add_config_flags(CLI::App& sub, RunSpec& spec) {
    sub.add_option("--n", spec.config.n, "Bits per input string")->capture_default_str();
    sub.add_option("--lambda", spec.config.lambda, "Eavesdropping-check multiplier")->capture_default_str();
    sub.add_option("--epsilon", spec.config.epsilon, "Honesty-check multiplier")->capture_default_str();
    sub.add_option("--gamma", spec.config.gamma, "Extra group multiplier (n*gamma must be integral)")
        ->capture_default_str();
    sub.add_option("--seed", spec.config.seed, "Master seed (SEMIQSUM_SEED overrides)")->capture_default_str();
    sub.add_option("--output", spec.output_path, "Write the report here instead of stdout");
    sub.add_option("--format", spec.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub.add_option("--workers", spec.workers, "Worker threads for campaigns")->capture_default_str();
}

void add_attack_flags(CLI::App& sub, std::string& kind, std::string& leg) {
    sub.add_option("--kind", kind, "measure-resend | intercept-resend | double-cnot | alice-i | alice-ii-silent | "
                                   "alice-ii-random | bob-probe");
    sub.add_option("--leg", leg, "Channel tapped by Eve: b, c or both")
        ->check(CLI::IsMember({"b", "c", "both"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    RunSpec spec;
    std::string kind, leg = "b";

    CLI::App app{"Simulator and security analysis for three-party semiquantum XOR summation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one session and report S and all checks");
    add_config_flags(*run, spec);
    run->add_option("--x", spec.x, "Alice's input (binary, or hex with 0x)");
    run->add_option("--y", spec.y, "Bob's input");
    run->add_option("--z", spec.z, "Charlie's input");
    run->add_option("--inputs-file", spec.inputs_file, "File with X=, Y=, Z= lines");
    run->add_option("--transcript", spec.transcript_path, "Write the event transcript as JSONL");
    run->add_option("--max-check-errors", spec.config.thresholds.max_check_errors, "Tolerated check errors")
        ->capture_default_str();
    run->add_option("--sigma", spec.config.thresholds.summation_rate_sigma, "Summation-rate abort threshold in sigmas")
        ->capture_default_str();
    add_attack_flags(*run, kind, leg);

    auto* attack = app.add_subcommand("attack", "Monte Carlo detection campaign against the exact oracle");
    add_config_flags(*attack, spec);
    add_attack_flags(*attack, kind, leg);
    attack->add_option("--trials", spec.trials, "Sessions to simulate")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Efficiency and detection tables over a parameter grid");
    add_config_flags(*sweep, spec);
    add_attack_flags(*sweep, kind, leg);
    sweep->add_option("--trials", spec.trials, "Sessions per grid point when --kind is given")->capture_default_str();
    sweep->add_option("--lambdas", spec.lambdas, "Grid values for lambda")->delimiter(',')->capture_default_str();
    sweep->add_option("--epsilons", spec.epsilons, "Grid values for epsilon")->delimiter(',')->capture_default_str();
    sweep->add_option("--gammas", spec.gammas, "Grid values for gamma")->delimiter(',')->capture_default_str();
    sweep->add_option("--r", spec.baseline.r, "Baseline r")->capture_default_str();
    sweep->add_option("--d", spec.baseline.d, "Baseline d")->capture_default_str();
    sweep->add_option("--delta", spec.baseline.delta, "Baseline delta")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "Exact per-event detection probabilities");
    oracle->add_option("--output", spec.output_path, "Write the report here instead of stdout");
    oracle->add_option("--format", spec.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* efficiency = app.add_subcommand("efficiency", "Qubit efficiency and baseline comparison");
    add_config_flags(*efficiency, spec);
    efficiency->add_option("--r", spec.baseline.r, "Baseline r")->capture_default_str();
    efficiency->add_option("--d", spec.baseline.d, "Baseline d")->capture_default_str();
    efficiency->add_option("--delta", spec.baseline.delta, "Baseline delta")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : semiqsum::cli::kUsage;
    }

    spec.subcommand = app.get_subcommands().front()->get_name();
    if (const char* env = std::getenv("SEMIQSUM_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            spec.config.seed = std::stoull(env, &used, 0);
            if (env[used] != '\0') throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            std::cerr << "error: SEMIQSUM_SEED must be an unsigned integer\n";
            return semiqsum::cli::kUsage;
        }
    }
    if (!kind.empty()) {
        spec.attack = semiqsum::parse_attack_kind(kind);
        if (!spec.attack) {
            std::cerr << "error: unknown attack kind '" << kind << "'\n";
            return semiqsum::cli::kUsage;
        }
    }
    spec.target = leg == "c" ? semiqsum::TapTarget::C : leg == "both" ? semiqsum::TapTarget::Both : semiqsum::TapTarget::B;

    return semiqsum::cli::dispatch(spec, std::cout, std::cerr);
}
