// Copyright 2026 the detkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// detkit command-line front end. Subcommands:
//   attack     run the primary detection-efficiency attack
//   improved   run the two-sided improved attack
//   boundrand  build and certify the bound-randomness box
//   localtest  LP membership in the local polytope (or --critical bisection)
//   plan       channel-loss planning and critical-efficiency formulas
//   simulate   Monte-Carlo round log of the primary attack (JSON lines)
// Reports are JSON on stdout or --out; exit codes: 0 ok, 2 infeasible,
// 3 input error, 4 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "detkit/commands.hpp"

namespace {

void add_common_flags(CLI::App *cmd, detkit::RunConfig &config) {
    cmd->add_option("--behavior", config.behavior,
                    "builtin name (chsh-tsirelson, magic-square) or JSON file path");
    cmd->add_option("--eta", config.etas,
                    "efficiency value(s); one value means a uniform profile")
        ->delimiter(',');
    cmd->add_option("--targets", config.targets, "target settings, 1-based CSV")
        ->delimiter(',');
    cmd->add_option("--rounds", config.rounds, "Monte-Carlo round count");
    cmd->add_option("--seed", config.seed, "simulation seed");
    cmd->add_option("--tol", config.tol, "table identity tolerance");
    cmd->add_option("--lp-tol", config.lp_tol, "LP certificate tolerance");
    cmd->add_option("--out", config.out, "write the report (or round log) to this path");
    cmd->add_flag("--force", config.force, "report infeasibility without failing");
    cmd->add_flag("--timing", config.timing, "include wall-clock duration in the report");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"detection-efficiency attack and bound-randomness toolkit"};
    app.require_subcommand(1);

    detkit::RunConfig config;
    double alpha = 0.0, length = 0.0;
    std::int64_t bases = 0;
    int m_a = 0, g_prime = 0;

    CLI::App *attack = app.add_subcommand("attack", "primary attack on Bob's detectors");
    add_common_flags(attack, config);

    CLI::App *improved = app.add_subcommand("improved", "two-sided improved attack");
    add_common_flags(improved, config);

    CLI::App *boundrand = app.add_subcommand("boundrand", "bound-randomness certification");
    add_common_flags(boundrand, config);

    CLI::App *localtest = app.add_subcommand("localtest", "local-polytope membership");
    add_common_flags(localtest, config);
    localtest->add_flag("--critical", config.critical, "bisect the locality threshold");
    localtest->add_option("--width", config.bisect_width, "bisection bracket width");

    CLI::App *plan = app.add_subcommand("plan", "channel-loss planning");
    add_common_flags(plan, config);
    CLI::Option *opt_alpha = plan->add_option("--alpha", alpha, "attenuation, dB/km");
    CLI::Option *opt_length = plan->add_option("--length", length, "distance, km");
    CLI::Option *opt_bases = plan->add_option("--bases", bases, "number of key bases");
    CLI::Option *opt_ma = plan->add_option("--ma", m_a, "Alice settings for Eq.-style threshold");
    CLI::Option *opt_gp = plan->add_option("--gprime", g_prime, "|G|' for the improved threshold");

    CLI::App *simulate = app.add_subcommand("simulate", "round log of the primary attack");
    add_common_flags(simulate, config);

    CLI11_PARSE(app, argc, argv);

    config.command = app.get_subcommands().front()->get_name();
    if (opt_alpha->count() > 0) config.alpha = alpha;
    if (opt_length->count() > 0) config.length = length;
    if (opt_bases->count() > 0) config.bases = bases;
    if (opt_ma->count() > 0) config.m_a = m_a;
    if (opt_gp->count() > 0) config.g_prime = g_prime;

    detkit::CommandResult result;
    if (config.command == "simulate") {
        // The JSONL log goes to --out when given (report to stdout),
        // otherwise the log itself is the stdout payload.
        if (!config.out.empty()) {
            std::ofstream log_file(config.out);
            if (!log_file) {
                std::cerr << "cannot open " << config.out << " for writing\n";
                return detkit::kExitInputError;
            }
            result = detkit::run_command(config, &log_file);
            std::cout << result.report.dump(2) << std::endl;
        } else {
            result = detkit::run_command(config, &std::cout);
        }
        return result.exit_code;
    }

    result = detkit::run_command(config);
    const std::string payload = result.report.dump(2);
    if (!config.out.empty()) {
        try {
            detkit::write_text_file(config.out, payload + "\n");
        } catch (const detkit::Error &e) {
            std::cerr << e.what() << "\n";
            return detkit::kExitInputError;
        }
    } else {
        std::cout << payload << std::endl;
    }
    return result.exit_code;
}
