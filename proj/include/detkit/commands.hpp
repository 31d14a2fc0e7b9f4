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

/**
 * @file
 * Command implementations behind the CLI. Each command consumes a
 * RunConfig and produces a JSON report plus an exit code:
 *   0 success, 2 domain infeasibility, 3 input error, 4 numerical
 * failure. Reports are deterministic functions of (config, seed);
 * wall-clock duration is only added when explicitly requested so that
 * identical runs stay byte-identical.
 */

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "detkit/attack.hpp"
#include "detkit/boundrand.hpp"
#include "detkit/builtins.hpp"
#include "detkit/channel.hpp"
#include "detkit/improved.hpp"
#include "detkit/io.hpp"
#include "detkit/lossy.hpp"
#include "detkit/polytope.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

inline constexpr const char *kVersion = "detkit 0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitNumericalError = 4;

struct RunConfig {
    std::string command;
    std::string behavior = "chsh-tsirelson"; ///< builtin name or file path
    std::vector<double> etas;                ///< one value = uniform profile
    std::vector<int> targets;                ///< 1-based settings, default {1}
    std::int64_t rounds = 0;                 ///< 0 = no Monte-Carlo pass
    std::uint64_t seed = 1;
    double tol = kTableTol;                  ///< table identity tolerance
    double lp_tol = 1e-9;                    ///< LP certificate tolerance
    double bisect_width = 1e-3;
    std::string out;                         ///< report/log destination, empty = stdout
    bool force = false;
    bool timing = false;
    bool critical = false;                   ///< localtest: bisect the threshold
    std::optional<double> alpha;
    std::optional<double> length;
    std::optional<std::int64_t> bases;
    std::optional<int> m_a;
    std::optional<int> g_prime;
};

struct CommandResult {
    int exit_code = kExitOk;
    json report;
};

// ---------------------------------------------------------------------------
// Helpers.
// ---------------------------------------------------------------------------

namespace cli_detail {

inline Behavior resolve_behavior(const std::string &spec) {
    if (spec == "chsh-tsirelson") return chsh_tsirelson();
    if (spec == "magic-square") return magic_square();
    const json j = load_json_file(spec);
    if (j.contains("kind") && j.at("kind") == "quantum_model")
        return born_behavior(quantum_model_from_json(j));
    return behavior_from_json(j);
}

inline EfficiencyProfile resolve_profile(const std::vector<double> &etas, int m_b) {
    if (etas.empty()) throw ArgumentError("missing --eta");
    if (etas.size() == 1) return EfficiencyProfile::uniform(etas[0], m_b);
    EfficiencyProfile p{etas};
    p.validate(m_b);
    return p;
}

inline TargetSet resolve_targets(const std::vector<int> &targets, int m_b) {
    TargetSet t;
    if (targets.empty()) {
        t.settings = {0};
    } else {
        for (int y : targets) t.settings.push_back(y - 1);
    }
    t.validate(m_b);
    return t;
}

inline json config_echo(const RunConfig &c) {
    json j{{"command", c.command}, {"behavior", c.behavior}, {"etas", c.etas},
           {"targets", c.targets}, {"rounds", c.rounds},     {"seed", c.seed},
           {"tol", c.tol},         {"lp_tol", c.lp_tol},     {"force", c.force}};
    if (c.alpha) j["alpha"] = *c.alpha;
    if (c.length) j["length"] = *c.length;
    if (c.bases) j["bases"] = *c.bases;
    if (c.m_a) j["m_a"] = *c.m_a;
    if (c.g_prime) j["g_prime"] = *c.g_prime;
    if (c.critical) j["critical"] = true;
    return j;
}

inline json report_skeleton(const RunConfig &c) {
    json echo = config_echo(c);
    return json{{"command", c.command},
                {"config", echo},
                {"config_digest", fnv1a_hex(echo.dump())},
                {"version", kVersion}};
}

struct McSummary {
    double target_guess_rate = 0.0;
    double overall_guess_rate = 0.0;
    double max_se_distance = 0.0;
    std::int64_t rounds = 0;
};

/// Compares empirical per-setting-pair cell frequencies against the
/// exact lossy table, in units of the binomial standard error, and
/// tallies Eve's guess record.
inline McSummary summarize_rounds(const std::vector<RoundRecord> &log, const LossyBehavior &exact,
                                  const TargetSet &target) {
    const Scenario &s = exact.scenario();
    const int ext = s.d + 1;
    std::vector<std::int64_t> pair_counts(s.setting_pairs(), 0);
    std::vector<std::int64_t> cell_counts(exact.table().size(), 0);
    std::int64_t target_rounds = 0, target_hits = 0, guesses = 0, hits = 0;

    for (const RoundRecord &r : log) {
        const int x = r.x - 1, y = r.y - 1;
        pair_counts[static_cast<std::size_t>(x) * s.m_b + y]++;
        cell_counts[exact.index(x, y, r.a, r.b)]++;
        const bool guess_ok = r.eve_guess_b == r.b;
        if (r.eve_guess_b != kNotApplicable) {
            guesses++;
            hits += guess_ok;
        }
        if (target.contains(y)) {
            target_rounds++;
            target_hits += guess_ok;
        }
    }

    McSummary out;
    out.rounds = static_cast<std::int64_t>(log.size());
    out.target_guess_rate =
        target_rounds > 0 ? static_cast<double>(target_hits) / target_rounds : 1.0;
    out.overall_guess_rate = guesses > 0 ? static_cast<double>(hits) / guesses : 1.0;
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y) {
            const std::int64_t n = pair_counts[static_cast<std::size_t>(x) * s.m_b + y];
            if (n == 0) continue;
            for (int a = 0; a < ext; ++a)
                for (int b = 0; b < ext; ++b) {
                    const double p = exact.at(x, y, a, b);
                    const double f =
                        static_cast<double>(cell_counts[exact.index(x, y, a, b)]) / n;
                    const double se = std::sqrt(p * (1.0 - p) / n);
                    if (se == 0.0) {
                        // Deterministic cells must match exactly.
                        if (f != p) out.max_se_distance =
                            std::max(out.max_se_distance, std::numeric_limits<double>::infinity());
                        continue;
                    }
                    out.max_se_distance = std::max(out.max_se_distance, std::abs(f - p) / se);
                }
        }
    return out;
}

inline json to_json(const McSummary &m) {
    return json{{"rounds", m.rounds},
                {"target_guess_rate", m.target_guess_rate},
                {"overall_guess_rate", m.overall_guess_rate},
                {"max_se_distance", m.max_se_distance}};
}

} // namespace cli_detail

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

inline CommandResult cmd_attack(const RunConfig &config) {
    const Behavior q = cli_detail::resolve_behavior(config.behavior);
    const Scenario &s = q.scenario();
    const EfficiencyProfile profile = cli_detail::resolve_profile(config.etas, s.m_b);
    const TargetSet target = cli_detail::resolve_targets(config.targets, s.m_b);

    json report = cli_detail::report_skeleton(config);
    const FeasibilityVerdict verdict = feasible(profile, target);
    report["feasible"] = verdict.feasible;
    report["margin"] = verdict.margin;
    report["eta_prime"] = verdict.eta_prime;
    report["target_eta_sum"] = verdict.target_sum;
    if (!verdict.feasible)
        return {config.force ? kExitOk : kExitInfeasible, report};

    const AttackPlan plan = build_plan(profile, target);
    json taus = json::array();
    for (int y = 0; y < plan.m_b; ++y)
        if (!target.contains(y)) taus.push_back(json::array({y + 1, plan.taus[y]}));
    report["plan"] = json{{"branch_probs", plan.branch_probs},
                          {"residual_prob", plan.residual_prob},
                          {"taus", taus}};

    const LossyBehavior induced = induced_behavior(plan, q);
    const LossyBehavior expected = apply_loss_bob(q, profile);
    double dev = 0.0;
    for (std::size_t i = 0; i < induced.table().size(); ++i)
        dev = std::max(dev, std::abs(induced.table()[i] - expected.table()[i]));
    report["table_deviation"] = dev;
    report["invisible"] = dev <= config.tol;

    json guesses = json::array();
    for (int y = 0; y < s.m_b; ++y)
        guesses.push_back(json::array({y + 1, guessing_probability(plan, q, y)}));
    report["guessing_probability"] = guesses;

    if (config.rounds > 0) {
        const auto log = simulate_rounds(plan, q, config.rounds, config.seed);
        report["monte_carlo"] =
            cli_detail::to_json(cli_detail::summarize_rounds(log, expected, target));
    }
    return {kExitOk, report};
}

inline CommandResult cmd_improved(const RunConfig &config) {
    const Behavior q = cli_detail::resolve_behavior(config.behavior);
    const Scenario &s = q.scenario();
    const TargetSet target = cli_detail::resolve_targets(config.targets, s.m_b);
    const int g_prime = g_prime_for(static_cast<int>(target.settings.size()), s.m_b);
    const double eta_crit = critical_eta_improved(s.m_a, g_prime);
    const double eta = config.etas.empty() ? eta_crit : config.etas.at(0);

    const ImprovedPlan plan = make_improved_plan(s.m_a, s.m_b, target, eta);
    json report = cli_detail::report_skeleton(config);
    report["g_prime"] = plan.g_prime;
    report["eta_critical"] = plan.eta_crit;
    report["eta"] = plan.eta;
    report["q_mix"] = plan.q_mix;
    report["r_click"] = plan.r_click;
    report["survival"] = plan.survival;

    const LossyBehavior induced = induced_joint(plan, q);
    const LossyBehavior expected = apply_loss_both(q, plan.eta);
    double dev = 0.0;
    for (std::size_t i = 0; i < induced.table().size(); ++i)
        dev = std::max(dev, std::abs(induced.table()[i] - expected.table()[i]));
    report["table_deviation"] = dev;
    report["invisible"] = dev <= config.tol;

    json guesses = json::array();
    for (int y = 0; y < s.m_b; ++y)
        guesses.push_back(json::array({y + 1, guessing_probability_improved(plan, q, y)}));
    report["guessing_probability"] = guesses;

    if (config.rounds > 0) {
        const auto log = simulate_rounds_improved(plan, q, config.rounds, config.seed);
        report["monte_carlo"] =
            cli_detail::to_json(cli_detail::summarize_rounds(log, expected, target));
    }
    return {kExitOk, report};
}

inline CommandResult cmd_boundrand(const RunConfig &config) {
    const Behavior q = cli_detail::resolve_behavior(config.behavior);
    const double eta = config.etas.empty() ? 0.5 : config.etas.at(0);
    const BoundRandomnessCertificate cert =
        certify_bound_randomness(q, eta, config.tol, config.lp_tol);

    json report = cli_detail::report_skeleton(config);
    report["eta"] = cert.eta;
    report["marginal_reproduction_residual"] = cert.eq_marginal_residual;
    report["no_signalling"] = to_json(cert.no_signalling);
    report["min_guess_success"] = cert.min_guess_success;
    report["nonlocal"] = cert.nonlocal;
    report["locality_certificate"] = to_json(cert.locality);
    report["bound_randomness"] = cert.pass ? "PASS" : "FAIL";
    return {kExitOk, report};
}

inline CommandResult cmd_localtest(const RunConfig &config) {
    const Behavior q = cli_detail::resolve_behavior(config.behavior);
    json report = cli_detail::report_skeleton(config);

    if (config.critical) {
        const CriticalEtaResult res =
            critical_local_eta(q, config.bisect_width, config.lp_tol);
        report["has_transition"] = res.has_transition;
        if (res.has_transition) {
            report["critical_eta"] = res.eta;
            report["bracket"] = json::array({res.local_below, res.nonlocal_above});
        }
        return {kExitOk, report};
    }

    const double eta = config.etas.empty() ? 1.0 : config.etas.at(0);
    const LossyBehavior lossy = apply_loss_both(q, eta);
    const LocalityCertificate cert = is_local(lossy, config.lp_tol);
    report["eta"] = eta;
    report["certificate"] = to_json(cert);
    report["local"] = cert.local;
    return {kExitOk, report};
}

inline CommandResult cmd_plan(const RunConfig &config) {
    json report = cli_detail::report_skeleton(config);
    if (config.alpha && config.length) {
        const ChannelModel model{*config.alpha, *config.length};
        const double eta_c = channel_efficiency(model);
        report["eta_c"] = eta_c;
        report["min_bases"] = min_bases(model);
    }
    if (config.alpha && config.bases) {
        const double d = max_distance(*config.alpha, *config.bases);
        report["max_distance_km"] =
            std::isinf(d) ? json("unbounded") : json(d);
    }
    if (config.bases) {
        // Threshold for guessing all `bases` key measurements out of a
        // larger setting pool: 1/(bases + 1).
        const int g = static_cast<int>(std::max<std::int64_t>(*config.bases, 1));
        report["primary_eta_critical"] = critical_efficiency(g, g + 1);
    }
    if (config.m_a && config.g_prime)
        report["improved_eta_critical"] = critical_eta_improved(*config.m_a, *config.g_prime);
    return {kExitOk, report};
}

inline CommandResult cmd_simulate(const RunConfig &config, std::ostream *log_sink) {
    const Behavior q = cli_detail::resolve_behavior(config.behavior);
    const Scenario &s = q.scenario();
    const EfficiencyProfile profile = cli_detail::resolve_profile(config.etas, s.m_b);
    const TargetSet target = cli_detail::resolve_targets(config.targets, s.m_b);
    const AttackPlan plan = build_plan(profile, target);
    const std::int64_t rounds = config.rounds > 0 ? config.rounds : 1000;

    const auto log = simulate_rounds(plan, q, rounds, config.seed);
    if (log_sink) write_round_log(*log_sink, log);

    json report = cli_detail::report_skeleton(config);
    report["monte_carlo"] = cli_detail::to_json(
        cli_detail::summarize_rounds(log, apply_loss_bob(q, profile), target));
    return {kExitOk, report};
}

/// Dispatches a command and maps exceptions onto the exit-code
/// contract. `log_sink` receives the JSONL round log of `simulate`.
inline CommandResult run_command(const RunConfig &config, std::ostream *log_sink = nullptr) {
    const auto started = std::chrono::steady_clock::now();
    CommandResult result;
    try {
        if (config.command == "attack")
            result = cmd_attack(config);
        else if (config.command == "improved")
            result = cmd_improved(config);
        else if (config.command == "boundrand")
            result = cmd_boundrand(config);
        else if (config.command == "localtest")
            result = cmd_localtest(config);
        else if (config.command == "plan")
            result = cmd_plan(config);
        else if (config.command == "simulate")
            result = cmd_simulate(config, log_sink);
        else
            throw ArgumentError("unknown command: " + config.command);
    } catch (const InfeasibleError &e) {
        result.exit_code = kExitInfeasible;
        result.report = cli_detail::report_skeleton(config);
        result.report["error"] = json{{"type", "infeasible"}, {"message", e.what()},
                                      {"margin", e.margin}};
    } catch (const ParseError &e) {
        result.exit_code = kExitInputError;
        result.report = cli_detail::report_skeleton(config);
        result.report["error"] = json{{"type", "parse"}, {"message", e.what()}};
    } catch (const ArgumentError &e) {
        result.exit_code = kExitInputError;
        result.report = cli_detail::report_skeleton(config);
        result.report["error"] = json{{"type", "argument"}, {"message", e.what()}};
    } catch (const NumericalError &e) {
        result.exit_code = kExitNumericalError;
        result.report = cli_detail::report_skeleton(config);
        result.report["error"] = json{{"type", "numerical"}, {"message", e.what()},
                                      {"residual", e.residual}};
    }
    if (config.timing) {
        const auto elapsed = std::chrono::steady_clock::now() - started;
        result.report["duration_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    }
    return result;
}

} // namespace detkit
