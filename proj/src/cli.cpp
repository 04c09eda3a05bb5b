#include "fcc/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fcc/engine.hpp"
#include "fcc/error.hpp"
#include "fcc/parser.hpp"

namespace fcc {

namespace {

struct RunConfig {
  std::string input;
  RunOptions options;
  std::string trace = "pretty";
  bool report = false;
  std::string report_file;
  bool score_history = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Program load(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    throw InvalidArgument(path + ":" + e.what());
  }
}

int exit_code(const Outcome& outcome) {
  return std::visit(
      [](const auto& o) -> int {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, OutcomeSuccess>) return kExitSuccess;
        if constexpr (std::is_same_v<T, OutcomeFail>) return kExitFail;
        if constexpr (std::is_same_v<T, OutcomeDeadlock>) return kExitDeadlock;
        return kExitStepLimit;
      },
      outcome);
}

std::string describe(const Outcome& outcome) {
  std::ostringstream out;
  out << "outcome: " << outcome_name(outcome);
  if (const auto* fail = std::get_if<OutcomeFail>(&outcome)) {
    out << " (agent " << fail->agent << ", rule " << fail->rule << ")";
  }
  if (const auto* dead = std::get_if<OutcomeDeadlock>(&outcome)) {
    out << " (suspended agents";
    for (std::size_t i = 0; i < dead->suspended.size(); ++i) {
      out << (i ? ", " : " ") << dead->suspended[i];
    }
    out << ")";
  }
  return out.str();
}

nlohmann::json outcome_json(const Outcome& outcome) {
  nlohmann::json out{{"outcome", outcome_name(outcome)}};
  if (const auto* fail = std::get_if<OutcomeFail>(&outcome)) {
    out["agent"] = fail->agent;
    out["rule"] = fail->rule;
  }
  if (const auto* dead = std::get_if<OutcomeDeadlock>(&outcome)) {
    out["suspended"] = dead->suspended;
  }
  return out;
}

int do_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Program program = load(config.input);
  RunResult result = Engine(std::move(program), config.options).run();
  if (config.trace == "json") {
    for (const auto& e : result.trace) out << to_json(e).dump() << '\n';
  } else if (config.trace == "pretty") {
    for (const auto& e : result.trace) out << pretty(e) << '\n';
  }
  err << describe(result.outcome) << '\n';
  if (config.report) {
    nlohmann::json report = outcome_json(result.outcome);
    report.update(to_json(result.report, config.score_history));
    report["steps"] = result.trace.size();
    if (config.report_file.empty()) {
      if (config.trace != "off") out << "---\n";
      out << report.dump(2) << '\n';
    } else {
      std::ofstream file(config.report_file);
      if (!file) throw InvalidArgument("cannot write '" + config.report_file + "'");
      file << report.dump(2) << '\n';
    }
  }
  return exit_code(result.outcome);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreter for (soft) concurrent constraint programs with fair parallel "
               "composition"};
  app.require_subcommand(1);

  const std::map<std::string, Mode> modes{{"cc", Mode::Cc}, {"scc", Mode::Scc}};
  const std::map<std::string, FairMode> fair_modes{
      {"none", FairMode::None}, {"crisp", FairMode::Crisp}, {"soft", FairMode::Soft}};
  const std::map<std::string, SoftPolicy> policies{{"min", SoftPolicy::Min},
                                                   {"max", SoftPolicy::Max}};
  const std::map<std::string, ChoicePolicy> choices{{"leftmost", ChoicePolicy::Leftmost},
                                                    {"seeded", ChoicePolicy::Seeded}};

  RunConfig config;
  CLI::App* run = app.add_subcommand("run", "Execute a program and print its trace");
  run->add_option("file", config.input, "Program file")->required();
  run->add_option("--mode", config.options.mode, "Semantics: cc or scc")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  run->add_option("--fair", config.options.fair, "Fair parallel scheduling: none, crisp, soft")
      ->transform(CLI::CheckedTransformer(fair_modes, CLI::ignore_case));
  CLI::Option* soft_select =
      run->add_option("--soft-select", config.options.soft_policy,
                      "Soft selection polarity: min or max blevel first")
          ->transform(CLI::CheckedTransformer(policies, CLI::ignore_case));
  run->add_option("--choice", config.options.choice, "Choice resolution: leftmost or seeded")
      ->transform(CLI::CheckedTransformer(choices, CLI::ignore_case));
  CLI::Option* seed = run->add_option("--seed", config.options.seed, "Seed for --choice seeded");
  run->add_option("--max-steps", config.options.max_steps, "Step limit")
      ->check(CLI::PositiveNumber);
  run->add_option("--trace", config.trace, "Trace format: json, pretty, off")
      ->check(CLI::IsMember({"json", "pretty", "off"}));
  run->add_flag("--report", config.report, "Print the fairness report after the trace");
  run->add_option("--report-file", config.report_file, "Write the report to a file instead");
  run->add_flag("--score-history", config.score_history, "Include score history in the report");

  std::string check_input;
  CLI::App* check = app.add_subcommand("check", "Parse a program and print it back");
  check->add_option("file", check_input, "Program file")->required();

  std::string equiv_input;
  RunOptions equiv_options;
  CLI::App* equiv = app.add_subcommand(
      "equiv", "Compare cc and scc traces of a program without active thresholds");
  equiv->add_option("file", equiv_input, "Program file")->required();
  equiv->add_option("--fair", equiv_options.fair, "Fair parallel scheduling: none, crisp, soft")
      ->transform(CLI::CheckedTransformer(fair_modes, CLI::ignore_case));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (run->parsed()) {
      if (soft_select->count() > 0 && config.options.fair != FairMode::Soft) {
        throw InvalidArgument("--soft-select needs --fair soft");
      }
      bool seeded = config.options.choice == ChoicePolicy::Seeded;
      if (seeded && seed->count() == 0) throw InvalidArgument("--choice seeded needs --seed");
      if (!seeded && seed->count() > 0) {
        throw InvalidArgument("--seed needs --choice seeded");
      }
      if (!config.report_file.empty()) config.report = true;
      return do_run(config, out, err);
    }
    if (check->parsed()) {
      out << print_program(load(check_input));
      return kExitSuccess;
    }
    if (equiv->parsed()) {
      bool same = equivalence_check(load(equiv_input), equiv_options);
      out << (same ? "equivalent" : "different") << '\n';
      return same ? kExitSuccess : kExitFail;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fcc
