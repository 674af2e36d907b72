// vnlab: command-line front end to the experiment harness.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vnlab/harness.hpp"

namespace h = vnlab::harness;
using h::json;

namespace {

using List = std::vector<std::int64_t>;

struct Invocation {
  std::string command;
  json params = json::object();
  std::optional<h::Format> default_format;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  int jobs = 1;
  std::string fixtures;
};

void int_opt(CLI::App* app, Invocation* inv, const std::string& flag, const std::string& key,
             const std::string& help, bool required = false) {
  auto* o = app->add_option_function<std::int64_t>(flag, [inv, key](const std::int64_t& v) { inv->params[key] = v; },
                                                   help);
  if (required) o->required();
}

void list_opt(CLI::App* app, Invocation* inv, const std::string& flag, const std::string& key,
              const std::string& help) {
  app->add_option_function<List>(flag, [inv, key](const List& v) { inv->params[key] = v; }, help)
      ->delimiter(',')
      ->allow_extra_args(false);
}

void str_opt(CLI::App* app, Invocation* inv, const std::string& flag, const std::string& key,
             const std::string& help, bool required = false) {
  auto* o = app->add_option_function<std::string>(flag, [inv, key](const std::string& v) { inv->params[key] = v; },
                                                  help);
  if (required) o->required();
}

// Options of each command; `inv` collects them into the params object.
void add_options(const std::string& command, CLI::App* app, Invocation* inv) {
  if (command == "apgroup.verify") {
    list_opt(app, inv, "--A", "A", "spacing set, e.g. 1,3,4");
    int_opt(app, inv, "--rmax", "rmax", "check all r with |r| <= rmax");
  } else if (command == "apgroup.classify") {
    list_opt(app, inv, "--r", "r", "nonzero r values, e.g. 1,2,3");
  } else if (command == "k4") {
    list_opt(app, inv, "--A", "A", "spacing set");
    int_opt(app, inv, "--nmax", "nmax", "sweep |n| <= nmax");
    app->add_flag_function("--perturbed", [inv](std::int64_t) { inv->params["perturbed"] = true; },
                           "use a = 1 + eps sum (e_i + e_i*) in every slot");
    app->add_option_function<double>("--eps", [inv](const double& v) { inv->params["eps"] = v; }, "perturbation size");
  } else if (command == "behrend.build") {
    int_opt(app, inv, "--d", "d", "modulus", true);
    int_opt(app, inv, "--R", "R", "digit bound", true);
    int_opt(app, inv, "--dim", "dim", "number of digits", true);
  } else if (command == "behrend.stats") {
    str_opt(app, inv, "--set", "set", "JSON file with d and F", true);
  } else if (command == "negx.search") {
    int_opt(app, inv, "--d", "d", "odd modulus", true);
    int_opt(app, inv, "--max-draws", "max_draws", "sign draws before giving up");
    int_opt(app, inv, "--R", "R", "use behrend_set(d, R, dim) instead of a greedy set");
    int_opt(app, inv, "--dim", "dim", "Behrend digit count");
    app->add_flag_function("--no-local-search", [inv](std::int64_t) { inv->params["local_search"] = false; },
                           "plain random draws only");
  } else if (command == "negns" || command == "negtrace") {
    int_opt(app, inv, "--d", "d", "expected modulus of the fixture");
    str_opt(app, inv, "--E,--fixture", "fixture", "negav_E fixture (path or name)");
    if (command == "negtrace") list_opt(app, inv, "--N", "N", "N values, e.g. 8,16,32");
  } else if (command == "nctorus") {
    int_opt(app, inv, "--d", "d", "expected modulus of the fixture");
    str_opt(app, inv, "--fixture", "fixture", "sign_vector fixture (path or name)");
    list_opt(app, inv, "--M", "M", "M values (default: the fixture's)");
    int_opt(app, inv, "--N", "N", "Cesaro length");
  } else if (command == "fixture.build") {
    str_opt(app, inv, "--kind", "kind", "negav_E | sign_vector | slop3_solutions", true);
    int_opt(app, inv, "--d", "d", "modulus");
    int_opt(app, inv, "--iterations", "iterations", "annealing steps (negav_E)");
    int_opt(app, inv, "--max-seeds", "max_seeds", "E-seed budget (negav_E)");
    int_opt(app, inv, "--n-scan", "n_scan", "largest N scanned for the has_sum threshold (negav_E)");
    int_opt(app, inv, "--max-draws", "max_draws", "sign draws (sign_vector)");
    list_opt(app, inv, "--M", "M", "M values (sign_vector)");
    list_opt(app, inv, "--r", "r", "r values (slop3_solutions)");
    list_opt(app, inv, "--F", "F", "progression-free set (sign_vector; default greedy from --seed)");
    str_opt(app, inv, "--save", "save", "write the fixture to this path");
  } else if (command == "fixture.verify") {
    str_opt(app, inv, "--path", "path", "one fixture; default: every fixture in the directory");
  }
}

// Grouped spelling: "apgroup.verify" -> apgroup verify; single names take "demo".
std::pair<std::string, std::string> grouped(const std::string& command) {
  const auto dot = command.find('.');
  if (dot != std::string::npos) return {command.substr(0, dot), command.substr(dot + 1)};
  return {command, command == "selftest" ? "" : "demo"};
}

int emit(const h::Report& report, const Globals& g, h::Format format) {
  const std::string text = format == h::Format::Csv ? report.to_csv() : report.to_json().dump(2) + "\n";
  if (!g.out.empty() && g.out != "json" && g.out != "csv") {
    std::ofstream f(g.out);
    if (!f) {
      std::cerr << "error: cannot write " << g.out << "\n";
      return 2;
    }
    f << text;
  } else {
    std::cout << text;
  }
  for (const auto& c : report.checks) std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vnlab: experiments on square groups, matrix systems and the noncommutative torus"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output path, or json/csv as a format shorthand");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--fixtures", g.fixtures, "fixture directory (default: VNLAB_FIXTURES)");

  std::vector<std::unique_ptr<Invocation>> invocations;
  Invocation* chosen = nullptr;
  auto bind = [&](CLI::App* sub, const std::string& command, std::optional<h::Format> fmt) {
    invocations.push_back(std::make_unique<Invocation>(Invocation{command, json::object(), fmt}));
    Invocation* inv = invocations.back().get();
    add_options(command, sub, inv);
    sub->callback([&chosen, inv] { chosen = inv; });
  };

  std::map<std::string, CLI::App*> groups;
  for (const auto& command : h::command_names()) {
    const auto [group, leaf] = grouped(command);
    if (leaf.empty()) {
      bind(app.add_subcommand(group, "run " + command), command, std::nullopt);
      continue;
    }
    if (!groups.count(group)) groups[group] = app.add_subcommand(group, group + " commands")->require_subcommand(1);
    bind(groups[group]->add_subcommand(leaf, "run " + command), command,
         command == "k4" ? std::optional(h::Format::Csv) : std::nullopt);
  }
  auto* run = app.add_subcommand("run", "run a command by name, e.g. run k4 or run apgroup.verify");
  run->require_subcommand(1);
  for (const auto& command : h::command_names())
    bind(run->add_subcommand(command, "run " + command), command,
         command == "k4" ? std::optional(h::Format::Csv) : std::nullopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (!chosen) {
    std::cerr << "error: no command given\n";
    return 2;
  }

  h::ExperimentConfig config;
  config.command = chosen->command;
  config.params = chosen->params;
  config.seed = g.seed;
  config.jobs = g.jobs;
  config.fixture_dir = g.fixtures;
  config.format = chosen->default_format.value_or(h::Format::Json);
  if (g.out == "csv" || g.format == "csv") config.format = h::Format::Csv;
  if (g.out == "json" || g.format == "json") config.format = h::Format::Json;

  try {
    return emit(h::run(config), g, config.format);
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const h::FixtureVerificationFailed& e) {
    std::cerr << "fixture verification failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
