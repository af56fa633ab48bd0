#include "contact/error.hpp"
#include "contact/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using contact::BenchmarkConfig;
using contact::Command;

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::vector<double> alphas;
  std::optional<double> h;
  std::optional<double> t_final;
  std::vector<std::string> methods;
  std::optional<std::string> scenario;
};

void add_options(CLI::App* sub, Options& o) {
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--config", o.config_path, "JSON config with BenchmarkConfig field names");
  sub->add_option("--out", o.out_path, "Output file (standard output when omitted)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--alpha", o.alphas, "Damping strength (repeatable)");
  sub->add_option("--h", o.h, "Step size");
  sub->add_option("--t-final", o.t_final, "Final time");
  sub->add_option("--method", o.methods, "Stepper name (repeatable)");
  sub->add_option("--scenario", o.scenario, "damped or forced");
}

BenchmarkConfig build_config(Command command, const Options& o) {
  BenchmarkConfig c = contact::default_config(command);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw contact::IoError("cannot open config '" + o.config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw contact::InvalidArgument("config '" + o.config_path + "': " + e.what());
    }
    c = contact::config_from_json(j, c);
  }
  nlohmann::json overrides = nlohmann::json::object();
  if (o.scenario) overrides["scenario"] = *o.scenario;
  if (!o.alphas.empty()) overrides["alpha_list"] = o.alphas;
  if (o.h) overrides["h"] = *o.h;
  if (o.t_final) overrides["t_final"] = *o.t_final;
  if (!o.methods.empty()) overrides["methods"] = o.methods;
  if (o.seed) overrides["seed"] = *o.seed;
  c = contact::resolve(contact::config_from_json(overrides, c), command);
  c.validate(command);
  return c;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw contact::IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw contact::IoError("failed writing '" + path + "'");
}

int run(Command command, const Options& o) {
  BenchmarkConfig config;
  try {
    config = build_config(command, o);
  } catch (const contact::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (command == Command::Simulate || command == Command::Benchmark) {
      const contact::BenchmarkResult result = command == Command::Simulate
                                                  ? contact::run_simulation(config)
                                                  : contact::run_benchmark(config);
      write_output(contact::format_csv(result.records), o.out_path);
      for (const contact::CellFailure& f : result.failures) {
        std::cerr << "numerical failure: method=" << contact::to_string(f.method)
                  << " alpha=" << f.alpha << ": " << f.message << "\n";
      }
      return result.failures.empty() ? 0 : 2;
    }
    nlohmann::json results;
    switch (command) {
      case Command::ContactCheck: results = contact::run_contact_check(config); break;
      case Command::Bea: results = contact::run_bea(config); break;
      default: results = contact::run_convergence(config); break;
    }
    write_output(contact::make_report(config, std::move(results)).dump(2) + "\n", o.out_path);
    return 0;
  } catch (const contact::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const contact::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact variational integrators: simulation, benchmarks and verification"};
  app.require_subcommand(1);

  struct Entry {
    Command command;
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {Command::Simulate, "simulate", "One trajectory against the exact solution, as CSV"},
      {Command::Benchmark, "benchmark", "Regularised error study over methods and alphas, as CSV"},
      {Command::ContactCheck, "contact-check", "Pullback of the contact form over random states, as JSON"},
      {Command::Bea, "bea", "Modified-equation defect orders, as JSON"},
      {Command::Convergence, "convergence", "Global convergence orders, as JSON"},
  };
  Options options[std::size(entries)];
  CLI::App* subs[std::size(entries)];
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    subs[i] = app.add_subcommand(entries[i].name, entries[i].help);
    add_options(subs[i], options[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    if (subs[i]->parsed()) return run(entries[i].command, options[i]);
  }
  return 1;
}
