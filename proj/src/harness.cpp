#include "contact/harness.hpp"

#include "contact/bea.hpp"
#include "contact/error.hpp"
#include "contact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace contact {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using json = nlohmann::json;

bool integral_ratio(double t, double h) {
  const double n = t / h;
  return std::abs(n - std::round(n)) <= 1e-9 && std::round(n) >= 1.0;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

std::string describe_cell(StepperId method, double alpha) {
  std::ostringstream os;
  os << "method=" << to_string(method) << " alpha=" << alpha;
  return os.str();
}

Scenario parse_scenario(const std::string& s) {
  if (s == "damped") return Scenario::Damped;
  if (s == "forced") return Scenario::Forced;
  throw InvalidArgument("unknown scenario '" + s + "'");
}

MomentumInit parse_momentum_init(const std::string& s) {
  if (s == "contact_p") return MomentumInit::ContactP;
  if (s == "leapfrog_pi") return MomentumInit::LeapfrogPi;
  throw InvalidArgument("unknown momentum_init '" + s + "'");
}

VncStart parse_vnc_start(const std::string& s) {
  if (s == "exact") return VncStart::Exact;
  if (s == "taylor") return VncStart::Taylor;
  throw InvalidArgument("unknown vnc_start '" + s + "'");
}

StepperId parse_method(const std::string& s) {
  if (const auto id = parse_stepper(s)) return *id;
  throw InvalidArgument("unknown method '" + s + "'");
}

std::vector<BenchmarkRecord> run_cell(const BenchmarkConfig& config, StepperId method,
                                      double alpha) {
  const OscillatorSystem sys = system_for(method, config, alpha);
  const ContactState init = initial_state(config, method, sys);
  const std::size_t n = config.n_steps();
  IntegrateOptions opts;
  if (method == StepperId::VNC && config.vnc_start == VncStart::Exact) {
    opts.vnc_x1 = Vector::Constant(1, exact_solution(config, alpha, config.h).x);
  }
  const Trajectory traj = integrate(method, sys, init, config.h, n, opts);

  std::vector<BenchmarkRecord> out;
  out.reserve(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    BenchmarkRecord r;
    r.method = method;
    r.alpha = alpha;
    r.h = config.h;
    r.t = traj.time(j);
    r.x_num = traj.states[j].x[0];
    r.x_exact = exact_solution(config, alpha, r.t).x;
    r.err = error_metric(r.x_num, r.x_exact);
    r.H_num = traj.hamiltonian[j];
    out.push_back(r);
  }
  return out;
}

BenchmarkRecord error_row(StepperId method, double alpha, double h) {
  return BenchmarkRecord{method, alpha, h, kNaN, kNaN, kNaN, kNaN, kNaN};
}

void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  out += buf;
}

void write_file(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

json method_list(const std::vector<StepperId>& methods) {
  json a = json::array();
  for (StepperId m : methods) a.push_back(std::string(to_string(m)));
  return a;
}

}  // namespace

std::string_view to_string(Scenario scenario) noexcept {
  return scenario == Scenario::Damped ? "damped" : "forced";
}

std::string_view to_string(MomentumInit init) noexcept {
  return init == MomentumInit::ContactP ? "contact_p" : "leapfrog_pi";
}

std::string_view to_string(VncStart start) noexcept {
  return start == VncStart::Exact ? "exact" : "taylor";
}

std::size_t BenchmarkConfig::n_steps() const {
  return static_cast<std::size_t>(std::round(t_final / h));
}

void BenchmarkConfig::validate(Command command) const {
  require(!alpha_list.empty(), "alpha_list is empty");
  for (double a : alpha_list) require(std::isfinite(a) && a >= 0.0, "alpha must be >= 0");
  require(std::isfinite(x0) && std::isfinite(p0) && std::isfinite(z0),
          "initial state must be finite");
  require(std::isfinite(t_final) && t_final > 0.0, "t_final must be positive");
  require(!methods.empty(), "no methods selected");

  if (scenario == Scenario::Forced ||
      std::find(methods.begin(), methods.end(), StepperId::Contact2Forced) != methods.end()) {
    require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
    require(std::isfinite(omega), "omega must be finite");
    for (double a : alpha_list) {
      require(!(a == 0.0 && omega == 1.0), "resonant forcing: alpha = 0 with omega = 1");
    }
  }

  switch (command) {
    case Command::Simulate:
    case Command::Benchmark:
      require(std::isfinite(h) && h > 0.0, "h must be positive");
      require(integral_ratio(t_final, h), "t_final / h must be an integer");
      for (StepperId m : methods) {
        require(m != StepperId::ContactQuadZ,
                "ContactQuadZ has no closed-form reference solution to benchmark against");
        require(!(scenario == Scenario::Forced &&
                  (m == StepperId::Contact1 || m == StepperId::Contact2)),
                std::string(to_string(m)) + " does not support forcing");
      }
      break;
    case Command::ContactCheck:
      require(n_states >= 1, "n_states must be >= 1");
      require(std::isfinite(fd_eps) && fd_eps > 0.0, "fd_eps must be positive");
      for (StepperId m : methods) require(m != StepperId::VNC, "VNC has no one-step map");
      break;
    case Command::Bea:
      require(scenario == Scenario::Damped, "bea supports the damped scenario only");
      require(h_list.size() >= 3, "bea needs at least three step sizes");
      for (StepperId m : methods) {
        require(m == StepperId::Contact1 || m == StepperId::Contact2,
                "bea supports Contact1 and Contact2 only");
      }
      break;
    case Command::Convergence:
      require(h_list.size() >= 2, "convergence needs at least two step sizes");
      for (StepperId m : methods) {
        require(m != StepperId::ContactQuadZ,
                "ContactQuadZ has no closed-form reference solution");
      }
      break;
  }
  if (command == Command::ContactCheck || command == Command::Bea ||
      command == Command::Convergence) {
    require(!h_list.empty(), "h_list is empty");
    for (double hh : h_list) {
      require(std::isfinite(hh) && hh > 0.0, "h_list entries must be positive");
      if (command != Command::ContactCheck) {
        require(integral_ratio(t_final, hh), "t_final / h must be an integer for every h");
      }
    }
  }
}

std::vector<StepperId> default_methods(Command command, Scenario scenario) {
  const bool forced = scenario == Scenario::Forced;
  switch (command) {
    case Command::Simulate:
    case Command::Benchmark:
    case Command::Convergence:
      if (forced) {
        return {StepperId::Contact2Forced, StepperId::Leapfrog, StepperId::Ruth3, StepperId::RK4,
                StepperId::VNC};
      }
      return {StepperId::Contact1, StepperId::Contact2, StepperId::Leapfrog,
              StepperId::Ruth3,    StepperId::RK4,      StepperId::VNC};
    case Command::ContactCheck:
      if (forced) return {StepperId::Contact2Forced, StepperId::Ruth3, StepperId::RK4};
      return {StepperId::Contact1,       StepperId::Contact2, StepperId::ContactQuadZ,
              StepperId::Contact2Forced, StepperId::Ruth3,    StepperId::RK4};
    case Command::Bea:
      return {StepperId::Contact1, StepperId::Contact2};
  }
  return {};
}

BenchmarkConfig default_config(Command command) {
  BenchmarkConfig c;
  switch (command) {
    case Command::Simulate:
    case Command::Benchmark:
      break;
    case Command::ContactCheck:
      c.alpha_list = {0.1, 0.5};
      c.h_list = {0.2, 0.1, 0.05};
      break;
    case Command::Bea:
      c.alpha_list = {0.5};
      c.t_final = 1.0;
      c.h_list = {0.2, 0.1, 0.05, 0.025};
      break;
    case Command::Convergence:
      c.alpha_list = {0.5};
      c.t_final = 1.0;
      c.h_list = {0.1, 0.05, 0.025, 0.0125};
      c.x0 = 1.0;
      c.p0 = 1.0;
      break;
  }
  return c;
}

BenchmarkConfig resolve(BenchmarkConfig config, Command command) {
  if (config.methods.empty()) config.methods = default_methods(command, config.scenario);
  return config;
}

BenchmarkConfig config_from_json(const json& j, BenchmarkConfig c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "scenario") {
        c.scenario = parse_scenario(value.get<std::string>());
      } else if (key == "alpha_list") {
        c.alpha_list = value.get<std::vector<double>>();
      } else if (key == "h") {
        c.h = value.get<double>();
      } else if (key == "t_final") {
        c.t_final = value.get<double>();
      } else if (key == "beta") {
        c.beta = value.get<double>();
      } else if (key == "omega") {
        c.omega = value.get<double>();
      } else if (key == "methods") {
        c.methods.clear();
        for (const auto& m : value.get<std::vector<std::string>>()) {
          c.methods.push_back(parse_method(m));
        }
      } else if (key == "x0") {
        c.x0 = value.get<double>();
      } else if (key == "p0") {
        c.p0 = value.get<double>();
      } else if (key == "z0") {
        c.z0 = value.get<double>();
      } else if (key == "momentum_init") {
        c.momentum_init = parse_momentum_init(value.get<std::string>());
      } else if (key == "vnc_start") {
        c.vnc_start = parse_vnc_start(value.get<std::string>());
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "h_list") {
        c.h_list = value.get<std::vector<double>>();
      } else if (key == "n_states") {
        c.n_states = value.get<int>();
      } else if (key == "fd_eps") {
        c.fd_eps = value.get<double>();
      } else {
        throw InvalidArgument("unknown config field '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw InvalidArgument("config field '" + key + "': " + e.what());
    }
  }
  return c;
}

json to_json(const BenchmarkConfig& c) {
  return json{{"scenario", std::string(to_string(c.scenario))},
              {"alpha_list", c.alpha_list},
              {"h", c.h},
              {"t_final", c.t_final},
              {"beta", c.beta},
              {"omega", c.omega},
              {"methods", method_list(c.methods)},
              {"x0", c.x0},
              {"p0", c.p0},
              {"z0", c.z0},
              {"momentum_init", std::string(to_string(c.momentum_init))},
              {"vnc_start", std::string(to_string(c.vnc_start))},
              {"seed", c.seed},
              {"h_list", c.h_list},
              {"n_states", c.n_states},
              {"fd_eps", c.fd_eps}};
}

OscillatorSystem system_for(StepperId method, const BenchmarkConfig& config, double alpha) {
  if (method == StepperId::ContactQuadZ) return OscillatorSystem::quadratic(alpha);
  if (method == StepperId::Contact2Forced || config.scenario == Scenario::Forced) {
    return OscillatorSystem::forced(alpha, config.beta, config.omega);
  }
  return OscillatorSystem::damped(alpha);
}

double error_metric(double x_star, double x) {
  if (!(10.0 + x > 0.1)) {
    std::ostringstream os;
    os << "error metric denominator 10 + x = " << 10.0 + x << " is too close to zero";
    throw DomainError(os.str());
  }
  return (10.0 + x_star) / (10.0 + x) - 1.0;
}

ContactState initial_state(const BenchmarkConfig& config, StepperId method,
                           const OscillatorSystem& sys) {
  ContactState s = make_state(0.0, config.x0, config.p0, config.z0);
  if (method == StepperId::Leapfrog && config.momentum_init == MomentumInit::LeapfrogPi) {
    s.p = leapfrog_momentum_from_contact(sys, s.t, s.x, s.p, config.h);
  }
  return s;
}

PhasePoint exact_solution(const BenchmarkConfig& config, double alpha, double t) {
  if (config.scenario == Scenario::Forced) {
    return exact_forced_solution(alpha, config.beta, config.omega, config.x0, config.p0, t);
  }
  return exact_damped_solution(alpha, config.x0, config.p0, t);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  struct Cell {
    StepperId method;
    double alpha;
    std::future<std::vector<BenchmarkRecord>> result;
  };
  std::vector<Cell> cells;
  for (StepperId m : config.methods) {
    for (double a : config.alpha_list) {
      cells.push_back({m, a, std::async(std::launch::async, run_cell, std::cref(config), m, a)});
    }
  }

  BenchmarkResult out;
  for (Cell& cell : cells) {
    try {
      auto rows = cell.result.get();
      out.records.insert(out.records.end(), rows.begin(), rows.end());
    } catch (const Error& e) {
      out.failures.push_back({cell.method, cell.alpha, e.what()});
      out.records.push_back(error_row(cell.method, cell.alpha, config.h));
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
                     if (a.method != b.method) return a.method < b.method;
                     if (a.alpha != b.alpha) return a.alpha < b.alpha;
                     return a.t < b.t;
                   });
  std::stable_sort(out.failures.begin(), out.failures.end(),
                   [](const CellFailure& a, const CellFailure& b) {
                     if (a.method != b.method) return a.method < b.method;
                     return a.alpha < b.alpha;
                   });
  return out;
}

BenchmarkResult run_simulation(const BenchmarkConfig& config) {
  BenchmarkConfig one = config;
  one.methods.resize(1);
  one.alpha_list.resize(1);
  return run_benchmark(one);
}

double max_abs_error(const BenchmarkResult& result, StepperId method, double alpha) {
  double worst = kNaN;
  for (const BenchmarkRecord& r : result.records) {
    if (r.method != method || r.alpha != alpha) continue;
    if (std::isnan(r.err)) return kNaN;
    worst = std::isnan(worst) ? std::abs(r.err) : std::max(worst, std::abs(r.err));
  }
  return worst;
}

json run_contact_check(const BenchmarkConfig& config) {
  json results = json::array();
  for (StepperId m : config.methods) {
    for (double a : config.alpha_list) {
      const OscillatorSystem sys = system_for(m, config, a);
      for (double h : config.h_list) {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        double max_residual = 0.0;
        double max_deviation = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        for (int i = 0; i < config.n_states; ++i) {
          const double x = unif(rng);
          const double p = unif(rng);
          const double z = unif(rng);
          const ContactState s = make_state(0.0, x, p, z);
          ContactCheckReport r;
          try {
            r = contactness_check(m, sys, s, h, config.fd_eps);
          } catch (const Error& e) {
            std::ostringstream os;
            os << describe_cell(m, a) << " h=" << h << ": " << e.what();
            throw Error(os.str());
          }
          max_residual = std::max(max_residual, r.pullback_residual);
          max_deviation =
              std::max(max_deviation, std::abs(r.measured_factor - r.predicted_factor));
          lo = std::min(lo, r.measured_factor);
          hi = std::max(hi, r.measured_factor);
          sum += r.measured_factor;
        }
        results.push_back({{"method", std::string(to_string(m))},
                           {"alpha", a},
                           {"h", h},
                           {"contact_method", is_contact(m)},
                           {"n_states", config.n_states},
                           {"seed", config.seed},
                           {"fd_eps", config.fd_eps},
                           {"max_pullback_residual", max_residual},
                           {"max_factor_deviation", max_deviation},
                           {"measured_factor_mean", sum / config.n_states},
                           {"measured_factor_spread", hi - lo}});
      }
    }
  }
  return results;
}

json run_bea(const BenchmarkConfig& config) {
  json results = json::array();
  const ContactState init = make_state(0.0, config.x0, config.p0, config.z0);
  for (StepperId m : config.methods) {
    for (double a : config.alpha_list) {
      for (int k = 0; k <= 2; ++k) {
        DefectEstimate d;
        try {
          d = defect_order_estimate(m, k, OscillatorSystem::damped(a), config.h_list,
                                    config.t_final, init);
        } catch (const Error& e) {
          throw Error(describe_cell(m, a) + " k=" + std::to_string(k) + ": " + e.what());
        }
        results.push_back({{"method", std::string(to_string(m))},
                           {"alpha", a},
                           {"k", k},
                           {"slope", d.fit.slope},
                           {"fit_residual", d.fit.fit_residual},
                           {"h_list", d.h_list},
                           {"defects", d.defects},
                           {"x_defects", d.x_defects},
                           {"z_defects", d.z_defects}});
      }
    }
  }
  return results;
}

json run_convergence(const BenchmarkConfig& config) {
  json results = json::array();
  for (StepperId m : config.methods) {
    for (double a : config.alpha_list) {
      const OscillatorSystem sys = system_for(m, config, a);
      const ContactState init = make_state(0.0, config.x0, config.p0, config.z0);
      ConvergenceEstimate est;
      try {
        est = convergence_order_estimate(
            m, sys, [&](double t) { return exact_solution(config, a, t); }, config.h_list,
            config.t_final, init);
      } catch (const Error& e) {
        throw Error(describe_cell(m, a) + ": " + e.what());
      }
      results.push_back({{"method", std::string(to_string(m))},
                         {"alpha", a},
                         {"slope", est.fit.slope},
                         {"fit_residual", est.fit.fit_residual},
                         {"h_list", est.h_list},
                         {"errors", est.errors}});
    }
  }
  return results;
}

json make_report(const BenchmarkConfig& config, json results) {
  return json{{"config", to_json(config)},
              {"results", std::move(results)},
              {"version", std::string(kReportVersion)}};
}

std::string format_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out = "method,alpha,h,t,x_num,x_exact,err,H_num\n";
  for (const BenchmarkRecord& r : records) {
    out += to_string(r.method);
    for (double v : {r.alpha, r.h, r.t, r.x_num, r.x_exact, r.err, r.H_num}) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<BenchmarkRecord>& records, const std::string& path) {
  write_file(format_csv(records), path);
}

void emit_json(const json& report, const std::string& path) {
  write_file(report.dump(2) + "\n", path);
}

}  // namespace contact
