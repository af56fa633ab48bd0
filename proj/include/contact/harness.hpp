#pragma once

// Benchmark orchestration: configuration, the regularised error metric,
// per-(method, alpha) trajectory comparisons and CSV / JSON emission.

#include "contact/core.hpp"
#include "contact/integrators.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace contact {

inline constexpr std::string_view kReportVersion = "0.1.0";

enum class Scenario { Damped, Forced };
enum class MomentumInit { ContactP, LeapfrogPi };
/// Second VNC position: exact solution at t0 + h, or the Taylor start.
enum class VncStart { Exact, Taylor };
enum class Command { Simulate, Benchmark, ContactCheck, Bea, Convergence };

struct BenchmarkConfig {
  Scenario scenario = Scenario::Damped;
  std::vector<double> alpha_list{0.01, 0.1, 2.0, 5.0};
  double h = 0.1;
  double t_final = 100.0;
  double beta = 0.5;
  double omega = 0.8;
  /// Empty selects the defaults of the command and scenario.
  std::vector<StepperId> methods;
  double x0 = 1.0;
  double p0 = 0.0;
  double z0 = 0.0;
  MomentumInit momentum_init = MomentumInit::ContactP;
  VncStart vnc_start = VncStart::Exact;
  std::uint64_t seed = 0;
  /// Step sizes of the contact-check, bea and convergence sweeps.
  std::vector<double> h_list{0.2, 0.1, 0.05};
  /// Random states per (method, alpha, h) in contact-check.
  int n_states = 100;
  double fd_eps = 1e-6;

  /// round(t_final / h).
  [[nodiscard]] std::size_t n_steps() const;
  /// Throws InvalidArgument on any violated constraint.
  void validate(Command command) const;
};

/// Defaults per command; contact-check, bea and convergence use short
/// horizons and their own alpha and step lists.
[[nodiscard]] BenchmarkConfig default_config(Command command);

[[nodiscard]] std::vector<StepperId> default_methods(Command command, Scenario scenario);

/// Fills `methods` from default_methods when empty.
[[nodiscard]] BenchmarkConfig resolve(BenchmarkConfig config, Command command);

/// Overlays the fields present in `j` (snake_case names) onto `base`.
/// Unknown keys and ill-typed values throw InvalidArgument.
[[nodiscard]] BenchmarkConfig config_from_json(const nlohmann::json& j, BenchmarkConfig base);
[[nodiscard]] nlohmann::json to_json(const BenchmarkConfig& config);

[[nodiscard]] std::string_view to_string(Scenario scenario) noexcept;
[[nodiscard]] std::string_view to_string(MomentumInit init) noexcept;
[[nodiscard]] std::string_view to_string(VncStart start) noexcept;

/// The system a method is run on: ContactQuadZ always gets quadratic
/// damping, Contact2Forced always gets the configured forcing, the others
/// follow the scenario.
[[nodiscard]] OscillatorSystem system_for(StepperId method, const BenchmarkConfig& config,
                                          double alpha);

/// (10 + x_star)/(10 + x) - 1 with x_star approximate and x exact.
/// Throws DomainError if 10 + x <= 0.1.
[[nodiscard]] double error_metric(double x_star, double x);

struct BenchmarkRecord {
  StepperId method = StepperId::Contact2;
  double alpha = 0.0;
  double h = 0.0;
  double t = 0.0;
  double x_num = 0.0;
  double x_exact = 0.0;
  double err = 0.0;
  double H_num = 0.0;
};

struct CellFailure {
  StepperId method = StepperId::Contact2;
  double alpha = 0.0;
  std::string message;
};

struct BenchmarkResult {
  /// Ordered by (method, alpha, t). A failed cell contributes one row whose
  /// t and numeric fields are NaN.
  std::vector<BenchmarkRecord> records;
  std::vector<CellFailure> failures;
};

/// Runs every (method, alpha) cell, concurrently.
[[nodiscard]] BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// First method and first alpha of `config` only.
[[nodiscard]] BenchmarkResult run_simulation(const BenchmarkConfig& config);

/// Initial state of a benchmark cell, with pi_0 from the contact momentum
/// for Leapfrog under MomentumInit::LeapfrogPi.
[[nodiscard]] ContactState initial_state(const BenchmarkConfig& config, StepperId method,
                                         const OscillatorSystem& sys);

/// Exact x, v of the configured scenario from (x0, p0).
[[nodiscard]] PhasePoint exact_solution(const BenchmarkConfig& config, double alpha, double t);

/// Max |err| over the records of one cell; NaN if the cell is absent or failed.
[[nodiscard]] double max_abs_error(const BenchmarkResult& result, StepperId method, double alpha);

/// Seeded contactness sweep over methods x alpha_list x h_list.
[[nodiscard]] nlohmann::json run_contact_check(const BenchmarkConfig& config);
/// Defect-order slopes for Contact1 / Contact2, k in {0, 1, 2}.
[[nodiscard]] nlohmann::json run_bea(const BenchmarkConfig& config);
/// Global convergence slopes at t_final.
[[nodiscard]] nlohmann::json run_convergence(const BenchmarkConfig& config);

/// {"config": ..., "results": ..., "version": kReportVersion}.
[[nodiscard]] nlohmann::json make_report(const BenchmarkConfig& config, nlohmann::json results);

/// Header `method,alpha,h,t,x_num,x_exact,err,H_num`, LF endings, %.16e.
[[nodiscard]] std::string format_csv(const std::vector<BenchmarkRecord>& records);
void emit_csv(const std::vector<BenchmarkRecord>& records, const std::string& path);
void emit_json(const nlohmann::json& report, const std::string& path);

}  // namespace contact
