// Prints one PASS / FAIL line per acceptance criterion; exits non-zero if any fails.

#include "contact/bea.hpp"
#include "contact/geometry.hpp"
#include "contact/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace contact;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int g_failures = 0;

void criterion(const char* name, double time_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > time_limit) {
    out.pass = false;
    out.details += "; runtime " + fmt("%.2f", secs) + " s exceeds " + fmt("%.0f", time_limit) + " s";
  }
  std::printf("%s %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name, out.details.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

std::vector<ContactState> random_states(std::uint64_t seed, int n, double box = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<ContactState> out;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    const double p = u(rng);
    out.push_back(make_state(0, x, p, u(rng)));
  }
  return out;
}

const std::vector<std::pair<StepperId, OscillatorSystem>>& contact_cases() {
  static const std::vector<std::pair<StepperId, OscillatorSystem>> cases{
      {StepperId::Contact1, OscillatorSystem::damped(0.5)},
      {StepperId::Contact2, OscillatorSystem::damped(0.5)},
      {StepperId::ContactQuadZ, OscillatorSystem::quadratic(0.5)},
      {StepperId::Contact2Forced, OscillatorSystem::forced(0.5, 0.5, 0.8)}};
  return cases;
}

const std::vector<double> kCheckHs{0.2, 0.1, 0.05};

double g_contact_residual = 0.0;

Outcome contactness() {
  const auto states = random_states(2024, 100);
  double residual = 0.0;
  double deviation = 0.0;
  for (const auto& [id, sys] : contact_cases()) {
    for (double h : kCheckHs) {
      for (const auto& s : states) {
        const auto r = contactness_check(id, sys, s, h);
        residual = std::max(residual, r.pullback_residual);
        deviation = std::max(deviation, std::abs(r.measured_factor - r.predicted_factor));
      }
    }
  }
  g_contact_residual = residual;
  return {residual <= 1e-6 && deviation <= 1e-6,
          "max residual " + fmt("%.2e", residual) + ", max factor deviation " + fmt("%.2e", deviation)};
}

Outcome negative_control() {
  const auto states = random_states(2024, 100);
  const auto sys = OscillatorSystem::damped(0.5);
  bool pass = true;
  std::string details;
  for (StepperId id : {StepperId::RK4, StepperId::Ruth3}) {
    details += std::string(to_string(id)) + " max residual per h:";
    double weakest = INFINITY;
    for (double h : kCheckHs) {
      double worst = 0.0;
      for (const auto& s : states) worst = std::max(worst, contactness_check(id, sys, s, h).pullback_residual);
      details += " " + fmt("%.2e", worst);
      weakest = std::min(weakest, worst);
      pass = pass && worst >= 1e-3;
    }
    details += " (margin over contact steppers " + fmt("%.1e", weakest / g_contact_residual) + "x); ";
  }
  details += "threshold 1e-3";
  return {pass, details};
}

Outcome alpha_zero() {
  const auto sys = OscillatorSystem::damped(0.0);
  const auto c1 = step_function(StepperId::Contact1);
  const auto c2 = step_function(StepperId::Contact2);
  const auto lf = step_function(StepperId::Leapfrog);
  double worst = 0.0;
  for (const auto& s0 : random_states(5, 10)) {
    for (double h : kCheckHs) {
      const Trajectory t = integrate(StepperId::Contact2, sys, s0, h, 1000);
      for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const ContactState a = c1(sys, t.states[j], h);
        const ContactState b = c2(sys, t.states[j], h);
        const ContactState c = lf(sys, t.states[j], h);
        worst = std::max({worst, std::abs(a.x[0] - b.x[0]), std::abs(a.p[0] - b.p[0]),
                          std::abs(a.x[0] - c.x[0]), std::abs(a.p[0] - c.p[0])});
      }
    }
  }
  return {worst <= 1e-14, "max per-step (x, p) disagreement " + fmt("%.2e", worst) + " over 1000 steps"};
}

Outcome convergence() {
  const BenchmarkConfig c = default_config(Command::Convergence);
  struct Target {
    StepperId id;
    double alpha;
    double order;
    double tol;
  };
  const Target targets[] = {{StepperId::Contact1, 0.5, 1.0, 0.15},
                            {StepperId::Contact2, 0.5, 2.0, 0.1},
                            {StepperId::VNC, 0.5, 2.0, 0.1},
                            {StepperId::Ruth3, 0.0, 3.0, 0.15},
                            {StepperId::RK4, 0.5, 4.0, 0.15}};
  bool pass = true;
  std::string details = "from (x0, p0) = (" + fmt("%g", c.x0) + ", " + fmt("%g", c.p0) + "):";
  for (const auto& t : targets) {
    const auto est = convergence_order_estimate(
        t.id, OscillatorSystem::damped(t.alpha),
        [&](double time) { return exact_damped_solution(t.alpha, c.x0, c.p0, time); }, c.h_list, c.t_final,
        make_state(0, c.x0, c.p0, c.z0));
    pass = pass && std::abs(est.fit.slope - t.order) <= t.tol;
    details += " " + std::string(to_string(t.id)) + " " + fmt("%.3f", est.fit.slope);
  }
  return {pass, details};
}

Outcome engine_oracle() {
  const auto damped = OscillatorSystem::damped(0.5);
  const std::pair<StepperId, OscillatorSystem> cases[] = {{StepperId::Contact1, damped},
                                                          {StepperId::Contact2, damped},
                                                          {StepperId::Contact2Forced, OscillatorSystem::forced(0.5, 0.5, 0.8)}};
  double worst = 0.0;
  for (const auto& [id, sys] : cases) {
    const auto L = *discrete_lagrangian_for(id, sys);
    const auto step = step_function(id);
    const Trajectory t = integrate(id, sys, make_state(0, 1, 0, 0), 0.1, 1000);
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      const ContactState a = step(sys, t.states[j], 0.1);
      const ContactState b = position_momentum_step(L, t.states[j], 0.1);
      worst = std::max({worst, (a.x - b.x).lpNorm<Eigen::Infinity>(), (a.p - b.p).lpNorm<Eigen::Infinity>(),
                        std::abs(a.z - b.z)});
    }
  }
  return {worst <= 1e-12, "max per-step gap " + fmt("%.2e", worst) + " over 1000 steps"};
}

Outcome dgel_consistency() {
  double worst = 0.0;
  for (const auto& [id, sys] : contact_cases()) {
    const auto L = *discrete_lagrangian_for(id, sys);
    for (ContactState s0 : random_states(77, 10, 1.0)) {
      // Negative z anti-damps the quadratic model into finite-time blow-up.
      if (id == StepperId::ContactQuadZ) s0.z = std::abs(s0.z);
      for (double h : kCheckHs) {
        const Trajectory t = integrate(id, sys, s0, h, static_cast<std::size_t>(std::lround(10.0 / h)));
        for (std::size_t j = 1; j + 1 < t.size(); ++j) {
          const auto& a = t.states[j - 1];
          const auto& b = t.states[j];
          const auto& c = t.states[j + 1];
          worst = std::max(worst, dgel_residual(L, {a.x, b.x, c.x, a.z, b.z, c.z, b.t, h}).lpNorm<Eigen::Infinity>());
        }
      }
    }
  }
  return {worst <= 1e-11, "max dgEL residual " + fmt("%.2e", worst)};
}

Outcome bea_orders() {
  const BenchmarkConfig c = default_config(Command::Bea);
  const double alpha = c.alpha_list.front();
  const auto sys = OscillatorSystem::damped(alpha);
  const ContactState s0 = make_state(0, c.x0, c.p0, c.z0);
  bool pass = true;
  std::string details;
  for (int k = 0; k <= 2; ++k) {
    const double slope = defect_order_estimate(StepperId::Contact1, k, sys, c.h_list, c.t_final, s0).fit.slope;
    pass = pass && slope >= k + 1 - 0.2;
    details += "Contact1 k=" + std::to_string(k) + " " + fmt("%.3f", slope) + ", ";
  }
  for (int k : {0, 2}) {
    const double slope = defect_order_estimate(StepperId::Contact2, k, sys, c.h_list, c.t_final, s0).fit.slope;
    pass = pass && slope >= (k == 0 ? 2.0 : 3.0) - 0.2;
    details += "Contact2 k=" + std::to_string(k) + " " + fmt("%.3f", slope) + ", ";
  }
  double rescale = 0.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = std::abs(u(rng)), x = u(rng), v = u(rng), z = u(rng), h = 0.1 * std::abs(u(rng));
    const double k1 = modified_zdot(StepperId::Contact1, a, x, v, z, h, 1);
    const double k0 = modified_zdot(StepperId::Contact1, a, x, v, z, h, 0);
    rescale = std::max(rescale, std::abs(k1 - (1 + h * a / 2) * k0) / std::max(1.0, std::abs(k1)));
  }
  pass = pass && rescale <= 1e-15;
  details += "rescaling identity gap " + fmt("%.1e", rescale);
  return {pass, details};
}

Outcome pi_p_identity() {
  bool pass = true;
  std::string details;
  const double h = 0.1;
  for (double alpha : {0.1, 1.0}) {
    const auto sys = OscillatorSystem::damped(alpha);
    const ContactState s0 = make_state(0, 1, 0, 0);
    const Trajectory c = integrate(StepperId::Contact2, sys, s0, h, 100);
    ContactState l0 = s0;
    l0.p = leapfrog_momentum_from_contact(sys, 0.0, s0.x, s0.p, h);
    const double residual = pi_p_relation_check(c, integrate(StepperId::Leapfrog, sys, l0, h, 100), sys, h);

    std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> gaps;
    for (double hh : hs) {
      const auto n = static_cast<std::size_t>(std::lround(1.0 / hh));
      const Trajectory a = integrate(StepperId::Contact2, sys, s0, hh, n);
      const Trajectory b = integrate(StepperId::Leapfrog, sys, s0, hh, n);
      double gap = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) gap = std::max(gap, std::abs(a.states[j].x[0] - b.states[j].x[0]));
      gaps.push_back(gap);
    }
    const double slope = fit_log_slope(hs, gaps).slope;
    const double scaled = gaps.front() / (h * h * (alpha + alpha * alpha));
    pass = pass && residual <= 1e-12 && std::abs(slope - 2.0) <= 0.2 && scaled <= 1.0;
    details += "alpha " + fmt("%g", alpha) + ": residual " + fmt("%.1e", residual) + ", unseeded gap slope " +
               fmt("%.3f", slope) + ", gap/(h^2(a+a^2)) " + fmt("%.3f", scaled) + "; ";
  }
  details.resize(details.size() - 2);
  return {pass, details};
}

Outcome hamiltonian_decay() {
  const auto sys = OscillatorSystem::damped(0.1);
  std::vector<double> worst;
  for (double h : {0.1, 0.05, 0.025}) {
    const Trajectory t = integrate(StepperId::Contact2, sys, make_state(0, 1, 0, 0), h,
                                   static_cast<std::size_t>(std::lround(10.0 / h)));
    double w = 0.0;
    for (double d : hamiltonian_decay_report(t, sys)) w = std::max(w, std::abs(d));
    worst.push_back(w);
  }
  const double r1 = worst[0] / worst[1];
  const double r2 = worst[1] / worst[2];
  return {r1 >= 3.5 && r2 >= 3.5, "halving ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2)};
}

Outcome benchmark_ordering() {
  const BenchmarkConfig c = resolve(default_config(Command::Benchmark), Command::Benchmark);
  c.validate(Command::Benchmark);
  const BenchmarkResult res = run_benchmark(c);
  if (!res.failures.empty()) return {false, "cell failure: " + res.failures.front().message};
  auto e = [&](StepperId id, double a) { return max_abs_error(res, id, a); };
  bool pass = true;
  std::string details;
  for (double a : {0.1, 2.0}) {
    const bool ok = e(StepperId::Contact2, a) < e(StepperId::Ruth3, a);
    pass = pass && ok;
    details += "alpha " + fmt("%g", a) + " Contact2 " + fmt("%.3e", e(StepperId::Contact2, a)) +
               (ok ? " < " : " >= ") + "Ruth3 " + fmt("%.3e", e(StepperId::Ruth3, a)) + "; ";
  }
  const double c1 = e(StepperId::Contact1, 0.01);
  const double c2 = e(StepperId::Contact2, 0.01);
  const double ratio = std::max(c1, c2) / std::min(c1, c2);
  pass = pass && ratio <= 2.0;
  details += "alpha 0.01 Contact1/Contact2 ratio " + fmt("%.3f", ratio) + "; ";
  for (double a : c.alpha_list) {
    if (a < 0.1) continue;
    const bool ok = e(StepperId::VNC, a) > e(StepperId::Contact2, a);
    pass = pass && ok;
    details += "alpha " + fmt("%g", a) + " VNC " + fmt("%.3e", e(StepperId::VNC, a)) + (ok ? " > " : " <= ") +
               "Contact2 " + fmt("%.3e", e(StepperId::Contact2, a)) + "; ";
  }
  details.resize(details.size() - 2);
  return {pass, details};
}

Outcome determinism() {
  BenchmarkConfig b = resolve(default_config(Command::Benchmark), Command::Benchmark);
  b.seed = 7;
  const std::string csv1 = format_csv(run_benchmark(b).records);
  const std::string csv2 = format_csv(run_benchmark(b).records);
  BenchmarkConfig cc = resolve(default_config(Command::ContactCheck), Command::ContactCheck);
  cc.seed = 7;
  cc.n_states = 20;
  const std::string js1 = make_report(cc, run_contact_check(cc)).dump(2);
  const std::string js2 = make_report(cc, run_contact_check(cc)).dump(2);
  return {csv1 == csv2 && js1 == js2,
          "benchmark CSV " + std::string(csv1 == csv2 ? "identical" : "differs") + " (" +
              std::to_string(csv1.size()) + " bytes), contact-check JSON " + (js1 == js2 ? "identical" : "differs")};
}

}  // namespace

int main() {
  criterion("contactness", 10, contactness);
  criterion("negative control", 10, negative_control);
  criterion("alpha -> 0 degeneration", 10, alpha_zero);
  criterion("convergence orders", 5, convergence);
  criterion("variational engine oracle", 10, engine_oracle);
  criterion("discrete EL self-consistency", 10, dgel_consistency);
  criterion("BEA defect orders", 30, bea_orders);
  criterion("pi-p identity", 10, pi_p_identity);
  criterion("Hamiltonian decay", 10, hamiltonian_decay);
  criterion("benchmark ordering", 10, benchmark_ordering);
  criterion("determinism", 30, determinism);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
