#pragma once

// Backward error analysis for the two linear-damping contact steppers on the
// damped harmonic oscillator: truncated modified equations, the first-order
// modified Lagrangian, and defect / convergence order estimators.

#include "contact/core.hpp"
#include "contact/integrators.hpp"
#include "contact/variational.hpp"

#include <functional>
#include <vector>

namespace contact {

/// Truncated modified equations x'' = accel(x, v, z; h), z' = zdot(x, v, z; h).
struct ModifiedSystem {
  using Field = std::function<double(double x, double v, double z, double h)>;

  StepperId method = StepperId::Contact2;
  int k = 0;
  double alpha = 0.0;
  Field accel;
  Field zdot;
};

/// Contact1 (k <= 2): -x - alpha v - (h alpha^2/2) v - (h^2/12)((alpha^2+1) x + 4 alpha^3 v).
/// Contact2 (k <= 2): -x - alpha v - (h^2/12)(alpha^3 v + alpha^2 x + x).
/// Terms of order above k are dropped. Throws UnsupportedSystem for other
/// methods and InvalidArgument for k outside {0, 1, 2}.
[[nodiscard]] double modified_accel(StepperId method, double alpha, double x, double v, double z,
                                    double h, int k);

/// Contact1: L + (h alpha/2) L
///   - (h^2/24)((4 alpha^2 - 1) x^2 - (5 alpha^2 - 2) v^2 - 4 alpha x v + 8 alpha^3 z).
/// Contact2: L - (h^2/24)((alpha^2 - 1) x^2 - (2 alpha^2 - 2) v^2 - 4 alpha x v + 2 alpha^3 z).
/// L = v^2/2 - x^2/2 - alpha z.
[[nodiscard]] double modified_zdot(StepperId method, double alpha, double x, double v, double z,
                                   double h, int k);

/// (1 + h alpha/2)(v^2/2 - x^2/2 - alpha z).
[[nodiscard]] double modified_lagrangian_contact1(double alpha, double x, double v, double z,
                                                  double h);

/// Modified system of `method` for `sys`. Throws UnsupportedSystem unless
/// sys is the unforced harmonic oscillator with linear damping.
[[nodiscard]] ModifiedSystem make_modified_system(StepperId method, const OscillatorSystem& sys,
                                                  int k);

/// Least-squares fit of log(value) against log(h).
struct OrderFit {
  double slope = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double fit_residual = 0.0;
};

[[nodiscard]] OrderFit fit_log_slope(const std::vector<double>& hs,
                                     const std::vector<double>& values);

struct DefectEstimate {
  OrderFit fit;
  std::vector<double> h_list;
  /// max(x_defect, z_defect) per h.
  std::vector<double> defects;
  std::vector<double> x_defects;
  std::vector<double> z_defects;
};

/// Integrates `modified` with RK4 at step h/100 from (x0, v0 = p0, z0) over
/// [0, T], samples at t_j = j h and evaluates the discrete defects of the
/// z-update, (z_{j+1} - z_j)/h - L, and of the discrete generalized
/// Euler-Lagrange equations in second-difference form. T / h must be integral.
[[nodiscard]] DefectEstimate defect_order_estimate(const ModifiedSystem& modified,
                                                   const DiscreteLagrangian& L,
                                                   const std::vector<double>& h_list, double T,
                                                   const ContactState& initial);

/// Uses make_modified_system and the stepper's own discrete Lagrangian.
[[nodiscard]] DefectEstimate defect_order_estimate(StepperId method, int k,
                                                   const OscillatorSystem& sys,
                                                   const std::vector<double>& h_list, double T,
                                                   const ContactState& initial);

using ExactSolution = std::function<PhasePoint(double t)>;

struct ConvergenceEstimate {
  OrderFit fit;
  std::vector<double> h_list;
  /// |x_num(T) - x_exact(T)| per h.
  std::vector<double> errors;
};

/// Global error slope at time T. VNC is seeded with the exact x(t0 + h).
[[nodiscard]] ConvergenceEstimate convergence_order_estimate(StepperId id,
                                                             const OscillatorSystem& sys,
                                                             const ExactSolution& exact,
                                                             const std::vector<double>& h_list,
                                                             double T, const ContactState& initial);

}  // namespace contact
