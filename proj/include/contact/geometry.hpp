#pragma once

// Numerical contactness checks for one-step maps and decay diagnostics.

#include "contact/core.hpp"
#include "contact/integrators.hpp"
#include "contact/variational.hpp"

#include <optional>
#include <vector>

namespace contact {

struct ContactCheckReport {
  ContactState point;
  /// max-norm of w - c eta(point), w the pulled-back contact form.
  double pullback_residual = 0.0;
  /// c: the dz-coefficient of the pulled-back form.
  double measured_factor = 0.0;
  double predicted_factor = 0.0;
  double fd_step = 0.0;
};

/// Central-difference Jacobian of (x, p, z) -> (x+, p+, z+), variables
/// ordered x, p, z. Per-component step fd_eps * max(1, |component|).
[[nodiscard]] Matrix one_step_jacobian(const StepFunction& stepper, const OscillatorSystem& sys,
                                       const ContactState& state, double h, double fd_eps = 1e-6);

/// Row covector of dz - p.dx at `state` in (x, p, z) ordering.
[[nodiscard]] Vector contact_form(const ContactState& state);

/// Pulls eta back through one step and compares it with c eta.
/// `predicted` is copied into the report unchanged (NaN when absent).
[[nodiscard]] ContactCheckReport contactness_check(const StepFunction& stepper,
                                                   const OscillatorSystem& sys,
                                                   const ContactState& state, double h,
                                                   double fd_eps = 1e-6,
                                                   std::optional<double> predicted = std::nullopt);

/// Same check for a named stepper. The predicted factor is the discrete
/// conformal factor on the stepped window for contact steppers and the
/// continuous-flow factor exp(-h dH/dz) for the reference methods.
[[nodiscard]] ContactCheckReport contactness_check(StepperId id, const OscillatorSystem& sys,
                                                   const ContactState& state, double h,
                                                   double fd_eps = 1e-6);

/// (1 + h D3 L) / (1 - h D4 L) on `window`.
[[nodiscard]] double conformal_factor_prediction(const DiscreteLagrangian& L, const Window& window);

/// Running product of the per-step conformal factors; starts at 1.
[[nodiscard]] std::vector<double> cumulative_conformal(const Trajectory& traj,
                                                       const DiscreteLagrangian& L);

/// Linear damping: H_j - H_0 exp(-alpha (t_j - t_0)), one entry per state.
/// Quadratic damping: (H_{j+1} - H_j)/h + alpha z_{j+1/2} H_{j+1/2} with
/// midpoint averages, one entry per step.
[[nodiscard]] std::vector<double> hamiltonian_decay_report(const Trajectory& traj,
                                                           const OscillatorSystem& sys);

/// max_j |pi_j - pi(p_j)| where pi(p) is leapfrog_momentum_from_contact.
/// Throws MismatchedTrajectories if the x-histories differ by more than 1e-10.
[[nodiscard]] double pi_p_relation_check(const Trajectory& contact_traj,
                                         const Trajectory& leapfrog_traj,
                                         const OscillatorSystem& sys, double h);

}  // namespace contact
