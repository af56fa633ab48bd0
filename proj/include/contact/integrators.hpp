#pragma once

// Closed-form contact steppers, reference methods and the trajectory driver.

#include "contact/core.hpp"
#include "contact/variational.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string_view>

namespace contact {

enum class StepperId { Contact1, Contact2, ContactQuadZ, Contact2Forced, Leapfrog, Ruth3, RK4, VNC };

inline constexpr std::array<StepperId, 8> kAllSteppers = {
    StepperId::Contact1, StepperId::Contact2, StepperId::ContactQuadZ, StepperId::Contact2Forced,
    StepperId::Leapfrog, StepperId::Ruth3,    StepperId::RK4,          StepperId::VNC};

[[nodiscard]] std::string_view to_string(StepperId id) noexcept;
/// Case-insensitive; accepts the names produced by to_string.
[[nodiscard]] std::optional<StepperId> parse_stepper(std::string_view name);
/// True for the steppers derived from a discrete Herglotz principle.
[[nodiscard]] bool is_contact(StepperId id) noexcept;

using StepFunction =
    std::function<ContactState(const OscillatorSystem&, const ContactState&, double)>;

/// One-step map for `id`. VNC is a two-step recursion and has none
/// (throws UnsupportedSystem).
[[nodiscard]] StepFunction step_function(StepperId id);

/// Discrete Lagrangian generating a contact stepper; nullopt for reference methods.
[[nodiscard]] std::optional<DiscreteLagrangian> discrete_lagrangian_for(StepperId id,
                                                                        const OscillatorSystem& sys);

[[nodiscard]] ContactState contact1_step(const OscillatorSystem& sys, const ContactState& s, double h);
[[nodiscard]] ContactState contact2_step(const OscillatorSystem& sys, const ContactState& s, double h);
[[nodiscard]] ContactState contact_quad_z_step(const OscillatorSystem& sys, const ContactState& s,
                                               double h);
[[nodiscard]] ContactState contact2_forced_step(const OscillatorSystem& sys, const ContactState& s,
                                                double h);

/// Leapfrog state: `state.p` holds the integer-step momentum pi_j, `pi_half`
/// the staggered pi_{j-1/2} produced by the last step (empty before the first).
struct LeapfrogState {
  ContactState state;
  Vector pi_half;
};

[[nodiscard]] LeapfrogState leapfrog_step(const OscillatorSystem& sys, const LeapfrogState& s,
                                          double h);
[[nodiscard]] ContactState leapfrog_step(const OscillatorSystem& sys, const ContactState& s,
                                         double h);

/// Leapfrog momentum pi_j matching a contact2 momentum p_j on the same
/// discrete curve: pi = (1 - h^2 alpha^2 / 4) p - (h^2 alpha / 4)(V'(x) - f(t)).
[[nodiscard]] Vector leapfrog_momentum_from_contact(const OscillatorSystem& sys, double t,
                                                    const Vector& x, const Vector& p, double h);
/// Inverse of leapfrog_momentum_from_contact.
[[nodiscard]] Vector contact_momentum_from_leapfrog(const OscillatorSystem& sys, double t,
                                                    const Vector& x, const Vector& pi, double h);

[[nodiscard]] ContactState ruth3_step(const OscillatorSystem& sys, const ContactState& s, double h);
[[nodiscard]] ContactState rk4_step(const OscillatorSystem& sys, const ContactState& s, double h);

/// Two consecutive positions x_{j-1}, x_j of the VNC recursion; t is the time of x_j.
struct VncState {
  double t = 0.0;
  Vector x_prev;
  Vector x_cur;
};

[[nodiscard]] VncState vnc_step(const OscillatorSystem& sys, const VncState& s, double h);

/// Second-order Taylor start x_1 = x_0 + h p_0 + (h^2/2)(-V'(x_0) - alpha p_0 + f(t_0)).
[[nodiscard]] Vector vnc_taylor_start(const OscillatorSystem& sys, const ContactState& s, double h);

struct IntegrateOptions {
  /// Seed for the second VNC position; Taylor start when absent.
  std::optional<Vector> vnc_x1;
};

/// Applies `id` n_steps times from `initial`. States are re-stamped at
/// t0 + j h. Stepper failures are rethrown as StepFailure.
[[nodiscard]] Trajectory integrate(StepperId id, const OscillatorSystem& sys,
                                   const ContactState& initial, double h, std::size_t n_steps,
                                   const IntegrateOptions& opts = {});

/// Same driver, stepping with the generic position-momentum map of `L`.
[[nodiscard]] Trajectory integrate_variational(const DiscreteLagrangian& L,
                                               const OscillatorSystem& sys,
                                               const ContactState& initial, double h,
                                               std::size_t n_steps);

}  // namespace contact
