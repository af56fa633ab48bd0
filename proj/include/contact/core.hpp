#pragma once

// Domain types and continuous-theory evaluators for contact Hamiltonian /
// Herglotz Lagrangian mechanical systems on flat R^n.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace contact {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point (t, x, p, z) of extended contact phase space in Darboux coordinates.
struct ContactState {
  double t = 0.0;
  Vector x;
  Vector p;
  double z = 0.0;

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(x.size()); }
};

/// Scalar (n = 1) convenience constructor.
[[nodiscard]] ContactState make_state(double t, double x, double p, double z);

/// Throws InvalidArgument unless x, p have equal dimension n >= 1 and all entries are finite.
void validate(const ContactState& state);

struct Potential {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;

  [[nodiscard]] bool is_harmonic() const noexcept { return name == "harmonic"; }

  /// V(x) = |x|^2 / 2.
  [[nodiscard]] static Potential harmonic();
};

/// Relative error between the analytic gradient and a central finite
/// difference with step 1e-6 * max(1, |x_i|).
[[nodiscard]] double gradient_error(const Potential& potential, const Vector& x);

/// Samples `n_points` seeded points in [-2, 2]^dim and throws InvalidArgument
/// if any gradient_error exceeds 1e-6.
void verify_gradient(const Potential& potential, std::size_t dim, std::uint64_t seed,
                     int n_points = 16);

enum class DampingKind { LinearZ, QuadraticZ };

/// f(t) = beta * sin(omega * t).
struct Forcing {
  double beta = 0.0;
  double omega = 1.0;

  [[nodiscard]] double operator()(double t) const;
};

struct OscillatorSystem {
  Potential potential = Potential::harmonic();
  DampingKind damping = DampingKind::LinearZ;
  double alpha = 0.0;
  std::optional<Forcing> forcing;

  [[nodiscard]] double force(double t) const { return forcing ? (*forcing)(t) : 0.0; }
  /// Generalized force f(t) as a configuration-space vector of size n.
  /// Forcing couples to scalar configurations only (n must be 1 when forced).
  [[nodiscard]] Vector force_vector(double t, Eigen::Index n) const;

  /// alpha*z (linear) or alpha*z^2/2 (quadratic).
  [[nodiscard]] double damping_term(double z) const;
  /// Derivative of damping_term with respect to z.
  [[nodiscard]] double damping_rate(double z) const;

  /// Throws InvalidArgument on alpha < 0, non-finite parameters, or forcing
  /// combined with quadratic damping.
  void validate() const;

  [[nodiscard]] static OscillatorSystem damped(double alpha);
  [[nodiscard]] static OscillatorSystem quadratic(double alpha);
  [[nodiscard]] static OscillatorSystem forced(double alpha, double beta, double omega);
};

/// Continuous Herglotz Lagrangian L(t, x, v, z) with its partial derivatives.
struct HerglotzLagrangian {
  using Scalar = std::function<double(double, const Vector&, const Vector&, double)>;
  using Gradient = std::function<Vector(double, const Vector&, const Vector&, double)>;

  Scalar eval;
  Gradient d_x;
  Gradient d_v;
  Scalar d_z;

  [[nodiscard]] static HerglotzLagrangian from_system(const OscillatorSystem& sys);
};

/// Samples of a discrete trajectory at t_j = t0 + j h.
struct Trajectory {
  std::string method_id;
  double h = 0.0;
  double t0 = 0.0;
  std::vector<ContactState> states;
  std::vector<double> hamiltonian;
  std::vector<double> energy;
  /// Cumulative conformal factor; empty for steppers that are not contact maps.
  std::vector<double> conformal;

  [[nodiscard]] double time(std::size_t j) const noexcept {
    return t0 + static_cast<double>(j) * h;
  }
  [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
};

struct ContactVelocity {
  Vector dx;
  Vector dp;
  double dz = 0.0;
};

struct PhasePoint {
  double x = 0.0;
  double v = 0.0;
};

[[nodiscard]] double eval_lagrangian(const OscillatorSystem& sys, double t, const Vector& x,
                                     const Vector& v, double z);

[[nodiscard]] double contact_hamiltonian(const OscillatorSystem& sys, const ContactState& state);

/// (dH/dp, -dH/dx - p dH/dz, p.dH/dp - H).
[[nodiscard]] ContactVelocity contact_vector_field(const OscillatorSystem& sys,
                                                   const ContactState& state);

/// dL/dx - d/dt dL/dv + dL/dz dL/dv, with the total derivative expanded along
/// (v, a, zdot). `zdot` must agree with L at the point to 1e-10.
[[nodiscard]] Vector continuous_gel_residual(const HerglotzLagrangian& lag, double t,
                                             const Vector& x, const Vector& v, const Vector& a,
                                             double z, double zdot);

/// E = dL/dv . v - L.
[[nodiscard]] double energy(const HerglotzLagrangian& lag, double t, const Vector& x,
                            const Vector& v, double z);

/// Closed-form solution of x'' = -x - alpha x'.
[[nodiscard]] PhasePoint exact_damped_solution(double alpha, double x0, double v0, double t);

/// Closed-form solution of x'' = -x - alpha x' + beta sin(omega t).
/// Throws DomainError at resonance (alpha = 0, omega = 1).
[[nodiscard]] PhasePoint exact_forced_solution(double alpha, double beta, double omega, double x0,
                                               double v0, double t);

}  // namespace contact
