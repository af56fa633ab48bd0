#pragma once

// Generic discrete Herglotz engine: z-update, discrete generalized
// Euler-Lagrange equations, discrete Legendre transforms and the induced
// position-momentum contact map.

#include "contact/core.hpp"

#include <functional>
#include <utility>

namespace contact {

/// Arguments (x_j, x_{j+1}, z_j, z_{j+1}, t_j; h) of a discrete Lagrangian.
/// The right endpoint time is t_j + h.
struct Window {
  Vector x_j;
  Vector x_next;
  double z_j = 0.0;
  double z_next = 0.0;
  double t_j = 0.0;
  double h = 0.0;

  [[nodiscard]] double t_next() const noexcept { return t_j + h; }
};

/// L(x_j, x_{j+1}, z_j, z_{j+1}, t_j, t_{j+1}; h) with partials D1..D4.
///
/// Any of d1..d4 may be left empty; the corresponding partial is then taken
/// by central differences of `eval` with step 1e-7 * max(1, |arg|).
class DiscreteLagrangian {
 public:
  using Scalar = std::function<double(const Window&)>;
  using Gradient = std::function<Vector(const Window&)>;

  DiscreteLagrangian(std::string name, Scalar eval, bool depends_on_z_next);

  DiscreteLagrangian& with_d1(Gradient g);
  DiscreteLagrangian& with_d2(Gradient g);
  DiscreteLagrangian& with_d3(Scalar s);
  DiscreteLagrangian& with_d4(Scalar s);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool depends_on_z_next() const noexcept { return depends_on_z_next_; }
  [[nodiscard]] bool has_analytic_partials() const noexcept { return d1_ && d2_ && d3_ && d4_; }

  [[nodiscard]] double operator()(const Window& w) const { return eval_(w); }
  [[nodiscard]] Vector d1(const Window& w) const;
  [[nodiscard]] Vector d2(const Window& w) const;
  [[nodiscard]] double d3(const Window& w) const;
  [[nodiscard]] double d4(const Window& w) const;

 private:
  std::string name_;
  Scalar eval_;
  Gradient d1_;
  Gradient d2_;
  Scalar d3_;
  Scalar d4_;
  bool depends_on_z_next_;
};

/// L = |dx/h|^2/2 - (V(x_j)+V(x_{j+1}))/2 - alpha z_j  (first order).
[[nodiscard]] DiscreteLagrangian contact1_lagrangian(const OscillatorSystem& sys);
/// Midpoint-in-z variant, damping -alpha (z_j + z_{j+1})/2 (second order).
[[nodiscard]] DiscreteLagrangian contact2_lagrangian(const OscillatorSystem& sys);
/// Quadratic damping -alpha (z_j^2 + z_{j+1}^2)/4.
[[nodiscard]] DiscreteLagrangian contact_quad_z_lagrangian(const OscillatorSystem& sys);
/// contact2 plus the trapezoidal forcing work (f(t_j) x_j + f(t_{j+1}) x_{j+1})/2.
[[nodiscard]] DiscreteLagrangian contact2_forced_lagrangian(const OscillatorSystem& sys);

/// Largest relative deviation of d1..d4 from central differences of eval.
[[nodiscard]] double partials_error(const DiscreteLagrangian& L, const Window& w);

/// Finite-difference cross Hessian D1 D2 L (rows: x_j, columns: x_{j+1}).
[[nodiscard]] Matrix cross_hessian(const DiscreteLagrangian& L, const Window& w);

/// One window x_{j-1}, x_j, x_{j+1} of a discrete curve.
struct StepTriple {
  Vector x_prev;
  Vector x_cur;
  Vector x_next;
  double z_prev = 0.0;
  double z_cur = 0.0;
  double z_next = 0.0;
  double t_cur = 0.0;
  double h = 0.0;

  [[nodiscard]] Window previous() const { return {x_prev, x_cur, z_prev, z_cur, t_cur - h, h}; }
  [[nodiscard]] Window current() const { return {x_cur, x_next, z_cur, z_next, t_cur, h}; }
};

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
};

/// Solves z_{j+1} = z_j + h L(x_j, x_{j+1}, z_j, z_{j+1}).
///
/// Closed form when L does not depend on z_{j+1}; otherwise Newton from the
/// explicit predictor z_j + h L(x_j, x_{j+1}, z_j, z_j), which selects the
/// root that stays continuous as h -> 0.
[[nodiscard]] double solve_z_update(const DiscreteLagrangian& L, const Vector& x_j,
                                    const Vector& x_next, double z_j, double t_j, double h,
                                    const NewtonOptions& opts = {});

/// D1 L(cur) + D2 L(prev) (1 + h D3 L(cur)) / (1 - h D4 L(prev)).
[[nodiscard]] Vector dgel_residual(const DiscreteLagrangian& L, const StepTriple& triple);

/// Solves the discrete generalized Euler-Lagrange equations for x_{j+1}.
/// Default guess is the linear extrapolation 2 x_j - x_{j-1}.
[[nodiscard]] std::pair<Vector, double> solve_next_position(
    const DiscreteLagrangian& L, const Vector& x_prev, const Vector& x_cur, double z_prev,
    double z_cur, double t_cur, double h, const std::optional<Vector>& guess = std::nullopt,
    const NewtonOptions& opts = {});

/// p^- = h D2 L / (1 - h D4 L) on the (prev, cur) window.
[[nodiscard]] Vector legendre_minus(const DiscreteLagrangian& L, const Window& w);

/// p^+ = -h D1 L / (1 + h D3 L) on the (cur, next) window.
[[nodiscard]] Vector legendre_plus(const DiscreteLagrangian& L, const Window& w);

/// The contact map (x_j, p_j, z_j) -> (x_{j+1}, p_{j+1}, z_{j+1}): inverts
/// legendre_plus for x_{j+1} and reads the new momentum off legendre_minus.
[[nodiscard]] ContactState position_momentum_step(const DiscreteLagrangian& L,
                                                  const ContactState& state, double h,
                                                  const NewtonOptions& opts = {});

/// (1 + h D3 L) / (1 - h D4 L) on one window.
[[nodiscard]] double discrete_conformal_factor(const DiscreteLagrangian& L, const Window& w);

}  // namespace contact
