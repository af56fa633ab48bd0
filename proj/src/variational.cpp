#include "contact/variational.hpp"

#include "contact/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace contact {

namespace {

constexpr double kSingular = 1e-12;
constexpr double kFdStep = 1e-7;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double fd_step(double v) { return kFdStep * std::max(1.0, std::abs(v)); }

Vector fd_gradient(const DiscreteLagrangian& L, Window w, bool wrt_next) {
  Vector& arg = wrt_next ? w.x_next : w.x_j;
  Vector g(arg.size());
  for (Eigen::Index i = 0; i < arg.size(); ++i) {
    const double orig = arg[i];
    const double s = fd_step(orig);
    arg[i] = orig + s;
    const double fp = L(w);
    arg[i] = orig - s;
    const double fm = L(w);
    arg[i] = orig;
    g[i] = (fp - fm) / (2.0 * s);
  }
  return g;
}

double fd_scalar(const DiscreteLagrangian& L, Window w, bool wrt_next) {
  double& arg = wrt_next ? w.z_next : w.z_j;
  const double orig = arg;
  const double s = fd_step(orig);
  arg = orig + s;
  const double fp = L(w);
  arg = orig - s;
  const double fm = L(w);
  return (fp - fm) / (2.0 * s);
}

void check_denominator(double d, const char* what) {
  if (!(std::abs(d) >= kSingular)) {
    std::ostringstream os;
    os << what << " = " << d << " is singular";
    throw SingularUpdate(os.str());
  }
}

// Shared mechanical discretization: kinetic term on the chord, trapezoidal
// potential and forcing; `midpoint_z` selects the symmetric damping average.
DiscreteLagrangian mechanical_lagrangian(std::string name, const OscillatorSystem& sys,
                                         bool midpoint_z) {
  sys.validate();
  auto eval = [sys, midpoint_z](const Window& w) {
    const Vector chord = (w.x_next - w.x_j) / w.h;
    double val = 0.5 * chord.squaredNorm() -
                 0.5 * (sys.potential.value(w.x_j) + sys.potential.value(w.x_next));
    val -= midpoint_z ? 0.5 * (sys.damping_term(w.z_j) + sys.damping_term(w.z_next))
                      : sys.damping_term(w.z_j);
    if (sys.forcing) {
      val += 0.5 * (sys.force_vector(w.t_j, w.x_j.size()).dot(w.x_j) +
                    sys.force_vector(w.t_next(), w.x_next.size()).dot(w.x_next));
    }
    return val;
  };
  const bool depends = midpoint_z && sys.alpha != 0.0;
  DiscreteLagrangian L(std::move(name), eval, depends);
  L.with_d1([sys](const Window& w) -> Vector {
     return -(w.x_next - w.x_j) / (w.h * w.h) - 0.5 * sys.potential.gradient(w.x_j) +
            0.5 * sys.force_vector(w.t_j, w.x_j.size());
   })
      .with_d2([sys](const Window& w) -> Vector {
        return (w.x_next - w.x_j) / (w.h * w.h) - 0.5 * sys.potential.gradient(w.x_next) +
               0.5 * sys.force_vector(w.t_next(), w.x_next.size());
      })
      .with_d3([sys, midpoint_z](const Window& w) {
        return midpoint_z ? -0.5 * sys.damping_rate(w.z_j) : -sys.damping_rate(w.z_j);
      })
      .with_d4([sys, midpoint_z](const Window& w) {
        return midpoint_z ? -0.5 * sys.damping_rate(w.z_next) : 0.0;
      });
  return L;
}

template <class Residual>
Vector newton_solve(Residual&& residual, Vector x, const NewtonOptions& opts, const char* what) {
  const Eigen::Index n = x.size();
  double last_norm = std::numeric_limits<double>::infinity();
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Vector r = residual(x);
    if (!r.allFinite()) throw NoConvergence(std::string(what) + ": non-finite residual");
    const double norm = r.lpNorm<Eigen::Infinity>();
    if (norm <= opts.tolerance) return x;
    // Stagnation at the noise floor of finite-difference partials.
    if (norm >= last_norm && last_step <= 1e-8 * (1.0 + x.lpNorm<Eigen::Infinity>())) return x;
    last_norm = norm;
    if (it == opts.max_iterations) break;

    Matrix J(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = fd_step(x[i]);
      Vector xp = x;
      Vector xm = x;
      xp[i] += s;
      xm[i] -= s;
      J.col(i) = (residual(xp) - residual(xm)) / (2.0 * s);
    }
    Eigen::FullPivLU<Matrix> lu(J);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
      throw SingularJacobian(std::string(what) + ": singular Jacobian");
    }
    const Vector dx = lu.solve(-r);
    x += dx;
    last_step = dx.lpNorm<Eigen::Infinity>();
    // Residual floor: the update has reached round-off in x.
    if (dx.lpNorm<Eigen::Infinity>() <= 4.0 * kEps * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      return x;
    }
  }
  std::ostringstream os;
  os << what << ": no convergence after " << opts.max_iterations << " iterations";
  throw NoConvergence(os.str());
}

}  // namespace

DiscreteLagrangian::DiscreteLagrangian(std::string name, Scalar eval, bool depends_on_z_next)
    : name_(std::move(name)), eval_(std::move(eval)), depends_on_z_next_(depends_on_z_next) {}

DiscreteLagrangian& DiscreteLagrangian::with_d1(Gradient g) {
  d1_ = std::move(g);
  return *this;
}
DiscreteLagrangian& DiscreteLagrangian::with_d2(Gradient g) {
  d2_ = std::move(g);
  return *this;
}
DiscreteLagrangian& DiscreteLagrangian::with_d3(Scalar s) {
  d3_ = std::move(s);
  return *this;
}
DiscreteLagrangian& DiscreteLagrangian::with_d4(Scalar s) {
  d4_ = std::move(s);
  return *this;
}

Vector DiscreteLagrangian::d1(const Window& w) const { return d1_ ? d1_(w) : fd_gradient(*this, w, false); }
Vector DiscreteLagrangian::d2(const Window& w) const { return d2_ ? d2_(w) : fd_gradient(*this, w, true); }
double DiscreteLagrangian::d3(const Window& w) const { return d3_ ? d3_(w) : fd_scalar(*this, w, false); }
double DiscreteLagrangian::d4(const Window& w) const {
  if (d4_) return d4_(w);
  return depends_on_z_next_ ? fd_scalar(*this, w, true) : 0.0;
}

DiscreteLagrangian contact1_lagrangian(const OscillatorSystem& sys) {
  return mechanical_lagrangian("contact1", sys, false);
}

DiscreteLagrangian contact2_lagrangian(const OscillatorSystem& sys) {
  return mechanical_lagrangian("contact2", sys, true);
}

DiscreteLagrangian contact_quad_z_lagrangian(const OscillatorSystem& sys) {
  if (sys.damping != DampingKind::QuadraticZ) {
    throw UnsupportedSystem("contact_quad_z_lagrangian requires quadratic damping");
  }
  return mechanical_lagrangian("contact_quad_z", sys, true);
}

DiscreteLagrangian contact2_forced_lagrangian(const OscillatorSystem& sys) {
  if (sys.damping != DampingKind::LinearZ) {
    throw UnsupportedSystem("contact2_forced_lagrangian requires linear damping");
  }
  return mechanical_lagrangian("contact2_forced", sys, true);
}

double partials_error(const DiscreteLagrangian& L, const Window& w) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  auto rel_v = [](const Vector& a, const Vector& b) {
    return (a - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
  };
  double err = rel_v(L.d1(w), fd_gradient(L, w, false));
  err = std::max(err, rel_v(L.d2(w), fd_gradient(L, w, true)));
  err = std::max(err, rel(L.d3(w), fd_scalar(L, w, false)));
  err = std::max(err, rel(L.d4(w), fd_scalar(L, w, true)));
  return err;
}

Matrix cross_hessian(const DiscreteLagrangian& L, const Window& w) {
  const Eigen::Index n = w.x_j.size();
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Window wp = w;
    Window wm = w;
    const double s = fd_step(w.x_j[i]);
    wp.x_j[i] += s;
    wm.x_j[i] -= s;
    M.row(i) = ((L.d2(wp) - L.d2(wm)) / (2.0 * s)).transpose();
  }
  return M;
}

double solve_z_update(const DiscreteLagrangian& L, const Vector& x_j, const Vector& x_next,
                      double z_j, double t_j, double h, const NewtonOptions& opts) {
  Window w{x_j, x_next, z_j, z_j, t_j, h};
  const double predictor = z_j + h * L(w);
  if (!L.depends_on_z_next()) return predictor;

  double z = predictor;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    w.z_next = z;
    const double g = z - z_j - h * L(w);
    if (!std::isfinite(g)) throw NoConvergence("z-update: non-finite residual");
    if (std::abs(g) <= opts.tolerance * (1.0 + std::abs(z))) return z;
    if (it == opts.max_iterations) break;
    const double slope = 1.0 - h * L.d4(w);
    check_denominator(slope, "1 - h D4 L");
    z -= g / slope;
  }
  std::ostringstream os;
  os << "z-update: no convergence after " << opts.max_iterations << " iterations";
  throw NoConvergence(os.str());
}

Vector dgel_residual(const DiscreteLagrangian& L, const StepTriple& triple) {
  const Window prev = triple.previous();
  const Window cur = triple.current();
  const double h = triple.h;
  const double denom = 1.0 - h * L.d4(prev);
  check_denominator(denom, "1 - h D4 L");
  return L.d1(cur) + L.d2(prev) * ((1.0 + h * L.d3(cur)) / denom);
}

std::pair<Vector, double> solve_next_position(const DiscreteLagrangian& L, const Vector& x_prev,
                                              const Vector& x_cur, double z_prev, double z_cur,
                                              double t_cur, double h,
                                              const std::optional<Vector>& guess,
                                              const NewtonOptions& opts) {
  auto residual = [&](const Vector& x_next) -> Vector {
    const double z_next = solve_z_update(L, x_cur, x_next, z_cur, t_cur, h, opts);
    return dgel_residual(L, StepTriple{x_prev, x_cur, x_next, z_prev, z_cur, z_next, t_cur, h});
  };
  const Vector start = guess ? *guess : Vector(2.0 * x_cur - x_prev);
  Vector x_next = newton_solve(residual, start, opts, "dgEL solve");
  const double z_next = solve_z_update(L, x_cur, x_next, z_cur, t_cur, h, opts);
  return {std::move(x_next), z_next};
}

Vector legendre_minus(const DiscreteLagrangian& L, const Window& w) {
  const double denom = 1.0 - w.h * L.d4(w);
  check_denominator(denom, "1 - h D4 L");
  return w.h * L.d2(w) / denom;
}

Vector legendre_plus(const DiscreteLagrangian& L, const Window& w) {
  const double denom = 1.0 + w.h * L.d3(w);
  check_denominator(denom, "1 + h D3 L");
  return -w.h * L.d1(w) / denom;
}

ContactState position_momentum_step(const DiscreteLagrangian& L, const ContactState& state,
                                    double h, const NewtonOptions& opts) {
  validate(state);
  auto window_to = [&](const Vector& x_next) {
    Window w{state.x, x_next, state.z, 0.0, state.t, h};
    w.z_next = solve_z_update(L, state.x, x_next, state.z, state.t, h, opts);
    return w;
  };
  auto residual = [&](const Vector& x_next) -> Vector {
    return legendre_plus(L, window_to(x_next)) - state.p;
  };
  const Vector x_next = newton_solve(residual, Vector(state.x + h * state.p), opts,
                                     "momentum inversion");
  const Window w = window_to(x_next);

  ContactState out;
  out.t = state.t + h;
  out.x = x_next;
  out.p = legendre_minus(L, w);
  out.z = w.z_next;
  return out;
}

double discrete_conformal_factor(const DiscreteLagrangian& L, const Window& w) {
  const double denom = 1.0 - w.h * L.d4(w);
  check_denominator(denom, "1 - h D4 L");
  return (1.0 + w.h * L.d3(w)) / denom;
}

}  // namespace contact
