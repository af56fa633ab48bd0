#include "contact/integrators.hpp"

#include "contact/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace contact {

namespace {

void require_linear_unforced(const OscillatorSystem& sys, const char* who) {
  if (sys.damping != DampingKind::LinearZ || sys.forcing) {
    throw UnsupportedSystem(std::string(who) + " requires linear damping without forcing");
  }
}

void require_linear(const OscillatorSystem& sys, const char* who) {
  if (sys.damping != DampingKind::LinearZ) {
    throw UnsupportedSystem(std::string(who) + " requires linear damping");
  }
}

// Acceleration seen by the reference methods: -V'(x) - alpha p + f(t).
Vector reference_accel(const OscillatorSystem& sys, double t, const Vector& x, const Vector& p) {
  return -sys.potential.gradient(x) - sys.alpha * p + sys.force_vector(t, x.size());
}

// z for the reference methods: implicit trapezoidal rule on z' = L(t, x, p, z),
// closed form because L is affine in z under linear damping.
double trapezoidal_z(const OscillatorSystem& sys, const ContactState& s, const Vector& x1,
                     const Vector& p1, double h) {
  const double t1 = s.t + h;
  const double a = eval_lagrangian(sys, s.t, s.x, s.p, 0.0);
  const double b = eval_lagrangian(sys, t1, x1, p1, 0.0);
  const double ha = 0.5 * h * sys.alpha;
  return (s.z * (1.0 - ha) + 0.5 * h * (a + b)) / (1.0 + ha);
}

double kinetic_and_potential(const OscillatorSystem& sys, const Vector& x0, const Vector& x1,
                             double h) {
  const Vector chord = (x1 - x0) / h;
  return 0.5 * chord.squaredNorm() - 0.5 * (sys.potential.value(x0) + sys.potential.value(x1));
}

ContactState contact2_impl(const OscillatorSystem& sys, const ContactState& s, double h) {
  const double half = 0.5 * h * sys.alpha;
  if (1.0 + half <= 0.0) throw StepTooLarge("1 + h alpha / 2 <= 0");
  const Vector grad0 = sys.potential.gradient(s.x);
  const double f0 = sys.forcing ? sys.force(s.t) : 0.0;
  const double f1 = sys.forcing ? sys.force(s.t + h) : 0.0;

  ContactState out;
  out.t = s.t + h;
  out.x = s.x + h * (1.0 - half) * s.p - 0.5 * h * h * grad0;
  if (sys.forcing) out.x.array() += 0.5 * h * h * f0;
  out.p = (1.0 - half) * s.p - 0.5 * h * (sys.potential.gradient(out.x) + grad0);
  if (sys.forcing) out.p.array() += 0.5 * h * (f1 + f0);
  out.p /= 1.0 + half;

  // z+ (1 + h alpha/2) = z (1 - h alpha/2) + h K, K the z-free part of L.
  double k = kinetic_and_potential(sys, s.x, out.x, h);
  if (sys.forcing) k += 0.5 * (f0 * s.x[0] + f1 * out.x[0]);
  out.z = (s.z * (1.0 - half) + h * k) / (1.0 + half);
  return out;
}

}  // namespace

std::string_view to_string(StepperId id) noexcept {
  switch (id) {
    case StepperId::Contact1: return "Contact1";
    case StepperId::Contact2: return "Contact2";
    case StepperId::ContactQuadZ: return "ContactQuadZ";
    case StepperId::Contact2Forced: return "Contact2Forced";
    case StepperId::Leapfrog: return "Leapfrog";
    case StepperId::Ruth3: return "Ruth3";
    case StepperId::RK4: return "RK4";
    case StepperId::VNC: return "VNC";
  }
  return "unknown";
}

std::optional<StepperId> parse_stepper(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string key = lower(name);
  for (StepperId id : kAllSteppers) {
    if (lower(to_string(id)) == key) return id;
  }
  return std::nullopt;
}

bool is_contact(StepperId id) noexcept {
  return id == StepperId::Contact1 || id == StepperId::Contact2 ||
         id == StepperId::ContactQuadZ || id == StepperId::Contact2Forced;
}

StepFunction step_function(StepperId id) {
  switch (id) {
    case StepperId::Contact1: return contact1_step;
    case StepperId::Contact2: return contact2_step;
    case StepperId::ContactQuadZ: return contact_quad_z_step;
    case StepperId::Contact2Forced: return contact2_forced_step;
    case StepperId::Leapfrog:
      return [](const OscillatorSystem& sys, const ContactState& s, double h) {
        return leapfrog_step(sys, s, h);
      };
    case StepperId::Ruth3: return ruth3_step;
    case StepperId::RK4: return rk4_step;
    case StepperId::VNC: break;
  }
  throw UnsupportedSystem("VNC is a two-step recursion without a one-step map");
}

std::optional<DiscreteLagrangian> discrete_lagrangian_for(StepperId id,
                                                          const OscillatorSystem& sys) {
  switch (id) {
    case StepperId::Contact1: return contact1_lagrangian(sys);
    case StepperId::Contact2: return contact2_lagrangian(sys);
    case StepperId::ContactQuadZ: return contact_quad_z_lagrangian(sys);
    case StepperId::Contact2Forced: return contact2_forced_lagrangian(sys);
    default: return std::nullopt;
  }
}

ContactState contact1_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  require_linear_unforced(sys, "contact1_step");
  const double shrink = 1.0 - h * sys.alpha;
  const Vector grad0 = sys.potential.gradient(s.x);

  ContactState out;
  out.t = s.t + h;
  out.x = s.x + h * shrink * s.p - 0.5 * h * h * grad0;
  out.p = shrink * s.p - 0.5 * h * (sys.potential.gradient(out.x) + grad0);
  out.z = s.z + h * (kinetic_and_potential(sys, s.x, out.x, h) - sys.alpha * s.z);
  return out;
}

ContactState contact2_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  require_linear_unforced(sys, "contact2_step");
  return contact2_impl(sys, s, h);
}

ContactState contact2_forced_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  require_linear(sys, "contact2_forced_step");
  return contact2_impl(sys, s, h);
}

ContactState contact_quad_z_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  if (sys.damping != DampingKind::QuadraticZ || sys.forcing) {
    throw UnsupportedSystem("contact_quad_z_step requires quadratic damping without forcing");
  }
  const double a = 0.25 * h * sys.alpha;
  const Vector grad0 = sys.potential.gradient(s.x);

  ContactState out;
  out.t = s.t + h;
  out.x = s.x + h * (1.0 - 2.0 * a * s.z) * s.p - 0.5 * h * h * grad0;

  // a z+^2 + z+ - c = 0; the root 2c / (1 + sqrt(1 + 4ac)) is the one that
  // tends to c as h -> 0.
  const double c = s.z + h * kinetic_and_potential(sys, s.x, out.x, h) - a * s.z * s.z;
  const double disc = 1.0 + 4.0 * a * c;
  if (!(disc >= 0.0)) throw NoConvergence("quadratic z-update has no real root");
  out.z = 2.0 * c / (1.0 + std::sqrt(disc));

  const double denom = 1.0 + 2.0 * a * out.z;
  if (std::abs(denom) < 1e-12) throw SingularUpdate("1 + (h/2) alpha z+ is singular");
  out.p = ((1.0 - 2.0 * a * s.z) * s.p -
           0.5 * h * (grad0 + sys.potential.gradient(out.x))) / denom;
  return out;
}

LeapfrogState leapfrog_step(const OscillatorSystem& sys, const LeapfrogState& ls, double h) {
  require_linear(sys, "leapfrog_step");
  const ContactState& s = ls.state;
  const double half = 0.5 * h * sys.alpha;
  const Vector f0 = sys.force_vector(s.t, s.x.size());
  const Vector f1 = sys.force_vector(s.t + h, s.x.size());

  // pi_{j+1/2} = pi_j - (h/2)(V'(x_j) + alpha pi_{j+1/2} - f(t_j))
  const Vector pi_half = (s.p - 0.5 * h * (sys.potential.gradient(s.x) - f0)) / (1.0 + half);

  LeapfrogState out;
  out.pi_half = pi_half;
  out.state.t = s.t + h;
  out.state.x = s.x + h * pi_half;
  out.state.p = pi_half - 0.5 * h * (sys.potential.gradient(out.state.x) + sys.alpha * pi_half - f1);
  out.state.z = trapezoidal_z(sys, s, out.state.x, out.state.p, h);
  return out;
}

ContactState leapfrog_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  return leapfrog_step(sys, LeapfrogState{s, Vector{}}, h).state;
}

Vector leapfrog_momentum_from_contact(const OscillatorSystem& sys, double t, const Vector& x,
                                      const Vector& p, double h) {
  require_linear(sys, "leapfrog_momentum_from_contact");
  const double q = 0.25 * h * h * sys.alpha;
  return (1.0 - q * sys.alpha) * p - q * (sys.potential.gradient(x) - sys.force_vector(t, x.size()));
}

Vector contact_momentum_from_leapfrog(const OscillatorSystem& sys, double t, const Vector& x,
                                      const Vector& pi, double h) {
  require_linear(sys, "contact_momentum_from_leapfrog");
  const double q = 0.25 * h * h * sys.alpha;
  return (pi + q * (sys.potential.gradient(x) - sys.force_vector(t, x.size()))) /
         (1.0 - q * sys.alpha);
}

ContactState ruth3_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  require_linear(sys, "ruth3_step");
  // Ruth's third-order kick-drift coefficients.
  static constexpr std::array<double, 3> kKick = {7.0 / 24.0, 3.0 / 4.0, -1.0 / 24.0};
  static constexpr std::array<double, 3> kDrift = {2.0 / 3.0, -2.0 / 3.0, 1.0};

  Vector x = s.x;
  Vector p = s.p;
  double t_x = s.t;  // time at which the current x lives
  for (std::size_t i = 0; i < 3; ++i) {
    p += kKick[i] * h * reference_accel(sys, t_x, x, p);
    x += kDrift[i] * h * p;
    t_x += kDrift[i] * h;
  }
  ContactState out;
  out.t = s.t + h;
  out.x = std::move(x);
  out.p = std::move(p);
  out.z = trapezoidal_z(sys, s, out.x, out.p, h);
  return out;
}

ContactState rk4_step(const OscillatorSystem& sys, const ContactState& s, double h) {
  auto shifted = [&s](double dt, const ContactVelocity& k, double scale) {
    ContactState y;
    y.t = s.t + dt;
    y.x = s.x + scale * k.dx;
    y.p = s.p + scale * k.dp;
    y.z = s.z + scale * k.dz;
    return y;
  };
  const ContactVelocity k1 = contact_vector_field(sys, s);
  const ContactVelocity k2 = contact_vector_field(sys, shifted(0.5 * h, k1, 0.5 * h));
  const ContactVelocity k3 = contact_vector_field(sys, shifted(0.5 * h, k2, 0.5 * h));
  const ContactVelocity k4 = contact_vector_field(sys, shifted(h, k3, h));

  ContactState out;
  out.t = s.t + h;
  out.x = s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.p = s.p + (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.z = s.z + (h / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
  return out;
}

VncState vnc_step(const OscillatorSystem& sys, const VncState& s, double h) {
  require_linear(sys, "vnc_step");
  const double inv_h2 = 1.0 / (h * h);
  const double damp = sys.alpha / (2.0 * h);
  const Vector rhs = (2.0 * s.x_cur - s.x_prev) * inv_h2 + damp * s.x_prev -
                     sys.potential.gradient(s.x_cur) + sys.force_vector(s.t, s.x_cur.size());
  return VncState{s.t + h, s.x_cur, rhs / (inv_h2 + damp)};
}

Vector vnc_taylor_start(const OscillatorSystem& sys, const ContactState& s, double h) {
  return s.x + h * s.p + 0.5 * h * h * reference_accel(sys, s.t, s.x, s.p);
}

namespace {

void record_diagnostics(Trajectory& traj, const OscillatorSystem& sys,
                        const std::optional<DiscreteLagrangian>& L) {
  const HerglotzLagrangian lag = HerglotzLagrangian::from_system(sys);
  traj.hamiltonian.clear();
  traj.energy.clear();
  traj.conformal.clear();
  for (const ContactState& s : traj.states) {
    traj.hamiltonian.push_back(contact_hamiltonian(sys, s));
    traj.energy.push_back(energy(lag, s.t, s.x, s.p, s.z));
  }
  if (!L) return;
  double product = 1.0;
  traj.conformal.push_back(product);
  for (std::size_t j = 0; j + 1 < traj.states.size(); ++j) {
    const ContactState& a = traj.states[j];
    const ContactState& b = traj.states[j + 1];
    product *= discrete_conformal_factor(*L, Window{a.x, b.x, a.z, b.z, a.t, traj.h});
    traj.conformal.push_back(product);
  }
}

void require_step_args(const ContactState& initial, double h, const OscillatorSystem& sys) {
  validate(initial);
  sys.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("step size must be positive");
}

Trajectory integrate_vnc(const OscillatorSystem& sys, const ContactState& initial, double h,
                         std::size_t n_steps, const IntegrateOptions& opts) {
  Trajectory traj;
  traj.method_id = std::string(to_string(StepperId::VNC));
  traj.h = h;
  traj.t0 = initial.t;

  // Positions x_0 .. x_{n+1}; the extra one yields a central-difference p_n.
  std::vector<Vector> xs;
  xs.reserve(n_steps + 2);
  xs.push_back(initial.x);
  xs.push_back(opts.vnc_x1 ? *opts.vnc_x1 : vnc_taylor_start(sys, initial, h));
  if (xs.back().size() != initial.x.size()) throw InvalidArgument("VNC seed dimension mismatch");
  VncState vs{traj.time(1), xs[0], xs[1]};
  for (std::size_t j = 1; j <= n_steps; ++j) {
    try {
      vs = vnc_step(sys, vs, h);
    } catch (const Error& e) {
      throw StepFailure(j, e.what());
    }
    vs.t = traj.time(j + 1);
    if (!vs.x_cur.allFinite()) throw StepFailure(j, "non-finite VNC position");
    xs.push_back(vs.x_cur);
  }

  traj.states.reserve(n_steps + 1);
  ContactState s = initial;
  traj.states.push_back(s);
  for (std::size_t j = 1; j <= n_steps; ++j) {
    ContactState next;
    next.t = traj.time(j);
    next.x = xs[j];
    next.p = (xs[j + 1] - xs[j - 1]) / (2.0 * h);
    next.z = trapezoidal_z(sys, s, next.x, next.p, h);
    traj.states.push_back(next);
    s = std::move(next);
  }
  record_diagnostics(traj, sys, std::nullopt);
  return traj;
}

template <class Step>
Trajectory drive(std::string method, const ContactState& initial, double h, std::size_t n_steps, Step&& step) {
  Trajectory traj;
  traj.method_id = std::move(method);
  traj.h = h;
  traj.t0 = initial.t;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(initial);
  for (std::size_t j = 1; j <= n_steps; ++j) {
    ContactState next;
    try {
      next = step(traj.states.back());
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(j, e.what());
    }
    if (!next.x.allFinite() || !next.p.allFinite() || !std::isfinite(next.z)) {
      throw StepFailure(j, "non-finite state");
    }
    next.t = traj.time(j);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

}  // namespace

Trajectory integrate(StepperId id, const OscillatorSystem& sys, const ContactState& initial,
                     double h, std::size_t n_steps, const IntegrateOptions& opts) {
  require_step_args(initial, h, sys);
  if (id == StepperId::VNC) return integrate_vnc(sys, initial, h, n_steps, opts);

  const StepFunction step = step_function(id);
  Trajectory traj = drive(std::string(to_string(id)), initial, h, n_steps,
                          [&](const ContactState& s) { return step(sys, s, h); });
  record_diagnostics(traj, sys, discrete_lagrangian_for(id, sys));
  return traj;
}

Trajectory integrate_variational(const DiscreteLagrangian& L, const OscillatorSystem& sys,
                                 const ContactState& initial, double h, std::size_t n_steps) {
  require_step_args(initial, h, sys);
  Trajectory traj = drive("variational:" + L.name(), initial, h, n_steps,
                          [&](const ContactState& s) { return position_momentum_step(L, s, h); });
  record_diagnostics(traj, sys, L);
  return traj;
}

}  // namespace contact
