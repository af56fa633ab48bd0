#include "contact/core.hpp"

#include "contact/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace contact {

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string("non-finite entry in ") + what);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string("non-finite ") + what);
}

void require_same_dim(const Vector& a, const Vector& b) {
  if (a.size() == 0 || a.size() != b.size()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

// Forcing couples to a scalar configuration only.
double forcing_work(const OscillatorSystem& sys, double t, const Vector& x) {
  if (!sys.forcing) return 0.0;
  if (x.size() != 1) throw InvalidArgument("forced systems require a scalar configuration");
  return sys.force(t) * x[0];
}

// Homogeneous solution of x'' + alpha x' + x = 0, written through
// C(t) = cos(w t), S(t) = sin(w t) / w with w^2 = s = 1 - alpha^2/4, which are
// entire in s. This keeps the three damping regimes a single continuous family.
PhasePoint homogeneous(double alpha, double x0, double v0, double t) {
  const double gamma = 0.5 * alpha;
  const double s = 1.0 - gamma * gamma;
  const double b = v0 + gamma * x0;

  if (std::abs(alpha - 2.0) < 1e-8) {
    // Critical branch: truncated series in s (|s| < 1e-8).
    const double t2 = t * t;
    const double c = 1.0 - s * t2 / 2.0 + s * s * t2 * t2 / 24.0;
    const double sn = t * (1.0 - s * t2 / 6.0 + s * s * t2 * t2 / 120.0);
    const double decay = std::exp(-gamma * t);
    return {decay * (x0 * c + b * sn), decay * (v0 * c - (gamma * b + s * x0) * sn)};
  }
  if (s > 0.0) {
    const double w = std::sqrt(s);
    const double decay = std::exp(-gamma * t);
    const double c = std::cos(w * t);
    const double sn = std::sin(w * t) / w;
    return {decay * (x0 * c + b * sn), decay * (v0 * c - (gamma * b + s * x0) * sn)};
  }
  // Overdamped: expand e^{-gamma t} cosh(mu t), e^{-gamma t} sinh(mu t) into
  // decaying exponentials so large t cannot overflow.
  const double mu = std::sqrt(-s);
  const double slow = std::exp((mu - gamma) * t);
  const double fast = std::exp(-(mu + gamma) * t);
  const double c = 0.5 * (slow + fast);
  const double sn = 0.5 * (slow - fast) / mu;
  return {x0 * c + b * sn, v0 * c - (gamma * b + s * x0) * sn};
}

}  // namespace

ContactState make_state(double t, double x, double p, double z) {
  ContactState s;
  s.t = t;
  s.x = Vector::Constant(1, x);
  s.p = Vector::Constant(1, p);
  s.z = z;
  return s;
}

void validate(const ContactState& state) {
  require_same_dim(state.x, state.p);
  require_finite(state.x, "x");
  require_finite(state.p, "p");
  require_finite(state.t, "t");
  require_finite(state.z, "z");
}

Potential Potential::harmonic() {
  return Potential{"harmonic", [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                   [](const Vector& x) -> Vector { return x; }};
}

double gradient_error(const Potential& potential, const Vector& x) {
  const Vector analytic = potential.gradient(x);
  Vector fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vector xp = x;
    Vector xm = x;
    xp[i] += step;
    xm[i] -= step;
    fd[i] = (potential.value(xp) - potential.value(xm)) / (2.0 * step);
  }
  return (analytic - fd).norm() / std::max(1.0, analytic.norm());
}

void verify_gradient(const Potential& potential, std::size_t dim, std::uint64_t seed,
                     int n_points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int k = 0; k < n_points; ++k) {
    Vector x(static_cast<Eigen::Index>(dim));
    for (auto& c : x) c = unif(rng);
    const double err = gradient_error(potential, x);
    if (!(err <= 1e-6)) {
      std::ostringstream os;
      os << "potential '" << potential.name << "' gradient mismatch: relative error " << err;
      throw InvalidArgument(os.str());
    }
  }
}

double Forcing::operator()(double t) const { return beta * std::sin(omega * t); }

Vector OscillatorSystem::force_vector(double t, Eigen::Index n) const {
  Vector f = Vector::Zero(n);
  if (forcing) {
    if (n != 1) throw InvalidArgument("forced systems require a scalar configuration");
    f[0] = force(t);
  }
  return f;
}

double OscillatorSystem::damping_term(double z) const {
  return damping == DampingKind::LinearZ ? alpha * z : 0.5 * alpha * z * z;
}

double OscillatorSystem::damping_rate(double z) const {
  return damping == DampingKind::LinearZ ? alpha : alpha * z;
}

void OscillatorSystem::validate() const {
  require_finite(alpha, "alpha");
  if (alpha < 0.0) throw InvalidArgument("alpha must be non-negative");
  if (!potential.value || !potential.gradient) throw InvalidArgument("potential is incomplete");
  if (forcing) {
    require_finite(forcing->beta, "beta");
    require_finite(forcing->omega, "omega");
    if (damping == DampingKind::QuadraticZ) {
      throw InvalidArgument("forcing is only supported with linear damping");
    }
  }
}

OscillatorSystem OscillatorSystem::damped(double alpha) {
  OscillatorSystem sys;
  sys.alpha = alpha;
  return sys;
}

OscillatorSystem OscillatorSystem::quadratic(double alpha) {
  OscillatorSystem sys;
  sys.alpha = alpha;
  sys.damping = DampingKind::QuadraticZ;
  return sys;
}

OscillatorSystem OscillatorSystem::forced(double alpha, double beta, double omega) {
  OscillatorSystem sys;
  sys.alpha = alpha;
  sys.forcing = Forcing{beta, omega};
  return sys;
}

HerglotzLagrangian HerglotzLagrangian::from_system(const OscillatorSystem& sys) {
  HerglotzLagrangian lag;
  lag.eval = [sys](double t, const Vector& x, const Vector& v, double z) {
    return eval_lagrangian(sys, t, x, v, z);
  };
  lag.d_x = [sys](double t, const Vector& x, const Vector&, double) -> Vector {
    return -sys.potential.gradient(x) + sys.force_vector(t, x.size());
  };
  lag.d_v = [](double, const Vector&, const Vector& v, double) -> Vector { return v; };
  lag.d_z = [sys](double, const Vector&, const Vector&, double z) {
    return -sys.damping_rate(z);
  };
  return lag;
}

double eval_lagrangian(const OscillatorSystem& sys, double t, const Vector& x, const Vector& v,
                       double z) {
  require_same_dim(x, v);
  require_finite(x, "x");
  require_finite(v, "v");
  require_finite(z, "z");
  require_finite(t, "t");
  return 0.5 * v.squaredNorm() - sys.potential.value(x) - sys.damping_term(z) +
         forcing_work(sys, t, x);
}

double contact_hamiltonian(const OscillatorSystem& sys, const ContactState& state) {
  return 0.5 * state.p.squaredNorm() + sys.potential.value(state.x) + sys.damping_term(state.z) -
         forcing_work(sys, state.t, state.x);
}

ContactVelocity contact_vector_field(const OscillatorSystem& sys, const ContactState& state) {
  const double H = contact_hamiltonian(sys, state);
  const Vector dH_dx = sys.potential.gradient(state.x) - sys.force_vector(state.t, state.x.size());
  const double dH_dz = sys.damping_rate(state.z);
  ContactVelocity out;
  out.dx = state.p;
  out.dp = -dH_dx - dH_dz * state.p;
  out.dz = state.p.squaredNorm() - H;
  return out;
}

Vector continuous_gel_residual(const HerglotzLagrangian& lag, double t, const Vector& x,
                               const Vector& v, const Vector& a, double z, double zdot) {
  require_same_dim(x, v);
  require_same_dim(x, a);
  const double L = lag.eval(t, x, v, z);
  if (std::abs(zdot - L) > 1e-10 * (1.0 + std::abs(L))) {
    std::ostringstream os;
    os << "zdot = " << zdot << " is inconsistent with L = " << L;
    throw InvalidArgument(os.str());
  }
  // d/dt dL/dv as a directional central difference along (1, v, a, zdot).
  const double scale = std::max({1.0, std::abs(t), x.lpNorm<Eigen::Infinity>(),
                                 v.lpNorm<Eigen::Infinity>(), std::abs(z)});
  const double s = 1e-6 * scale;
  const Vector fwd = lag.d_v(t + s, x + s * v, v + s * a, z + s * zdot);
  const Vector bwd = lag.d_v(t - s, x - s * v, v - s * a, z - s * zdot);
  const Vector ddt_dv = (fwd - bwd) / (2.0 * s);
  return lag.d_x(t, x, v, z) - ddt_dv + lag.d_z(t, x, v, z) * lag.d_v(t, x, v, z);
}

double energy(const HerglotzLagrangian& lag, double t, const Vector& x, const Vector& v,
              double z) {
  return lag.d_v(t, x, v, z).dot(v) - lag.eval(t, x, v, z);
}

PhasePoint exact_damped_solution(double alpha, double x0, double v0, double t) {
  return homogeneous(alpha, x0, v0, t);
}

PhasePoint exact_forced_solution(double alpha, double beta, double omega, double x0, double v0,
                                 double t) {
  const double detune = 1.0 - omega * omega;
  const double denom = detune * detune + alpha * alpha * omega * omega;
  if (denom == 0.0) throw DomainError("resonant forcing (alpha = 0, omega = 1) is unbounded");
  const double k = beta / denom;
  auto particular = [&](double tau) {
    const double sn = std::sin(omega * tau);
    const double cs = std::cos(omega * tau);
    return PhasePoint{k * (detune * sn - alpha * omega * cs),
                      k * omega * (detune * cs + alpha * omega * sn)};
  };
  const PhasePoint p0 = particular(0.0);
  const PhasePoint hom = homogeneous(alpha, x0 - p0.x, v0 - p0.v, t);
  const PhasePoint pt = particular(t);
  return {hom.x + pt.x, hom.v + pt.v};
}

}  // namespace contact
