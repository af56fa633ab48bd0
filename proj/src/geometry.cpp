#include "contact/geometry.hpp"

#include "contact/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace contact {

namespace {

Vector pack(const ContactState& s) {
  const Eigen::Index n = s.x.size();
  Vector y(2 * n + 1);
  y << s.x, s.p, s.z;
  return y;
}

ContactState unpack(const Vector& y, double t) {
  const Eigen::Index n = (y.size() - 1) / 2;
  ContactState s;
  s.t = t;
  s.x = y.head(n);
  s.p = y.segment(n, n);
  s.z = y[2 * n];
  return s;
}

}  // namespace

Matrix one_step_jacobian(const StepFunction& stepper, const OscillatorSystem& sys,
                         const ContactState& state, double h, double fd_eps) {
  if (!(fd_eps > 0.0)) throw InvalidArgument("fd_eps must be positive");
  validate(state);
  const Vector y = pack(state);
  const Eigen::Index m = y.size();
  Matrix J(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double step = fd_eps * std::max(1.0, std::abs(y[i]));
    Vector yp = y;
    Vector ym = y;
    yp[i] += step;
    ym[i] -= step;
    const Vector fp = pack(stepper(sys, unpack(yp, state.t), h));
    const Vector fm = pack(stepper(sys, unpack(ym, state.t), h));
    J.col(i) = (fp - fm) / (2.0 * step);
  }
  return J;
}

Vector contact_form(const ContactState& state) {
  const Eigen::Index n = state.x.size();
  Vector eta = Vector::Zero(2 * n + 1);
  eta.head(n) = -state.p;
  eta[2 * n] = 1.0;
  return eta;
}

ContactCheckReport contactness_check(const StepFunction& stepper, const OscillatorSystem& sys,
                                     const ContactState& state, double h, double fd_eps,
                                     std::optional<double> predicted) {
  const ContactState next = stepper(sys, state, h);
  const Matrix J = one_step_jacobian(stepper, sys, state, h, fd_eps);
  const Vector w = J.transpose() * contact_form(next);
  const Vector eta = contact_form(state);

  ContactCheckReport report;
  report.point = state;
  report.measured_factor = w[w.size() - 1];
  report.pullback_residual = (w - report.measured_factor * eta).lpNorm<Eigen::Infinity>();
  report.predicted_factor = predicted.value_or(std::numeric_limits<double>::quiet_NaN());
  report.fd_step = fd_eps;
  return report;
}

ContactCheckReport contactness_check(StepperId id, const OscillatorSystem& sys,
                                     const ContactState& state, double h, double fd_eps) {
  const StepFunction stepper = step_function(id);
  double predicted = 0.0;
  if (const auto L = discrete_lagrangian_for(id, sys)) {
    const ContactState next = stepper(sys, state, h);
    predicted = conformal_factor_prediction(*L, Window{state.x, next.x, state.z, next.z, state.t, h});
  } else {
    predicted = std::exp(-h * sys.damping_rate(state.z));
  }
  return contactness_check(stepper, sys, state, h, fd_eps, predicted);
}

double conformal_factor_prediction(const DiscreteLagrangian& L, const Window& window) {
  return discrete_conformal_factor(L, window);
}

std::vector<double> cumulative_conformal(const Trajectory& traj, const DiscreteLagrangian& L) {
  std::vector<double> out;
  if (traj.states.empty()) return out;
  out.reserve(traj.size());
  double product = 1.0;
  out.push_back(product);
  for (std::size_t j = 0; j + 1 < traj.size(); ++j) {
    const ContactState& a = traj.states[j];
    const ContactState& b = traj.states[j + 1];
    product *= conformal_factor_prediction(L, Window{a.x, b.x, a.z, b.z, a.t, traj.h});
    out.push_back(product);
  }
  return out;
}

std::vector<double> hamiltonian_decay_report(const Trajectory& traj, const OscillatorSystem& sys) {
  std::vector<double> out;
  if (traj.states.empty()) return out;
  std::vector<double> H;
  H.reserve(traj.size());
  for (const ContactState& s : traj.states) H.push_back(contact_hamiltonian(sys, s));

  if (sys.damping == DampingKind::LinearZ) {
    for (std::size_t j = 0; j < traj.size(); ++j) {
      const double elapsed = traj.states[j].t - traj.states.front().t;
      out.push_back(H[j] - H.front() * std::exp(-sys.alpha * elapsed));
    }
    return out;
  }
  for (std::size_t j = 0; j + 1 < traj.size(); ++j) {
    const double z_mid = 0.5 * (traj.states[j].z + traj.states[j + 1].z);
    const double h_mid = 0.5 * (H[j] + H[j + 1]);
    out.push_back((H[j + 1] - H[j]) / traj.h + sys.alpha * z_mid * h_mid);
  }
  return out;
}

double pi_p_relation_check(const Trajectory& contact_traj, const Trajectory& leapfrog_traj,
                           const OscillatorSystem& sys, double h) {
  if (contact_traj.size() != leapfrog_traj.size()) {
    throw MismatchedTrajectories("trajectories have different lengths");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < contact_traj.size(); ++j) {
    const ContactState& c = contact_traj.states[j];
    const ContactState& l = leapfrog_traj.states[j];
    const double gap = (c.x - l.x).lpNorm<Eigen::Infinity>();
    if (!(gap <= 1e-10)) {
      std::ostringstream os;
      os << "x-histories differ by " << gap << " at step " << j;
      throw MismatchedTrajectories(os.str());
    }
    const Vector pi = leapfrog_momentum_from_contact(sys, c.t, c.x, c.p, h);
    worst = std::max(worst, (l.p - pi).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace contact
