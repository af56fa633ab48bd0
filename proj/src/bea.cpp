#include "contact/bea.hpp"

#include "contact/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace contact {

namespace {

void require_order(int k) {
  if (k < 0 || k > 2) throw InvalidArgument("truncation order must be 0, 1 or 2");
}

void require_bea_method(StepperId method) {
  if (method != StepperId::Contact1 && method != StepperId::Contact2) {
    throw UnsupportedSystem("modified equations are available for Contact1 and Contact2 only, not " +
                            std::string(to_string(method)));
  }
}

std::size_t steps_for(double T, double h) {
  const double n = T / h;
  const double rounded = std::round(n);
  if (!(h > 0.0) || std::abs(n - rounded) > 1e-9 * std::max(1.0, n) || rounded < 1.0) {
    throw InvalidArgument("T / h must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

struct Sample {
  double x;
  double v;
  double z;
};

// RK4 on (x, v, z) with `sub` internal steps per sample interval.
std::vector<Sample> sample_modified(const ModifiedSystem& m, double h, std::size_t n,
                                    const Sample& start, int sub) {
  auto field = [&](const Sample& s) {
    return Sample{s.v, m.accel(s.x, s.v, s.z, h), m.zdot(s.x, s.v, s.z, h)};
  };
  auto axpy = [](const Sample& s, double a, const Sample& d) {
    return Sample{s.x + a * d.x, s.v + a * d.v, s.z + a * d.z};
  };
  const double dt = h / sub;
  std::vector<Sample> out;
  out.reserve(n + 1);
  out.push_back(start);
  Sample s = start;
  for (std::size_t j = 0; j < n; ++j) {
    for (int i = 0; i < sub; ++i) {
      const Sample k1 = field(s);
      const Sample k2 = field(axpy(s, 0.5 * dt, k1));
      const Sample k3 = field(axpy(s, 0.5 * dt, k2));
      const Sample k4 = field(axpy(s, dt, k3));
      s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    }
    out.push_back(s);
  }
  return out;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

double modified_accel(StepperId method, double alpha, double x, double v, double /*z*/, double h,
                      int k) {
  require_bea_method(method);
  require_order(k);
  const double a2 = alpha * alpha;
  const double a3 = a2 * alpha;
  double out = -x - alpha * v;
  if (method == StepperId::Contact1) {
    if (k >= 1) out -= 0.5 * h * a2 * v;
    if (k >= 2) out -= h * h / 12.0 * ((a2 + 1.0) * x + 4.0 * a3 * v);
  } else if (k >= 2) {
    out -= h * h / 12.0 * (a3 * v + a2 * x + x);
  }
  return out;
}

double modified_zdot(StepperId method, double alpha, double x, double v, double z, double h,
                     int k) {
  require_bea_method(method);
  require_order(k);
  const double a2 = alpha * alpha;
  const double a3 = a2 * alpha;
  const double lag = 0.5 * v * v - 0.5 * x * x - alpha * z;
  double out = lag;
  if (method == StepperId::Contact1) {
    if (k >= 1) out += 0.5 * h * alpha * lag;
    if (k >= 2) {
      out -= h * h / 24.0 *
             ((4.0 * a2 - 1.0) * x * x - (5.0 * a2 - 2.0) * v * v - 4.0 * alpha * x * v +
              8.0 * a3 * z);
    }
  } else if (k >= 2) {
    out -= h * h / 24.0 *
           ((a2 - 1.0) * x * x - (2.0 * a2 - 2.0) * v * v - 4.0 * alpha * x * v + 2.0 * a3 * z);
  }
  return out;
}

double modified_lagrangian_contact1(double alpha, double x, double v, double z, double h) {
  return (1.0 + 0.5 * h * alpha) * (0.5 * v * v - 0.5 * x * x - alpha * z);
}

ModifiedSystem make_modified_system(StepperId method, const OscillatorSystem& sys, int k) {
  require_bea_method(method);
  require_order(k);
  if (!sys.potential.is_harmonic() || sys.damping != DampingKind::LinearZ || sys.forcing) {
    throw UnsupportedSystem(
        "modified equations are known only for the unforced harmonic oscillator with linear "
        "damping");
  }
  ModifiedSystem m;
  m.method = method;
  m.k = k;
  m.alpha = sys.alpha;
  const double alpha = sys.alpha;
  m.accel = [method, alpha, k](double x, double v, double z, double h) {
    return modified_accel(method, alpha, x, v, z, h, k);
  };
  m.zdot = [method, alpha, k](double x, double v, double z, double h) {
    return modified_zdot(method, alpha, x, v, z, h, k);
  };
  return m;
}

OrderFit fit_log_slope(const std::vector<double>& hs, const std::vector<double>& values) {
  if (hs.size() != values.size() || hs.size() < 2) {
    throw InvalidArgument("slope fit needs at least two paired samples");
  }
  const auto n = static_cast<Eigen::Index>(hs.size());
  Matrix A(n, 2);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!(hs[idx] > 0.0) || !(values[idx] > 0.0)) {
      throw DomainError("slope fit needs positive step sizes and values");
    }
    A(i, 0) = std::log(hs[idx]);
    A(i, 1) = 1.0;
    b[i] = std::log(values[idx]);
  }
  const Vector coef = A.colPivHouseholderQr().solve(b);
  const Vector r = A * coef - b;
  return OrderFit{coef[0], std::sqrt(r.squaredNorm() / static_cast<double>(n))};
}

DefectEstimate defect_order_estimate(const ModifiedSystem& modified, const DiscreteLagrangian& L,
                                     const std::vector<double>& h_list, double T,
                                     const ContactState& initial) {
  if (h_list.size() < 3) throw InvalidArgument("defect estimate needs at least three step sizes");
  validate(initial);
  if (initial.dim() != 1) throw InvalidArgument("modified systems are scalar");

  DefectEstimate out;
  out.h_list = h_list;
  const Sample start{initial.x[0], initial.p[0], initial.z};
  for (double h : h_list) {
    const std::size_t n = steps_for(T, h);
    if (n < 2) throw InvalidArgument("defect estimate needs T >= 2 h");
    const std::vector<Sample> s = sample_modified(modified, h, n, start, 100);

    double zdef = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Window w{scalar(s[j].x), scalar(s[j + 1].x), s[j].z, s[j + 1].z,
                     initial.t + static_cast<double>(j) * h, h};
      zdef = std::max(zdef, std::abs((s[j + 1].z - s[j].z) / h - L(w)));
    }
    double xdef = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const StepTriple tr{scalar(s[j - 1].x), scalar(s[j].x), scalar(s[j + 1].x),
                          s[j - 1].z,         s[j].z,         s[j + 1].z,
                          initial.t + static_cast<double>(j) * h, h};
      // dgel_residual is minus the second-difference form.
      xdef = std::max(xdef, dgel_residual(L, tr).lpNorm<Eigen::Infinity>());
    }
    out.x_defects.push_back(xdef);
    out.z_defects.push_back(zdef);
    out.defects.push_back(std::max(xdef, zdef));
  }
  out.fit = fit_log_slope(out.h_list, out.defects);
  return out;
}

DefectEstimate defect_order_estimate(StepperId method, int k, const OscillatorSystem& sys,
                                     const std::vector<double>& h_list, double T,
                                     const ContactState& initial) {
  const ModifiedSystem m = make_modified_system(method, sys, k);
  const auto L = discrete_lagrangian_for(method, sys);
  return defect_order_estimate(m, *L, h_list, T, initial);
}

ConvergenceEstimate convergence_order_estimate(StepperId id, const OscillatorSystem& sys,
                                               const ExactSolution& exact,
                                               const std::vector<double>& h_list, double T,
                                               const ContactState& initial) {
  if (h_list.size() < 2) throw InvalidArgument("convergence estimate needs two step sizes");
  ConvergenceEstimate out;
  out.h_list = h_list;
  for (double h : h_list) {
    const std::size_t n = steps_for(T, h);
    IntegrateOptions opts;
    if (id == StepperId::VNC) {
      opts.vnc_x1 = Vector::Constant(initial.x.size(), exact(initial.t + h).x);
    }
    const Trajectory traj = integrate(id, sys, initial, h, n, opts);
    const double x_exact = exact(traj.time(n)).x;
    out.errors.push_back(std::abs(traj.states.back().x[0] - x_exact));
  }
  out.fit = fit_log_slope(out.h_list, out.errors);
  return out;
}

}  // namespace contact
