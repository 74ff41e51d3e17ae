// Numerical integration of the geodesic flow and conservation-drift
// measurement.  Two integrators: an embedded Dormand-Prince 5(4) pair with PI
// step control for accuracy-controlled runs, and the implicit midpoint rule,
// which is exactly symplectic for the constant-coefficient form here (the
// field is linear, so the midpoint map is a Cayley transform).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ncrec/calculus.hpp"
#include "ncrec/core.hpp"
#include "ncrec/dynamics.hpp"
#include "ncrec/errors.hpp"
#include "ncrec/linalg.hpp"
#include "ncrec/recursion.hpp"

namespace ncrec {

enum class IntegratorMethod { adaptive_rk, implicit_midpoint };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::implicit_midpoint;
  double t_end = 20.0;
  double dt = 1e-3;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double newton_tol = 1e-13;
  int newton_max_iter = 10;

  void validate() const {
    if (!(t_end > 0.0) || !(dt > 0.0) || !(rel_tol > 0.0) || !(abs_tol > 0.0) ||
        !(newton_tol > 0.0) || newton_max_iter < 1)
      throw Error(ErrorKind::InvalidValue, "integrator configuration out of range");
  }
};

struct Trajectory {
  std::vector<double> t;
  std::vector<PhasePoint> x;
  DeformationParams params;
  bool domain_exit = false;

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline Point8 axpy(const Point8& x, const Point8& k, double c) {
  Point8 r;
  for (std::size_t i = 0; i < 8; ++i) r[i] = x[i] + c * k[i];
  return r;
}

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order weights (the embedded solution uses the FSAL stage).
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

template <class XF>
Point8 dopri5_step(const XF& f, const Point8& x, double h, double& err_norm, double rel_tol,
                   double abs_tol) {
  using T = Dopri5;
  const Point8 k1 = f(x);
  const Point8 k2 = f(axpy(x, k1, h * T::a21));
  Point8 tmp;
  for (std::size_t i = 0; i < 8; ++i) tmp[i] = x[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
  const Point8 k3 = f(tmp);
  for (std::size_t i = 0; i < 8; ++i)
    tmp[i] = x[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
  const Point8 k4 = f(tmp);
  for (std::size_t i = 0; i < 8; ++i)
    tmp[i] = x[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
  const Point8 k5 = f(tmp);
  for (std::size_t i = 0; i < 8; ++i)
    tmp[i] = x[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                         T::a65 * k5[i]);
  const Point8 k6 = f(tmp);
  Point8 x5;
  for (std::size_t i = 0; i < 8; ++i)
    x5[i] = x[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] + T::b5 * k5[i] +
                        T::b6 * k6[i]);
  const Point8 k7 = f(x5);
  err_norm = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double x4 = x[i] + h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                                  T::e6 * k6[i] + T::e7 * k7[i]);
    const double scale = abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(x5[i]));
    const double e = (x5[i] - x4) / scale;
    err_norm += e * e;
  }
  err_norm = std::sqrt(err_norm / 8.0);
  return x5;
}

}  // namespace detail

namespace detail {

// Newton solve of k = X(x + (dt/2) k) with a precomputed inverse of
// (I - (dt/2) A); the residual check keeps a stale A honest.
template <VectorFieldLike XF>
Point8 midpoint_advance(const XF& field, const Point8& x, double dt, double newton_tol,
                        int max_iter, const Mat8& minv) {
  Point8 k = field(x);
  for (int it = 0; it < max_iter; ++it) {
    const Point8 fx = field(axpy(x, k, 0.5 * dt));
    Point8 resid;
    double rnorm = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      resid[i] = k[i] - fx[i];
      rnorm = std::max(rnorm, std::abs(resid[i]));
    }
    if (rnorm <= newton_tol) return axpy(x, k, dt);
    for (std::size_t i = 0; i < 8; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < 8; ++j) d += minv(i, j) * resid[j];
      k[i] -= d;
    }
  }
  const Point8 fx = field(axpy(x, k, 0.5 * dt));
  double rnorm = 0.0;
  for (std::size_t i = 0; i < 8; ++i) rnorm = std::max(rnorm, std::abs(k[i] - fx[i]));
  if (rnorm > newton_tol)
    throw Error(ErrorKind::NewtonDivergence, "implicit midpoint Newton stalled");
  return axpy(x, k, dt);
}

template <VectorFieldLike XF>
Mat8 midpoint_newton_matrix(const XF& field, const Point8& x, double dt) {
  const Mat8 A = jacobian(field, x);
  Mat8 m = Mat8::identity();
  for (std::size_t i = 0; i < 64; ++i) m.a[i] -= 0.5 * dt * A.a[i];
  return inverse(m);
}

}  // namespace detail

// One implicit-midpoint step: solves k = X(x + (dt/2) k) by Newton iteration
// with the (constant) field Jacobian, then advances x + dt k.
template <VectorFieldLike XF>
Point8 implicit_midpoint_step(const XF& field, const Point8& x, double dt, double newton_tol,
                              int max_iter) {
  return detail::midpoint_advance(field, x, dt, newton_tol, max_iter,
                                  detail::midpoint_newton_matrix(field, x, dt));
}

// Jacobian of the one-step midpoint map, obtained by running the fixed-point
// iteration in dual arithmetic (implicit differentiation at the fixed point).
template <VectorFieldLike XF>
Mat8 midpoint_step_jacobian(const XF& field, const Point8& x, double dt, double newton_tol = 1e-13,
                            int max_iter = 64) {
  const Coords<Dual8> xd = lift(x);
  Coords<Dual8> k = field(xd);
  for (int it = 0; it < max_iter; ++it) {
    Coords<Dual8> mid;
    for (std::size_t i = 0; i < 8; ++i) mid[i] = xd[i] + k[i] * (0.5 * dt);
    const Coords<Dual8> next = field(mid);
    double delta = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      delta = std::max(delta, std::abs(next[i].v - k[i].v));
      for (std::size_t j = 0; j < 8; ++j)
        delta = std::max(delta, std::abs(next[i].d[j] - k[i].d[j]));
      k[i] = next[i];
    }
    if (delta <= newton_tol) break;
  }
  Mat8 J = Mat8::identity();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) J(i, j) += dt * k[i].d[j];
  return J;
}

// Integrates dx/dt = field(x) over [0, t_end], recording every accepted step
// plus forced sample times at multiples of t_end/100.  Stops with the
// domain_exit flag set as soon as p1 <= 0 is reached.
template <VectorFieldLike XF>
Trajectory integrate_field(const XF& field, const PhasePoint& x0, const DeformationParams& params,
                           const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.params = params;
  traj.t.push_back(0.0);
  traj.x.push_back(x0);
  if (!(x0.p[0] > 0.0)) {
    traj.domain_exit = true;
    return traj;
  }

  Point8 x = to_point8(x0);
  const double forced_spacing = cfg.t_end / 100.0;

  const auto record = [&](double t, const Point8& xs) {
    traj.t.push_back(t);
    traj.x.push_back(phase_from_point8(xs));
    if (!(xs[4] > 0.0)) {
      traj.domain_exit = true;
      return false;
    }
    return true;
  };

  if (cfg.method == IntegratorMethod::implicit_midpoint) {
    // The field is linear, so the Newton matrix is constant across steps.
    const Mat8 minv = detail::midpoint_newton_matrix(field, x, cfg.dt);
    const long nfull = static_cast<long>(std::floor(cfg.t_end / cfg.dt + 1e-9));
    for (long i = 1; i <= nfull; ++i) {
      x = detail::midpoint_advance(field, x, cfg.dt, cfg.newton_tol, cfg.newton_max_iter, minv);
      if (!record(static_cast<double>(i) * cfg.dt, x)) return traj;
    }
    const double t_last = static_cast<double>(nfull) * cfg.dt;
    if (t_last < cfg.t_end - 1e-12 * cfg.t_end) {
      x = implicit_midpoint_step(field, x, cfg.t_end - t_last, cfg.newton_tol,
                                 cfg.newton_max_iter);
      record(cfg.t_end, x);
    }
    return traj;
  }

  // Adaptive Dormand-Prince with PI step-size control.  Steps are shortened
  // to land exactly on forced sample times (and t_end), with t snapped to the
  // target so the loop cannot stall on residual rounding gaps.
  double t = 0.0;
  double h = std::min(cfg.dt, cfg.t_end / 100.0);
  double err_old = 1.0;
  long next_forced = 1;
  const double tiny = 1e-14 * cfg.t_end;
  while (t < cfg.t_end - tiny) {
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw Error(ErrorKind::StepUnderflow, "adaptive step size underflow");
    const double t_stop =
        std::min(cfg.t_end, static_cast<double>(next_forced) * forced_spacing);
    double h_step = h;
    bool hit = false;
    if (h_step >= t_stop - t) {
      h_step = t_stop - t;
      hit = true;
    }
    double err = 0.0;
    const Point8 xn = detail::dopri5_step(field, x, h_step, err, cfg.rel_tol, cfg.abs_tol);
    if (err <= 1.0) {
      t = hit ? t_stop : t + h_step;
      x = xn;
      if (!record(t, x)) return traj;
      while (static_cast<double>(next_forced) * forced_spacing <= t + tiny) ++next_forced;
      const double fac =
          0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
      h = h_step * std::clamp(fac, 0.2, 5.0);
      err_old = std::max(err, 1e-10);
    } else {
      h = h_step * std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }
  }
  return traj;
}

inline Trajectory integrate(const PhasePoint& x0, const DeformationParams& params,
                            const IntegratorConfig& cfg) {
  return integrate_field(hamiltonian_vector_field(params), x0, params, cfg);
}

// -- drift measurement -----------------------------------------------------------

struct DriftReport {
  // Row layout: H, c1..c4 evaluated at each trajectory sample.
  std::vector<std::array<double, 5>> rows;
  std::array<double, 5> max_rel_drift{};

  static constexpr std::array<const char*, 5> names{"H", "c1", "c2", "c3", "c4"};
};

// Relative drift of invariant I: max_t |I(t) - I(0)| / max(1, |I(0)|).
inline DriftReport drift_report(const Trajectory& traj) {
  if (traj.size() == 0) throw Error(ErrorKind::InvalidValue, "empty trajectory");
  DriftReport rep;
  rep.rows.reserve(traj.size());
  const HamiltonianField hfield{traj.params};
  std::array<double, 5> first{};
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const Point8 x = to_point8(traj.x[s]);
    std::array<double, 5> row{};
    row[0] = hfield(x);
    const MotionConstants mc = trace_constants(x, traj.params, 4);
    for (std::size_t l = 0; l < 4; ++l) row[1 + l] = mc.c[l];
    if (s == 0) first = row;
    for (std::size_t i = 0; i < 5; ++i) {
      const double drift = std::abs(row[i] - first[i]) / std::max(1.0, std::abs(first[i]));
      rep.max_rel_drift[i] = std::max(rep.max_rel_drift[i], drift);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ncrec
