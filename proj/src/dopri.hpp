#pragma once

// Dormand-Prince 5(4) stepper shared by the integrator and the section code.

#include <algorithm>
#include <cmath>
#include <string>

#include "tdyn/error.hpp"
#include "tdyn/integrator.hpp"

namespace tdyn::detail {

template <int N>
using VecN = Eigen::Matrix<double, N, 1>;

inline VecN<3> rhs(const VectorField& f, const VecN<3>& y) { return f.eval(y); }

// state followed by the column-major 3x3 variational block
inline VecN<12> rhs(const VectorField& f, const VecN<12>& y) {
  const State3 s = y.head<3>();
  VecN<12> out;
  out.head<3>() = f.eval(s);
  Eigen::Map<const Mat3> psi(y.data() + 3);
  Eigen::Map<Mat3>(out.data() + 3) = f.jacobian(s) * psi;
  return out;
}

template <int N>
struct Trial {
  VecN<N> y;
  VecN<N> f;
  double err;
};

template <int N>
Trial<N> dopri_step(const VectorField& field, const VecN<N>& y, const VecN<N>& k1, double h,
                    double tol) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const VecN<N> k2 = rhs(field, VecN<N>(y + h * a21 * k1));
  const VecN<N> k3 = rhs(field, VecN<N>(y + h * (a31 * k1 + a32 * k2)));
  const VecN<N> k4 = rhs(field, VecN<N>(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const VecN<N> k5 = rhs(field, VecN<N>(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const VecN<N> k6 =
      rhs(field, VecN<N>(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  Trial<N> t;
  t.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  t.f = rhs(field, t.y);
  const VecN<N> e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * t.f);
  double err = 0;
  for (int i = 0; i < N; ++i) {
    const double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(t.y[i])));
    err = std::max(err, std::abs(e[i]) / scale);
  }
  t.err = std::isfinite(err) && t.y.allFinite() ? err : INFINITY;
  return t;
}

inline State3 hermite(double t0, const State3& y0, const State3& f0, double t1, const State3& y1,
                      const State3& f1, double t) {
  const double h = t1 - t0;
  if (h == 0) return y0;
  const double th = (t - t0) / h, th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * y0 + (th3 - 2 * th2 + th) * h * f0 +
         (-2 * th3 + 3 * th2) * y1 + (th3 - th2) * h * f1;
}

// Adaptive driver. For N = 12 the variational block is re-orthonormalised
// after every accepted step and the triangular factors are accumulated.
template <int N>
class Driver {
public:
  Driver(const VectorField& field, const VecN<N>& y0, double t0, double direction,
         const IntegrateOptions& opts, const Mat3& r0 = Mat3::Identity())
      : field_(field), opts_(opts), dir_(direction >= 0 ? 1.0 : -1.0), h_(opts.h_init) {
    t = t_prev = t0;
    y = y0;
    if constexpr (N == 12) {
      renormalise(y);
      r_total_ = r_total_ * r0;
      r_prev_ = r_total_;
    }
    y_prev = y;
    f = f_prev = rhs(field_, y);
    check_bound(y);
  }

  // One accepted step, never passing t_stop.
  void advance(double t_stop) {
    double remaining = dir_ * (t_stop - t);
    if (remaining <= 0) return;
    for (;;) {
      if (++steps_ > opts_.max_steps)
        fail(ErrorKind::StepUnderflow, "step budget exhausted at t=" + std::to_string(t));
      double h = std::min(h_, remaining);
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        fail(ErrorKind::StepUnderflow, "step size underflow at t=" + std::to_string(t));
      Trial<N> trial = dopri_step<N>(field_, y, f, dir_ * h, opts_.tol);
      if (trial.err <= 1.0) {
        const double grow = trial.err == 0 ? 5.0 : std::clamp(0.9 * std::pow(trial.err, -0.2), 0.2, 5.0);
        h_ = h * (rejected_ ? std::min(1.0, grow) : grow);
        rejected_ = false;
        t_prev = t;
        y_prev = y;
        f_prev = f;
        t = (h == remaining) ? t_stop : t + dir_ * h;
        y = trial.y;
        check_bound(y);
        if constexpr (N == 12) {
          renormalise(y);
          f = rhs(field_, y);
        } else {
          f = trial.f;
        }
        return;
      }
      rejected_ = true;
      h_ = h * (std::isfinite(trial.err) ? std::clamp(0.9 * std::pow(trial.err, -0.2), 0.2, 1.0) : 0.2);
    }
  }

  // Single step of size dt (same sign as the direction) from the previous
  // accepted point; used to refine events without interpolation error.
  VecN<N> substep(double dt) const {
    if (dt == 0) return y_prev;
    return dopri_step<N>(field_, y_prev, f_prev, dt, opts_.tol).y;
  }

  State3 dense(double tq) const {
    return hermite(t_prev, y_prev.template head<3>(), f_prev.template head<3>(), t,
                   y.template head<3>(), f.template head<3>(), tq);
  }

  double direction() const { return dir_; }
  const Mat3& r_prev() const { return r_prev_; }
  const Mat3& r_total() const { return r_total_; }

  double t, t_prev;
  VecN<N> y, y_prev, f, f_prev;

private:
  void check_bound(const VecN<N>& v) const {
    for (int i = 0; i < 3; ++i)
      if (!(std::abs(v[i]) <= opts_.bound))
        fail(ErrorKind::BlowUp, "trajectory left the bound " + std::to_string(opts_.bound) +
                                    " near t=" + std::to_string(t));
  }

  void renormalise(VecN<N>& v) {
    Eigen::Map<Mat3> psi(v.data() + 3);
    Fundamental step = Fundamental::from(psi);
    psi = step.q;
    r_prev_ = r_total_;
    r_total_ = step.r * r_total_;
  }

  const VectorField& field_;
  IntegrateOptions opts_;
  double dir_;
  double h_;
  bool rejected_ = false;
  std::size_t steps_ = 0;
  Mat3 r_total_ = Mat3::Identity();
  Mat3 r_prev_ = Mat3::Identity();
};

inline VecN<12> pack(const State3& s, const Mat3& psi) {
  VecN<12> y;
  y.head<3>() = s;
  Eigen::Map<Mat3>(y.data() + 3) = psi;
  return y;
}

inline Mat3 unpack_psi(const VecN<12>& y) { return Eigen::Map<const Mat3>(y.data() + 3); }

}  // namespace tdyn::detail
