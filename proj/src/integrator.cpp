#include "tdyn/integrator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "dopri.hpp"

namespace tdyn {

void Trajectory::push(double t, const State3& s, const State3& f) {
  times_.push_back(t);
  states_.push_back(s);
  derivs_.push_back(f);
}

State3 Trajectory::at(double t) const {
  if (times_.empty()) fail(ErrorKind::InvalidArgument, "empty trajectory");
  if (times_.size() == 1) return states_.front();
  const bool forward = times_.back() >= times_.front();
  auto it = forward ? std::upper_bound(times_.begin(), times_.end(), t)
                    : std::upper_bound(times_.begin(), times_.end(), t, std::greater<>());
  std::size_t k = static_cast<std::size_t>(it - times_.begin());
  k = std::clamp<std::size_t>(k, 1, times_.size() - 1);
  return detail::hermite(times_[k - 1], states_[k - 1], derivs_[k - 1], times_[k], states_[k],
                         derivs_[k], t);
}

double Fundamental::determinant() const {
  return (q.determinant() < 0 ? -1.0 : 1.0) * r(0, 0) * r(1, 1) * r(2, 2);
}

Fundamental Fundamental::from(const Mat3& m) {
  Eigen::HouseholderQR<Mat3> qr(m);
  Fundamental out;
  out.q = qr.householderQ();
  out.r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i) {
    if (out.r(i, i) < 0) {
      out.r.row(i) *= -1;
      out.q.col(i) *= -1;
    }
  }
  return out;
}

Trajectory integrate(const VectorField& field, const State3& s0, double t0, double t1,
                     const IntegrateOptions& opts) {
  detail::Driver<3> drv(field, s0, t0, t1 - t0, opts);
  Trajectory traj;
  traj.push(drv.t, drv.y, drv.f);
  while (drv.t != t1) {
    drv.advance(t1);
    traj.push(drv.t, drv.y, drv.f);
  }
  return traj;
}

VariationalResult integrate_variational(const VectorField& field, const State3& s0, double t0,
                                        double t1, const IntegrateOptions& opts) {
  detail::Driver<12> drv(field, detail::pack(s0, Mat3::Identity()), t0, t1 - t0, opts);
  VariationalResult out;
  out.trajectory.push(drv.t, drv.y.head<3>(), drv.f.head<3>());
  while (drv.t != t1) {
    drv.advance(t1);
    out.trajectory.push(drv.t, drv.y.head<3>(), drv.f.head<3>());
  }
  out.fundamental.q = detail::unpack_psi(drv.y);
  out.fundamental.r = drv.r_total();
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,z\n";
  char buf[128];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states()[i];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", traj.times()[i], s[0], s[1], s[2]);
    os << buf;
  }
}

}  // namespace tdyn
