#pragma once

#include <cstddef>
#include <vector>

#include "tdyn/dynamics.hpp"

namespace tdyn {

struct IntegrateOptions {
  double tol = 1e-10;   // local error per step, absolute and relative
  double bound = 1e8;   // |s_i| above this is a blow-up
  double h_init = 1e-4;
  std::size_t max_steps = 20'000'000;
};

// Accepted steps with derivatives; evaluation between steps is cubic Hermite.
class Trajectory {
public:
  void push(double t, const State3& s, const State3& f);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double t_front() const { return times_.front(); }
  double t_back() const { return times_.back(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<State3>& states() const noexcept { return states_; }
  const std::vector<State3>& derivatives() const noexcept { return derivs_; }

  State3 at(double t) const;

private:
  std::vector<double> times_;
  std::vector<State3> states_;
  std::vector<State3> derivs_;
};

// Fundamental matrix kept as Q R: Q orthogonal, R upper triangular. The
// product of diag(R) carries the determinant with full relative accuracy even
// when the matrix itself is badly scaled.
struct Fundamental {
  Mat3 q = Mat3::Identity();
  Mat3 r = Mat3::Identity();

  Mat3 matrix() const { return q * r; }
  double determinant() const;
  static Fundamental from(const Mat3& m);
};

struct VariationalResult {
  Trajectory trajectory;
  Fundamental fundamental;
};

// t1 < t0 integrates backwards.
Trajectory integrate(const VectorField& field, const State3& s0, double t0, double t1,
                     const IntegrateOptions& opts = {});

VariationalResult integrate_variational(const VectorField& field, const State3& s0, double t0,
                                        double t1, const IntegrateOptions& opts = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace tdyn
