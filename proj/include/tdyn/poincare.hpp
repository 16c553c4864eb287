#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tdyn/integrator.hpp"

namespace tdyn {

enum class Orientation { positive, negative, both };

// Accepts in-plane coordinates with a*u + b*v <= c.
struct HalfPlane {
  double a = 0, b = 0, c = 0;
};

class Section {
public:
  // e1 defaults to the coordinate axis least aligned with the normal,
  // projected into the plane; e2 = normal x e1.
  Section(const State3& point, const State3& normal, Orientation orientation = Orientation::positive);
  Section(const State3& point, const State3& normal, const State3& e1, Orientation orientation);

  const State3& point() const noexcept { return point_; }
  const State3& normal() const noexcept { return normal_; }
  const State3& e1() const noexcept { return e1_; }
  const State3& e2() const noexcept { return e2_; }
  Orientation orientation() const noexcept { return orientation_; }

  double eval(const State3& s) const { return normal_.dot(s - point_); }
  Vec2 coords(const State3& s) const;
  State3 lift(const Vec2& uv) const { return point_ + uv[0] * e1_ + uv[1] * e2_; }
  Eigen::Matrix<double, 3, 2> frame() const;

  // Whether a crossing at s with the given sign counts as an event.
  bool accepts(const State3& s, int sign) const;

  Section rotated_frame(double angle) const;
  Section with_orientation(Orientation o) const;

  std::optional<HalfPlane> clip;
  std::optional<double> radius;  // in-plane distance from point()
  std::function<char(const State3&)> symbol;

private:
  State3 point_, normal_, e1_, e2_;
  Orientation orientation_;
};

struct ReturnOptions {
  double t_max = 100.0;
  double t_min = 1e-3;
  int direction = 1;  // -1 integrates backwards in time
  double event_tol = 1e-10;
  double tangency_tol = 1e-6;
  IntegrateOptions integ{};
};

struct ReturnEvent {
  State3 state = State3::Zero();
  double time = 0;  // elapsed flight time, always >= 0
  int sign = 0;     // +1 crossing along the normal, -1 against it
  Vec2 uv = Vec2::Zero();
  bool tangent = false;  // |F.n| below tangency_tol
};

ReturnEvent first_return(const VectorField& field, const Section& section, const State3& s0,
                         const ReturnOptions& opts = {});

struct VariationalReturn {
  ReturnEvent event;
  Fundamental fundamental;
};

// As first_return, carrying a fundamental matrix from its initial value.
VariationalReturn first_return_variational(const VectorField& field, const Section& section,
                                           const State3& s0, const Fundamental& start,
                                           const ReturnOptions& opts = {});

// Successive crossings, each started from the previous event.
std::vector<ReturnEvent> collect_returns(const VectorField& field, const Section& section,
                                         const State3& s0, int count,
                                         const ReturnOptions& opts = {});

struct ReturnMapResult {
  Vec2 image = Vec2::Zero();
  Mat2 jacobian = Mat2::Identity();
  double det = 1;     // determinant from the triangular factors
  double time = 0;    // summed flight time
  std::vector<ReturnEvent> events;
  Mat3 monodromy = Mat3::Identity();
};

// n-fold return map from the in-plane point uv, with its 2x2 derivative.
ReturnMapResult iterate_return_map(const VectorField& field, const Section& section,
                                   const Vec2& uv, int n, const ReturnOptions& opts = {});

// D(T) at a period-n point; requires the point to close up to 1e-6.
ReturnMapResult return_map_jacobian(const VectorField& field, const Section& section,
                                    const State3& s_fixed, int n, const ReturnOptions& opts = {});

Section default_section(const FlowSystem& system);

void write_events_csv(std::ostream& os, const std::vector<ReturnEvent>& events);

struct ManifoldOptions {
  double delta = 1e-6;  // scaled by max(1, |fp|)
  double max_segment = 1e-2;
  double t_max = 1e3;
  IntegrateOptions integ{};
};

struct ManifoldTrace {
  std::vector<State3> polyline;  // starts at the fixed point
  double arclength = 0;
  bool stable = false;  // traced in reversed time
  bool blew_up = false;
  State3 direction = State3::Zero();
  double eigenvalue = 0;
};

// Unit eigenvector of the eigenvalue spanning the fixed point's 1-D manifold,
// sign fixed so the largest component is positive.
struct OneDimDirection {
  State3 vector;
  double eigenvalue;
  bool stable;
};
OneDimDirection one_dim_direction(const VectorField& field, const State3& fp);

ManifoldTrace trace_manifold_1d(const VectorField& field, const State3& fp, int branch,
                                double arclength, const ManifoldOptions& opts = {});

}  // namespace tdyn
