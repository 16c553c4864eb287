#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdyn/poincare.hpp"

namespace tdyn {

enum class SampleStatus { ok, blowup, no_crossing };

std::string_view to_string(SampleStatus s);

struct ConnectionSpec {
  std::string source;  // fixed-point names, as listed by fixed_points()
  std::string target;
  int branch = 1;       // which half of the source's 1-D unstable manifold
  double radius = 1.0;  // offset of the measurement plane from the target
  double capture = std::numeric_limits<double>::infinity();
  double delta = 1e-6;  // initial displacement, scaled by max(1, |source|)
  ReturnOptions ret{};
  bool record_arc = false;
};

struct SplittingSample {
  double param = 0;
  double distance = std::numeric_limits<double>::infinity();
  SampleStatus status = SampleStatus::ok;
  std::string plane;  // which measurement plane was used
  double flight_time = 0;
  State3 crossing = State3::Zero();
  std::vector<State3> arc;  // source to crossing, when requested
};

// Signed offset along the target's unstable direction, measured where the
// source's unstable branch first crosses a plane anchored at the target.
SplittingSample connection_distance(const VectorField& field, const State3& source,
                                    const State3& target, const ConnectionSpec& spec);
SplittingSample connection_distance(const FlowSystem& system, const ConnectionSpec& spec);

using Sampler = std::function<SplittingSample(double)>;

Sampler make_sampler(const FlowSystem& base, const std::string& axis, const ConnectionSpec& spec);

struct ScanPoint {
  SplittingSample sample;
  bool flag = false;  // sign differs from the previous finite sample
  std::string error;  // non-empty for no_crossing
};

std::vector<ScanPoint> scan_parameter(const Sampler& sampler, double lo, double hi, int steps,
                                      unsigned threads = 0);

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& scan);

struct BisectResult {
  double estimate = 0;
  double lo = 0, hi = 0;
  double d_lo = 0, d_hi = 0;
  double distance = 0;  // at the estimate
  int iterations = 0;
};

BisectResult bisect_connection(const Sampler& sampler, double a, double b, double tol = 1e-8);

struct KnotArc {
  std::string source, target;
  std::vector<State3> polyline;
};

struct ProjectedCrossing {
  std::size_t over_segment = 0, under_segment = 0;
  double x = 0, z = 0;
};

struct HeteroclinicKnot {
  std::vector<std::string> order;  // fixed points along the cycle
  std::vector<KnotArc> arcs;       // arcs in cycle order
  bool closed = false;
  int crossings = 0;  // xz-projection
  bool alternating = false;
  bool trefoil_candidate = false;
  std::vector<ProjectedCrossing> crossing_list;
  std::vector<std::string> diagnostics;
};

HeteroclinicKnot assemble_knot(const std::map<std::string, State3>& fixed_points,
                               const std::vector<KnotArc>& arcs, double endpoint_tol = 1e-6);

nlohmann::ordered_json to_json(const HeteroclinicKnot& knot);

}  // namespace tdyn
