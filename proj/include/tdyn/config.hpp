#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdyn/heteroclinic.hpp"
#include "tdyn/poincare.hpp"

namespace tdyn {

struct SectionSpec {
  State3 point = State3::Zero();
  State3 normal = State3::UnitZ();
  std::optional<State3> e1;
  Orientation orientation = Orientation::positive;
  std::optional<HalfPlane> clip;
  std::optional<double> radius;
};

struct IntegrateSpec {
  double t0 = 0, t1 = 50;
  State3 x0 = State3::Ones();
  double tol = 1e-10;
  double bound = 1e8;
};

struct OrbitSpec {
  std::optional<Vec2> seed;
  int period = 1;
  double tol = 1e-10;
  double t_max = 100;
  int returns = 2000;  // section returns scanned for seeds when none is given
};

struct HeteroclinicSpec {
  std::string source, target;
  int branch = 1;
  std::string axis;
  double lo = 0, hi = 1;
  int steps = 21;
  double radius = 1.0;
  std::optional<double> capture;
  double t_max = 100;
  double tol = 1e-8;  // bisection tolerance in the parameter
  std::optional<std::pair<double, double>> bracket;
};

struct RunConfig {
  std::string path;
  FlowSystem system{LorenzParams{}};
  std::optional<SectionSpec> section;
  IntegrateSpec integrate;
  OrbitSpec orbit;
  std::optional<HeteroclinicSpec> heteroclinic;
};

// Io when the file cannot be read, Schema for every structural problem
// (all problems are listed, each with its line number).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

Section make_section(const RunConfig& cfg);
IntegrateOptions integrate_options(const RunConfig& cfg);
ConnectionSpec connection_spec(const RunConfig& cfg);

}  // namespace tdyn
