#include "tdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(std::initializer_list<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite parameter");
}

std::array<cplx, 3> sorted_eigenvalues(const Mat3& j) {
  Eigen::EigenSolver<Mat3> es(j, false);
  std::array<cplx, 3> ev;
  for (int i = 0; i < 3; ++i) ev[i] = es.eigenvalues()[i];
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return ev;
}

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::rossler: return "rossler";
    case SystemKind::lorenz: return "lorenz";
    case SystemKind::moore_spiegel: return "moore-spiegel";
  }
  return "?";
}

FlowSystem::FlowSystem(Params params) : params_(params) {
  std::visit(overloaded{
                 [](const RosslerParams& p) { require_finite({p.a, p.b, p.c}); },
                 [](const LorenzParams& p) { require_finite({p.sigma, p.rho, p.beta}); },
                 [](const MooreSpiegelParams& p) { require_finite({p.tau, p.rho}); },
             },
             params_);
}

SystemKind FlowSystem::kind() const noexcept {
  return static_cast<SystemKind>(params_.index());
}

std::vector<std::string> FlowSystem::parameter_names() const {
  switch (kind()) {
    case SystemKind::rossler: return {"a", "b", "c"};
    case SystemKind::lorenz: return {"sigma", "rho", "beta"};
    case SystemKind::moore_spiegel: return {"tau", "rho"};
  }
  return {};
}

double FlowSystem::get(std::string_view key) const {
  return std::visit(
      overloaded{
          [&](const RosslerParams& p) -> double {
            if (key == "a") return p.a;
            if (key == "b") return p.b;
            if (key == "c") return p.c;
            fail(ErrorKind::InvalidArgument, "unknown rossler parameter '" + std::string(key) + "'");
          },
          [&](const LorenzParams& p) -> double {
            if (key == "sigma") return p.sigma;
            if (key == "rho") return p.rho;
            if (key == "beta") return p.beta;
            fail(ErrorKind::InvalidArgument, "unknown lorenz parameter '" + std::string(key) + "'");
          },
          [&](const MooreSpiegelParams& p) -> double {
            if (key == "tau") return p.tau;
            if (key == "rho") return p.rho;
            fail(ErrorKind::InvalidArgument,
                 "unknown moore-spiegel parameter '" + std::string(key) + "'");
          },
      },
      params_);
}

FlowSystem FlowSystem::with(std::string_view key, double value) const {
  Params p = params_;
  std::visit(overloaded{
                 [&](RosslerParams& q) {
                   if (key == "a") q.a = value;
                   else if (key == "b") q.b = value;
                   else if (key == "c") q.c = value;
                   else get(key);
                 },
                 [&](LorenzParams& q) {
                   if (key == "sigma") q.sigma = value;
                   else if (key == "rho") q.rho = value;
                   else if (key == "beta") q.beta = value;
                   else get(key);
                 },
                 [&](MooreSpiegelParams& q) {
                   if (key == "tau") q.tau = value;
                   else if (key == "rho") q.rho = value;
                   else get(key);
                 },
             },
             p);
  return FlowSystem(p);
}

State3 FlowSystem::eval(const State3& s) const {
  const double x = s[0], y = s[1], z = s[2];
  return std::visit(
      overloaded{
          [&](const RosslerParams& p) { return State3(-y - z, x + p.a * y, p.b + z * (x - p.c)); },
          [&](const LorenzParams& p) {
            return State3(p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z);
          },
          [&](const MooreSpiegelParams& p) {
            return State3(y, z, -z - (p.tau - p.rho + p.rho * x * x) * y - p.tau * x);
          },
      },
      params_);
}

Mat3 FlowSystem::jacobian(const State3& s) const {
  const double x = s[0], y = s[1], z = s[2];
  Mat3 j;
  std::visit(overloaded{
                 [&](const RosslerParams& p) {
                   j << 0, -1, -1,
                        1, p.a, 0,
                        z, 0, x - p.c;
                 },
                 [&](const LorenzParams& p) {
                   j << -p.sigma, p.sigma, 0,
                        p.rho - z, -1, -x,
                        y, x, -p.beta;
                 },
                 [&](const MooreSpiegelParams& p) {
                   j << 0, 1, 0,
                        0, 0, 1,
                        -2 * p.rho * x * y - p.tau, -(p.tau - p.rho + p.rho * x * x), -1;
                 },
             },
             params_);
  return j;
}

State3 eval_field(const FlowSystem& system, const State3& s) { return system.eval(s); }
Mat3 jacobian(const FlowSystem& system, const State3& s) { return system.jacobian(s); }

FixedPointClass classify_fixed_point(const VectorField& field, const State3& p, double tol_eig) {
  FixedPointClass cls;
  cls.eigenvalues = sorted_eigenvalues(field.jacobian(p));

  int unstable = 0, real_count = 0;
  bool degenerate = false;
  for (cplx ev : cls.eigenvalues) {
    if (std::abs(ev.real()) <= tol_eig) degenerate = true;
    if (ev.real() > 0) ++unstable;
    if (nearly_real(ev)) ++real_count;
  }
  cls.unstable_dim = unstable;
  if (degenerate) {
    cls.type = TopoType::center_degenerate;
    return cls;
  }
  cls.poincare_index = unstable % 2 == 0 ? 1 : -1;
  if (unstable == 0) cls.type = TopoType::sink;
  else if (unstable == 3) cls.type = TopoType::source;
  else cls.type = real_count == 3 ? TopoType::real_saddle : TopoType::saddle_focus;
  return cls;
}

std::string type_label(const FixedPointClass& cls) {
  switch (cls.type) {
    case TopoType::sink: return "sink";
    case TopoType::source: return "source";
    case TopoType::real_saddle: return "real-saddle";
    case TopoType::saddle_focus:
      return *cls.poincare_index > 0 ? "saddle-focus+" : "saddle-focus-";
    case TopoType::center_degenerate: return "center/degenerate";
  }
  return "?";
}

std::vector<FixedPoint> fixed_points(const FlowSystem& system) {
  std::vector<FixedPoint> out;
  auto push = [&](std::string name, State3 loc) {
    out.push_back({std::move(name), loc, classify_fixed_point(system, loc)});
  };
  switch (system.kind()) {
    case SystemKind::rossler: {
      const auto& p = std::get<RosslerParams>(system.params());
      if (p.a == 0) fail(ErrorKind::InvalidArgument, "rossler fixed points need a != 0");
      const double disc = p.c * p.c - 4 * p.a * p.b;
      if (disc < 0) fail(ErrorKind::DiscriminantNegative, "c^2 - 4ab < 0: no fixed points");
      const double root = std::sqrt(disc);
      // roots of x^2 - c x + ab; the small one via the product to avoid cancellation
      const double big = (p.c + std::copysign(root, p.c)) / 2;
      double x_in = big != 0 ? p.a * p.b / big : 0.0;
      double x_out = big;
      if (x_in > x_out) std::swap(x_in, x_out);
      push("P_In", State3(x_in, -x_in / p.a, x_in / p.a));
      push("P_Out", State3(x_out, -x_out / p.a, x_out / p.a));
      break;
    }
    case SystemKind::lorenz: {
      const auto& p = std::get<LorenzParams>(system.params());
      push("origin", State3::Zero());
      if (p.rho > 1) {
        const double r = std::sqrt(p.beta * (p.rho - 1));
        push("p+", State3(r, r, p.rho - 1));
        push("p-", State3(-r, -r, p.rho - 1));
      }
      break;
    }
    case SystemKind::moore_spiegel:
      push("origin", State3::Zero());
      break;
  }
  return out;
}

const FixedPoint& find_fixed_point(const std::vector<FixedPoint>& fps, std::string_view name) {
  for (const auto& fp : fps)
    if (fp.name == name) return fp;
  fail(ErrorKind::InvalidArgument, "no fixed point named '" + std::string(name) + "'");
}

ParameterCheck in_parameter_space(const FlowSystem& system) {
  ParameterCheck check;
  auto reject = [&](std::string reason) {
    check.ok = false;
    check.reasons.push_back(std::move(reason));
  };
  switch (system.kind()) {
    case SystemKind::rossler: {
      const auto& p = std::get<RosslerParams>(system.params());
      if (!(p.a > 0 && p.a < 1)) reject("a∉(0,1)");
      if (!(p.b > 0 && p.b < 1)) reject("b∉(0,1)");
      if (!(p.c > 1)) reject("c≤1");
      if (!(p.c * p.c - 4 * p.a * p.b > 0)) reject("c²−4ab≤0");
      if (!check.ok) break;
      const auto fps = fixed_points(system);
      const auto& in = fps[0].cls;
      const auto& out = fps[1].cls;
      if (in.type != TopoType::saddle_focus || in.unstable_dim != 2)
        reject("P_In is not a saddle-focus with 2-D unstable manifold");
      if (out.type != TopoType::saddle_focus || out.unstable_dim != 1)
        reject("P_Out is not a saddle-focus with 2-D stable manifold");
      if (check.ok && *in.poincare_index == *out.poincare_index)
        reject("P_In and P_Out have equal index");
      break;
    }
    case SystemKind::lorenz: {
      const auto& p = std::get<LorenzParams>(system.params());
      if (!(p.sigma > 0)) reject("σ≤0");
      if (!(p.beta > 0)) reject("β≤0");
      if (!(p.rho > 1)) reject("ρ≤1");
      if (p.sigma > 0 && !(p.rho > (p.sigma + 1) * (p.sigma + 1) / (4 * p.sigma)))
        reject("ρ≤(σ+1)²/(4σ)");
      break;
    }
    case SystemKind::moore_spiegel: {
      const auto& p = std::get<MooreSpiegelParams>(system.params());
      if (!(p.tau > 0)) reject("τ≤0");
      if (!(p.rho > 0)) reject("ρ≤0");
      break;
    }
  }
  return check;
}

double trapping_dot_check(const FlowSystem& system, const State3& s) {
  if (system.kind() != SystemKind::rossler)
    fail(ErrorKind::InvalidArgument, "trapping check is defined for the rossler field");
  if (s[2] != 0) fail(ErrorKind::InvalidArgument, "point is not on the plane z = 0");
  return system.eval(s).dot(State3::UnitZ());
}

}  // namespace tdyn
