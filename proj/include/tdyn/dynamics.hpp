#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tdyn/types.hpp"

namespace tdyn {

class VectorField {
public:
  virtual ~VectorField() = default;
  virtual State3 eval(const State3& s) const = 0;
  virtual Mat3 jacobian(const State3& s) const = 0;
};

struct RosslerParams {
  double a = 0.2, b = 0.2, c = 5.7;
};
struct LorenzParams {
  double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
};
struct MooreSpiegelParams {
  double tau = 39.25, rho = 100.0;
};

using Params = std::variant<RosslerParams, LorenzParams, MooreSpiegelParams>;

enum class SystemKind { rossler, lorenz, moore_spiegel };

std::string_view to_string(SystemKind kind);

class FlowSystem final : public VectorField {
public:
  explicit FlowSystem(Params params);

  SystemKind kind() const noexcept;
  const Params& params() const noexcept { return params_; }

  // Named parameter access, used by parameter scans ("a", "sigma", "rho", ...).
  double get(std::string_view key) const;
  FlowSystem with(std::string_view key, double value) const;
  std::vector<std::string> parameter_names() const;

  State3 eval(const State3& s) const override;
  Mat3 jacobian(const State3& s) const override;

private:
  Params params_;
};

// s' = A (s - center)
class LinearField final : public VectorField {
public:
  explicit LinearField(const Mat3& a, const State3& center = State3::Zero())
      : a_(a), center_(center) {}
  State3 eval(const State3& s) const override { return a_ * (s - center_); }
  Mat3 jacobian(const State3&) const override { return a_; }

private:
  Mat3 a_;
  State3 center_;
};

State3 eval_field(const FlowSystem& system, const State3& s);
Mat3 jacobian(const FlowSystem& system, const State3& s);

enum class TopoType { sink, source, real_saddle, saddle_focus, center_degenerate };

struct FixedPointClass {
  TopoType type = TopoType::center_degenerate;
  std::array<cplx, 3> eigenvalues{};
  int unstable_dim = 0;
  // sign det(-J); empty when a real part sits within tol_eig of zero
  std::optional<int> poincare_index;
};

std::string type_label(const FixedPointClass& cls);

struct FixedPoint {
  std::string name;
  State3 location;
  FixedPointClass cls;
};

std::vector<FixedPoint> fixed_points(const FlowSystem& system);
FixedPointClass classify_fixed_point(const VectorField& field, const State3& p,
                                     double tol_eig = 1e-9);
const FixedPoint& find_fixed_point(const std::vector<FixedPoint>& fps, std::string_view name);

struct ParameterCheck {
  bool ok = true;
  std::vector<std::string> reasons;
};

ParameterCheck in_parameter_space(const FlowSystem& system);

// F(s) . (0,0,1) for the Rossler field on the plane z = 0.
double trapping_dot_check(const FlowSystem& system, const State3& s);

}  // namespace tdyn
