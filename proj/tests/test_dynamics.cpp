#include <doctest.h>

#include <cmath>
#include <random>

#include "tdyn/dynamics.hpp"
#include "tdyn/error.hpp"
#include "tdyn/integrator.hpp"

using namespace tdyn;

namespace {

std::vector<FlowSystem> all_systems() {
  return {FlowSystem(RosslerParams{}), FlowSystem(LorenzParams{}), FlowSystem(MooreSpiegelParams{})};
}

Mat3 fd_jacobian(const FlowSystem& sys, const State3& s, double h = 1e-5) {
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    State3 e = State3::Zero();
    e[k] = h;
    j.col(k) = (sys.eval(s + e) - sys.eval(s - e)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("eval_field hand substitutions") {
  CHECK((eval_field(FlowSystem(RosslerParams{}), State3::Zero()) - State3(0, 0, 0.2)).norm() < 1e-15);
  CHECK((eval_field(FlowSystem(LorenzParams{}), State3(1, 1, 1)) - State3(0, 26, 1 - 8.0 / 3.0)).norm() < 1e-14);
  CHECK((eval_field(FlowSystem(MooreSpiegelParams{}), State3(0, 1, 0)) - State3(1, 0, -(39.25 - 100))).norm() <
        1e-12);
}

TEST_CASE("jacobian rows and finite differences") {
  const FlowSystem ross(RosslerParams{});
  const Mat3 jr = jacobian(ross, State3(1.5, -2, 0.7));
  CHECK(jr(0, 0) == 0);
  CHECK(jr(0, 1) == -1);
  CHECK(jr(0, 2) == -1);

  Mat3 expect;
  expect << -10, 10, 0, 28, -1, 0, 0, 0, -8.0 / 3.0;
  CHECK((jacobian(FlowSystem(LorenzParams{}), State3::Zero()) - expect).norm() < 1e-14);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (const auto& sys : all_systems()) {
    for (int i = 0; i < 100; ++i) {
      const State3 s(u(rng), u(rng), u(rng));
      CHECK((sys.jacobian(s) - fd_jacobian(sys, s)).norm() <= 1e-6 * std::max(1.0, sys.jacobian(s).norm()));
    }
  }
}

TEST_CASE("fixed points match closed forms") {
  const auto lor = fixed_points(FlowSystem(LorenzParams{}));
  REQUIRE(lor.size() == 3);
  const double r = std::sqrt(72.0);
  CHECK((find_fixed_point(lor, "p+").location - State3(r, r, 27)).norm() < 1e-12);
  CHECK((find_fixed_point(lor, "p-").location - State3(-r, -r, 27)).norm() < 1e-12);
  const auto& origin = find_fixed_point(lor, "origin");
  CHECK(origin.cls.type == TopoType::real_saddle);
  CHECK(origin.cls.unstable_dim == 1);

  const FlowSystem ross(RosslerParams{});
  const auto fps = fixed_points(ross);
  REQUIRE(fps.size() == 2);
  const double a = 0.2, b = 0.2, c = 5.7;
  const double x_in = (c - std::sqrt(c * c - 4 * a * b)) / 2;
  const double x_out = (c + std::sqrt(c * c - 4 * a * b)) / 2;
  const auto& in = find_fixed_point(fps, "P_In");
  const auto& out = find_fixed_point(fps, "P_Out");
  CHECK((in.location - State3(x_in, -x_in / a, x_in / a)).norm() < 1e-12);
  CHECK((out.location - State3(x_out, -x_out / a, x_out / a)).norm() < 1e-12);
  CHECK(in.location[0] == doctest::Approx(0.00703).epsilon(1e-3));
  CHECK(out.cls.type == TopoType::saddle_focus);
  CHECK(out.cls.unstable_dim == 1);
  CHECK(in.cls.type == TopoType::saddle_focus);
  CHECK(in.cls.unstable_dim == 2);
  CHECK(*in.cls.poincare_index == -*out.cls.poincare_index);

  for (const auto& sys : all_systems())
    for (const auto& fp : fixed_points(sys)) CHECK(eval_field(sys, fp.location).norm() <= 1e-10);

  const auto sub = fixed_points(FlowSystem(LorenzParams{10, 0.5, 8.0 / 3.0}));
  REQUIRE(sub.size() == 1);
  CHECK(sub[0].name == "origin");

  CHECK_THROWS_AS(fixed_points(FlowSystem(RosslerParams{0.9, 0.9, 1.5})), Error);
}

TEST_CASE("classification of hand-made spectra") {
  const LinearField sink(Mat3(Eigen::Vector3d(-1, -2, -3).asDiagonal()));
  const auto cls = classify_fixed_point(sink, State3::Zero());
  CHECK(cls.type == TopoType::sink);
  CHECK(cls.poincare_index == 1);

  // permuting the diagonal leaves the classification alone
  const LinearField saddle(Mat3(Eigen::Vector3d(2, -1, -3).asDiagonal()));
  const LinearField saddle_perm(Mat3(Eigen::Vector3d(-3, 2, -1).asDiagonal()));
  const auto c1 = classify_fixed_point(saddle, State3::Zero());
  const auto c2 = classify_fixed_point(saddle_perm, State3::Zero());
  CHECK(c1.type == c2.type);
  CHECK(c1.poincare_index == c2.poincare_index);
  CHECK(c1.unstable_dim == 1);
  CHECK(c1.poincare_index == -1);

  Mat3 rot;
  rot << 0, 1, 0, -1, 0, 0, 0, 0, -1;
  const auto center = classify_fixed_point(LinearField(rot), State3::Zero());
  CHECK(center.type == TopoType::center_degenerate);
  CHECK_FALSE(center.poincare_index.has_value());
}

TEST_CASE("parameter space clauses") {
  CHECK(in_parameter_space(FlowSystem(RosslerParams{})).ok);
  CHECK(in_parameter_space(FlowSystem(LorenzParams{})).ok);
  const auto bad = in_parameter_space(FlowSystem(RosslerParams{1.5, 0.2, 5.7}));
  CHECK_FALSE(bad.ok);
  CHECK(std::find(bad.reasons.begin(), bad.reasons.end(), "a∉(0,1)") != bad.reasons.end());
  const auto low = in_parameter_space(FlowSystem(LorenzParams{10, 2, 8.0 / 3.0}));
  CHECK_FALSE(low.ok);

  // inside the Rossler region, two saddle-foci of opposite index
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ab(0.05, 0.95), cc(1.5, 12);
  for (int i = 0; i < 200; ++i) {
    const FlowSystem sys(RosslerParams{ab(rng), ab(rng), cc(rng)});
    if (!in_parameter_space(sys).ok) continue;
    const auto fps = fixed_points(sys);
    REQUIRE(fps.size() == 2);
    CHECK(fps[0].cls.type == TopoType::saddle_focus);
    CHECK(fps[1].cls.type == TopoType::saddle_focus);
    CHECK(*fps[0].cls.poincare_index == -*fps[1].cls.poincare_index);
  }
}

TEST_CASE("trapping dot product equals b") {
  CHECK(trapping_dot_check(FlowSystem(RosslerParams{}), State3(3, -4, 0)) == 0.2);
  CHECK(trapping_dot_check(FlowSystem(RosslerParams{0.2, 0.7, 5.7}), State3(-11, 2.5, 0)) == 0.7);
  CHECK_THROWS_AS(trapping_dot_check(FlowSystem(RosslerParams{}), State3(0, 0, 1)), Error);
}

TEST_CASE("named parameters") {
  const FlowSystem lor(LorenzParams{});
  CHECK(lor.with("rho", 14).get("rho") == 14);
  CHECK_THROWS_AS(lor.get("a"), Error);
}

TEST_CASE("integration basics") {
  const FlowSystem lor(LorenzParams{});
  const auto single = integrate(lor, State3(1, 1, 1), 0, 0);
  CHECK(single.size() == 1);
  const auto var0 = integrate_variational(lor, State3(1, 1, 1), 0, 0);
  CHECK((var0.fundamental.matrix() - Mat3::Identity()).norm() < 1e-15);

  IntegrateOptions o;
  o.tol = 1e-10;
  const auto tr = integrate(lor, State3(1, 1, 1), 0, 50, o);
  CHECK(tr.t_back() == 50);
  CHECK(tr.states().back().allFinite());
  CHECK(tr.states().back().cwiseAbs().maxCoeff() < 100);

  // linear diagonal system: fundamental matrix is the exponential
  const LinearField lin(Mat3(Eigen::Vector3d(0.3, -0.7, -1.1).asDiagonal()));
  const auto lv = integrate_variational(lin, State3(1, 2, 3), 0, 2, o);
  const Mat3 expm = Eigen::Vector3d(std::exp(0.6), std::exp(-1.4), std::exp(-2.2)).asDiagonal();
  CHECK((lv.fundamental.matrix() - expm).norm() < 1e-8);
}

TEST_CASE("Liouville identity on random segments") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5), len(0.5, 5);
  IntegrateOptions o;
  o.tol = 1e-11;
  for (const auto& sys : {FlowSystem(LorenzParams{}), FlowSystem(RosslerParams{})}) {
    for (int i = 0; i < 5; ++i) {
      const State3 s0(u(rng), u(rng), std::abs(u(rng)));
      const double t = len(rng);
      const auto v = integrate_variational(sys, s0, 0, t, o);
      // trapezoid quadrature of the trace on a fine re-integration
      const auto& tr = v.trajectory;
      double integral = 0;
      const int m = 20000;
      for (int k = 0; k < m; ++k) {
        const double ta = t * k / m, tb = t * (k + 1) / m;
        integral += 0.5 * (tb - ta) * (sys.jacobian(tr.at(ta)).trace() + sys.jacobian(tr.at(tb)).trace());
      }
      CHECK(v.fundamental.determinant() == doctest::Approx(std::exp(integral)).epsilon(1e-6));
    }
  }
}

TEST_CASE("escaping orbit reports an error") {
  const FlowSystem sys(RosslerParams{0.2, 5.0, 5.7});
  IntegrateOptions o;
  o.bound = 1e3;
  try {
    const auto tr = integrate(sys, State3(0, -50, 0), 0, 100, o);
    CHECK(tr.states().back().allFinite());
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::BlowUp || e.kind() == ErrorKind::StepUnderflow));
  }
}
