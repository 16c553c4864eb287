#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tdyn/error.hpp"
#include "tdyn/orbits.hpp"

using namespace tdyn;

namespace {

MultiplierPair real_pair(double a, double b) { return {cplx(a, 0), cplx(b, 0)}; }

bool has_reason(const Continuability& c, const std::string& r) {
  return std::find(c.reasons.begin(), c.reasons.end(), r) != c.reasons.end();
}

}  // namespace

TEST_CASE("phi index") {
  CHECK(phi_index(real_pair(0.5, 2.0)) == -1);
  CHECK(phi_index(real_pair(-2.0, -0.5)) == 0);
  CHECK(phi_index({cplx(0.3, 0.4), cplx(0.3, -0.4)}) == 1);
  CHECK_THROWS_AS(phi_index(real_pair(1.0, 0.3)), Error);
}

TEST_CASE("psi index") {
  CHECK(psi_index(real_pair(0.5, 2.0)) == -1);
  // sign det(D^n - I) alternates for a Moebius pair
  CHECK(power_sign(real_pair(-2.0, -0.5), 1) == 1);
  CHECK(power_sign(real_pair(-2.0, -0.5), 2) == -1);
  CHECK(psi_index(real_pair(-2.0, -0.5)) == 0);
  CHECK(psi_index({std::polar(1.3, 1.0), std::polar(1.3, -1.0)}) == 1);
}

TEST_CASE("orbit types and labels") {
  CHECK(classify_orbit_type(real_pair(1.0, 0.3)) == OrbitType::TypeI);
  CHECK(classify_orbit_type(real_pair(-1.0, 0.3)) == OrbitType::TypeII);
  CHECK(classify_orbit_type(real_pair(-2.0, -0.5)) == OrbitType::Type0);
  CHECK(stability_label(real_pair(-2.0, -0.5)) == StabilityLabel::moebius);
  CHECK(stability_label(real_pair(0.5, 2.0)) == StabilityLabel::hyperbolic);
  CHECK(classify_orbit_type({cplx(0, 1), cplx(0, -1)}) == OrbitType::Degenerate);
}

TEST_CASE("virtual periods") {
  const auto plain = virtual_periods(real_pair(0.5, 2.0), 3);
  REQUIRE(plain.size() == 1);
  CHECK(plain[0].first == 1);
  CHECK(plain[0].second == 3);

  const auto pd = virtual_periods(real_pair(-1.0, 0.5), 2);
  REQUIRE(pd.size() == 2);
  CHECK(pd[1].first == 2);
  CHECK(pd[1].second == 4);

  const auto quarter = virtual_periods({cplx(0, 1), cplx(0, -1)}, 1);
  CHECK(std::find_if(quarter.begin(), quarter.end(), [](auto p) { return p.first == 4 && p.second == 4; }) !=
        quarter.end());
}

TEST_CASE("global continuability") {
  CHECK(is_globally_continuable(real_pair(0.5, 2.0)).continuable);
  const auto neg = is_globally_continuable(real_pair(-2.0, -0.5));
  CHECK_FALSE(neg.continuable);
  CHECK(has_reason(neg, "negative eigenvalues"));
  const auto sn = is_globally_continuable(real_pair(1.0, 0.5));
  CHECK_FALSE(sn.continuable);
  CHECK(has_reason(sn, "D−I singular"));
}

TEST_CASE("floquet multipliers of a 2x2 block") {
  Mat2 d;
  d << 2, 1, 1, 1;
  const auto m = floquet_multipliers(d);
  const double l1 = (3 - std::sqrt(5.0)) / 2, l2 = (3 + std::sqrt(5.0)) / 2;
  CHECK(std::min(m.mu1.real(), m.mu2.real()) == doctest::Approx(l1));
  CHECK(std::max(m.mu1.real(), m.mu2.real()) == doctest::Approx(l2));

  // tiny determinant is carried exactly when supplied
  Mat2 thin;
  thin << 4.7, 0, 0, 1e-10;
  const auto t = floquet_multipliers(thin, 4.7e-10);
  CHECK(std::min(std::abs(t.mu1), std::abs(t.mu2)) == doctest::Approx(1e-10).epsilon(1e-9));
}

TEST_CASE("phi equals psi on random Type 0 pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logmag(-3, 3), th(1e-3, std::numbers::pi - 1e-3), coin(0, 1);
  int checked = 0;
  while (checked < 10000) {
    MultiplierPair m;
    double r = std::exp(logmag(rng));
    if (std::abs(r - 1) < 1e-3) continue;
    if (coin(rng) < 0.5) {
      const double t = th(rng);
      m = {std::polar(r, t), std::polar(r, -t)};
    } else {
      double r2 = std::exp(logmag(rng));
      if (std::abs(r2 - 1) < 1e-3) continue;
      const double s = coin(rng) < 0.5 ? -1 : 1;
      m = real_pair(s * r, s * r2);
    }
    if (classify_orbit_type(m) != OrbitType::Type0) continue;
    const int phi = phi_index(m);
    CHECK(phi == psi_index(m));
    const auto label = stability_label(m);
    CHECK((phi == -1) == (label == StabilityLabel::hyperbolic));
    CHECK((phi == 0) == (label == StabilityLabel::moebius));
    CHECK((phi == 1) == (label == StabilityLabel::elliptic));
    ++checked;
  }
}

TEST_CASE("Lorenz LR orbit") {
  const FlowSystem lor(LorenzParams{});
  OrbitOptions o;
  o.ret.integ.tol = 1e-12;
  const Section sec = default_section(lor);
  const auto orbit = find_periodic_orbit(lor, sec, Vec2(13.76, 19.58), 2, o);
  CHECK(orbit.residual <= 1e-10);
  CHECK(orbit.period == 2);
  CHECK(orbit.flight_time == doctest::Approx(1.5586522107).epsilon(1e-8));
  CHECK((orbit.word == "LR" || orbit.word == "RL"));
  const auto& m = orbit.multipliers;
  CHECK(std::abs(m.mu1.imag()) == 0);
  CHECK(m.mu1.real() * m.mu2.real() > 0);
  CHECK(std::min(std::abs(m.mu1), std::abs(m.mu2)) < 1);
  CHECK(std::max(std::abs(m.mu1), std::abs(m.mu2)) > 1);
  CHECK(orbit.type == OrbitType::Type0);
  CHECK(orbit.phi == -1);
  CHECK(orbit.psi == -1);
  // regression values from the converged run
  CHECK(std::max(m.mu1.real(), m.mu2.real()) == doctest::Approx(4.71295).epsilon(1e-5));
  CHECK(orbit.det == doctest::Approx(std::exp(-(10 + 1 + 8.0 / 3.0) * orbit.flight_time)).epsilon(1e-5));
}

TEST_CASE("far seed does not converge") {
  const FlowSystem lor(LorenzParams{});
  OrbitOptions o;
  o.ret.t_max = 20;
  CHECK_THROWS_AS(find_periodic_orbit(lor, default_section(lor), Vec2(400, 900), 1, o), Error);
}
