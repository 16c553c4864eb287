#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdyn/poincare.hpp"

namespace tdyn {

struct MultiplierPair {
  cplx mu1, mu2;
};

enum class OrbitType { Type0, TypeI, TypeII, Degenerate };
enum class StabilityLabel { hyperbolic, moebius, elliptic, bifurcating };

std::string_view to_string(OrbitType t);
std::string_view to_string(StabilityLabel l);

// Eigenvalues of D; the small root of a real pair is taken as det / big
// when det is supplied, which keeps strongly contracting pairs accurate.
MultiplierPair floquet_multipliers(const Mat2& d, std::optional<double> det = {});

int phi_index(const MultiplierPair& m, double tol_unit = 1e-9);
int psi_index(const MultiplierPair& m, int n_max = 256, double tol_unit = 1e-9);
// sign det(D^n - I) computed from the multiplier powers
int power_sign(const MultiplierPair& m, int n);

OrbitType classify_orbit_type(const MultiplierPair& m, double tol_unit = 1e-9, int m_max = 64);
StabilityLabel stability_label(const MultiplierPair& m, double tol_unit = 1e-9);

// (m, m*tau) for every m with a primitive m-th root of unity among the
// multipliers; m = 1 is always present.
std::vector<std::pair<int, double>> virtual_periods(const MultiplierPair& m, double tau,
                                                    int m_max = 64, double tol_unit = 1e-9);

struct Continuability {
  bool continuable = true;
  std::vector<std::string> reasons;
};

Continuability is_globally_continuable(const MultiplierPair& m, int m_max = 64,
                                       double tol_unit = 1e-9);

struct OrbitOptions {
  double tol = 1e-10;
  int max_iter = 40;
  int max_halvings = 8;
  double divisor_tol = 1e-7;
  ReturnOptions ret{};
};

struct PeriodicOrbit {
  int period = 0;  // number of section returns
  int requested_period = 0;
  bool downgraded = false;
  double flight_time = 0;
  Vec2 uv = Vec2::Zero();
  std::vector<State3> points;  // section cycle, starting at uv
  double residual = 0;
  int iterations = 0;
  Mat2 jacobian = Mat2::Identity();
  double det = 1;
  Mat3 monodromy = Mat3::Identity();
  MultiplierPair multipliers{};
  OrbitType type = OrbitType::Degenerate;
  StabilityLabel label = StabilityLabel::bifurcating;
  std::optional<int> phi, psi;
  std::string word;  // symbols of the cycle points when the section has a coding
};

PeriodicOrbit find_periodic_orbit(const VectorField& field, const Section& section,
                                  const Vec2& seed, int n, const OrbitOptions& opts = {});

// In-plane seeds u_i with |f^n(u_i) - u_i| small, from one long orbit.
std::vector<Vec2> seeds_from_trajectory(const VectorField& field, const Section& section,
                                        const State3& s0, int n, int count, int returns,
                                        const ReturnOptions& opts = {});

}  // namespace tdyn
