#include "tdyn/orbits.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

bool near(cplx mu, double target, double tol) { return std::abs(mu - target) <= tol; }

// mu within tol of a primitive m-th root of unity
bool primitive_root(cplx mu, int m, double tol) {
  if (std::abs(std::abs(mu) - 1.0) > tol) return false;
  const double turns = std::arg(mu) / (2 * std::numbers::pi);
  const long k = std::lround(turns * m);
  const long kk = ((k % m) + m) % m;
  if (std::gcd(kk, static_cast<long>(m)) != 1) return false;
  return std::abs(mu - std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / m)) <= tol;
}

bool has_primitive_root(const MultiplierPair& m, int order, double tol) {
  return primitive_root(m.mu1, order, tol) || primitive_root(m.mu2, order, tol);
}

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::string_view to_string(OrbitType t) {
  switch (t) {
    case OrbitType::Type0: return "Type0";
    case OrbitType::TypeI: return "TypeI";
    case OrbitType::TypeII: return "TypeII";
    case OrbitType::Degenerate: return "Degenerate";
  }
  return "?";
}

std::string_view to_string(StabilityLabel l) {
  switch (l) {
    case StabilityLabel::hyperbolic: return "hyperbolic";
    case StabilityLabel::moebius: return "moebius";
    case StabilityLabel::elliptic: return "elliptic";
    case StabilityLabel::bifurcating: return "bifurcating";
  }
  return "?";
}

MultiplierPair floquet_multipliers(const Mat2& d, std::optional<double> det) {
  if (!d.allFinite()) fail(ErrorKind::IllConditioned, "non-finite return map derivative");
  const bool scalar = d(0, 1) == 0 && d(1, 0) == 0 && d(0, 0) == d(1, 1);
  if (!scalar) {
    Eigen::EigenSolver<Mat2> es(d);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(es.eigenvectors());
    const double smin = svd.singularValues()[1];
    const double cond = smin > 0 ? svd.singularValues()[0] / smin : INFINITY;
    if (!(cond <= 1e12)) fail(ErrorKind::IllConditioned, "eigenvector basis condition number above 1e12");
  }
  const double tr = d.trace();
  const double dt = det ? *det : d.determinant();
  const double disc = tr * tr - 4 * dt;
  MultiplierPair m;
  if (disc >= 0) {
    const double big = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
    const double small = big != 0 ? dt / big : 0.0;
    m.mu1 = std::abs(small) <= std::abs(big) ? small : big;
    m.mu2 = std::abs(small) <= std::abs(big) ? big : small;
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    m.mu1 = cplx(0.5 * tr, -im);
    m.mu2 = cplx(0.5 * tr, im);
  }
  return m;
}

int phi_index(const MultiplierPair& m, double tol_unit) {
  int k_minus = 0, k_plus = 0;
  for (cplx mu : {m.mu1, m.mu2}) {
    if (near(mu, 1.0, tol_unit) || near(mu, -1.0, tol_unit))
      fail(ErrorKind::NotType0, "multiplier within tol_unit of +-1");
    if (!nearly_real(mu)) continue;
    k_minus += mu.real() < -1;
    k_plus += mu.real() > 1;
  }
  if (k_minus % 2 != 0) return 0;
  return k_plus % 2 == 0 ? 1 : -1;
}

int power_sign(const MultiplierPair& m, int n) {
  auto real_term = [n](double mu) { return sgn(std::pow(mu, n) - 1.0); };
  if (nearly_real(m.mu1) && nearly_real(m.mu2))
    return real_term(m.mu1.real()) * real_term(m.mu2.real());
  // conjugate pair: det = |mu^n - 1|^2
  const double mod = std::pow(std::abs(m.mu1), n);
  if (!std::isfinite(mod)) return 1;
  const cplx z = std::polar(mod, n * std::arg(m.mu1)) - 1.0;
  return std::abs(z) == 0 ? 0 : 1;
}

int psi_index(const MultiplierPair& m, int n_max, double) {
  if (n_max < 2) fail(ErrorKind::InvalidArgument, "n_max must be at least 2");
  std::vector<double> avg(n_max + 1, 0.0);
  double sum = 0;
  for (int n = 1; n <= n_max; ++n) {
    sum += power_sign(m, n);
    avg[n] = sum / n;
  }
  const double target = std::round(avg[n_max]);
  for (int n = n_max / 2; n <= n_max; ++n)
    if (std::abs(avg[n] - target) > 0.25)
      fail(ErrorKind::NonConvergent, "Cesaro averages of sign det(D^n - I) do not settle");
  return static_cast<int>(target);
}

OrbitType classify_orbit_type(const MultiplierPair& m, double tol_unit, int m_max) {
  const bool plus = near(m.mu1, 1.0, tol_unit) || near(m.mu2, 1.0, tol_unit);
  const bool minus = near(m.mu1, -1.0, tol_unit) || near(m.mu2, -1.0, tol_unit);
  if (plus && minus) return OrbitType::Degenerate;
  if (plus) return OrbitType::TypeI;
  if (minus) return OrbitType::TypeII;
  for (int order = 3; order <= m_max; ++order)
    if (has_primitive_root(m, order, tol_unit)) return OrbitType::Degenerate;
  return OrbitType::Type0;
}

StabilityLabel stability_label(const MultiplierPair& m, double tol_unit) {
  if (classify_orbit_type(m, tol_unit) != OrbitType::Type0) return StabilityLabel::bifurcating;
  if (!nearly_real(m.mu1) || !nearly_real(m.mu2)) return StabilityLabel::elliptic;
  double a = m.mu1.real(), b = m.mu2.real();
  if (a > b) std::swap(a, b);
  if (a > 0 && a < 1 && b > 1) return StabilityLabel::hyperbolic;
  if (a < -1 && b > -1 && b < 0) return StabilityLabel::moebius;
  return StabilityLabel::elliptic;
}

std::vector<std::pair<int, double>> virtual_periods(const MultiplierPair& m, double tau,
                                                    int m_max, double tol_unit) {
  std::vector<std::pair<int, double>> out{{1, tau}};
  for (int order = 2; order <= m_max; ++order)
    if (has_primitive_root(m, order, tol_unit)) out.emplace_back(order, order * tau);
  return out;
}

Continuability is_globally_continuable(const MultiplierPair& m, int m_max, double tol_unit) {
  Continuability c;
  for (cplx mu : {m.mu1, m.mu2}) {
    if (nearly_real(mu) && mu.real() < 0) {
      c.reasons.push_back("negative eigenvalues");
      break;
    }
  }
  for (int order = 1; order <= m_max; ++order) {
    if (!has_primitive_root(m, order, tol_unit)) continue;
    c.reasons.push_back(order == 1 ? "D−I singular"
                                   : "D^" + std::to_string(order) + "−I singular");
  }
  c.continuable = c.reasons.empty();
  return c;
}

PeriodicOrbit find_periodic_orbit(const VectorField& field, const Section& section,
                                  const Vec2& seed, int n, const OrbitOptions& opts) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "period must be positive");
  auto eval = [&](const Vec2& u, int k) { return iterate_return_map(field, section, u, k, opts.ret); };
  auto recoverable = [](const Error& e) {
    return e.kind() == ErrorKind::NoReturn || e.kind() == ErrorKind::BlowUp ||
           e.kind() == ErrorKind::Tangency || e.kind() == ErrorKind::StepUnderflow;
  };

  Vec2 u = seed;
  ReturnMapResult cur = eval(u, n);
  double res = (cur.image - u).norm();
  int iter = 0;
  for (; iter < opts.max_iter && res > opts.tol; ++iter) {
    const Vec2 du = (cur.jacobian - Mat2::Identity()).fullPivLu().solve(u - cur.image);
    if (!du.allFinite()) fail(ErrorKind::NoConvergence, "singular Newton system");
    double lam = 1;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, lam *= 0.5) {
      const Vec2 trial = u + lam * du;
      try {
        auto r = eval(trial, n);
        const double rt = (r.image - trial).norm();
        if (rt < res) {
          u = trial;
          cur = std::move(r);
          res = rt;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (!recoverable(e)) throw;
      }
    }
    if (!accepted) break;
  }
  if (!(res <= opts.tol)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "Newton stalled at residual %.3e", res);
    fail(ErrorKind::NoConvergence, buf);
  }

  PeriodicOrbit orb;
  orb.requested_period = n;
  orb.period = n;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    auto r = eval(u, d);
    if ((r.image - u).norm() <= opts.divisor_tol) {
      orb.period = d;
      orb.downgraded = true;
      cur = std::move(r);
      res = (cur.image - u).norm();
      break;
    }
  }

  orb.uv = u;
  orb.residual = res;
  orb.iterations = iter;
  orb.flight_time = cur.time;
  orb.points.push_back(section.lift(u));
  for (int k = 0; k + 1 < orb.period; ++k) orb.points.push_back(cur.events[k].state);
  orb.jacobian = cur.jacobian;
  orb.det = cur.det;
  orb.monodromy = cur.monodromy;
  orb.multipliers = floquet_multipliers(cur.jacobian, cur.det);
  orb.type = classify_orbit_type(orb.multipliers);
  orb.label = stability_label(orb.multipliers);
  if (orb.type == OrbitType::Type0) {
    orb.phi = phi_index(orb.multipliers);
    try {
      orb.psi = psi_index(orb.multipliers);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonConvergent) throw;
    }
  }
  if (section.symbol)
    for (const auto& p : orb.points) orb.word.push_back(section.symbol(p));
  return orb;
}

std::vector<Vec2> seeds_from_trajectory(const VectorField& field, const Section& section,
                                        const State3& s0, int n, int count, int returns,
                                        const ReturnOptions& opts) {
  const auto events = collect_returns(field, section, s0, returns, opts);
  std::vector<std::pair<double, Vec2>> scored;
  for (std::size_t i = 0; i + n < events.size(); ++i)
    scored.emplace_back((events[i + n].uv - events[i].uv).norm(), events[i].uv);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vec2> out;
  for (const auto& [dist, uv] : scored) {
    if (static_cast<int>(out.size()) >= count) break;
    out.push_back(uv);
  }
  return out;
}

}  // namespace tdyn
