#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oracle.hpp"
#include "tdyn/bifurcation.hpp"
#include "tdyn/cli.hpp"
#include "tdyn/dynamics.hpp"
#include "tdyn/error.hpp"
#include "tdyn/graphmap.hpp"
#include "tdyn/heteroclinic.hpp"
#include "tdyn/orbits.hpp"
#include "tdyn/poincare.hpp"
#include "tdyn/symbolic.hpp"
#include "tdyn/templates.hpp"

using namespace tdyn;

namespace {

std::string fixture(const std::string& name) { return std::string(TDYN_FIXTURES) + "/" + name; }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* what, double budget_ms, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (budget_ms > 0 && ms > budget_ms) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(budget_ms)) + " ms budget)";
  }
  std::printf("%s criterion %d: %s [%.1f ms] %s\n", o.pass ? "PASS" : "FAIL", n, what, ms, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

Diagram load_diagram(const std::string& name) {
  std::ifstream in(fixture(name));
  return diagram_from_json(nlohmann::json::parse(in));
}

std::vector<Diagram> single_label_mutations(const Diagram& d) {
  std::vector<Diagram> out;
  for (std::size_t i = 0; i < d.branches.size(); ++i)
    for (int idx : {-1, 0, 1})
      if (idx != d.branches[i].index) {
        Diagram m = d;
        m.branches[i].index = idx;
        out.push_back(m);
      }
  for (std::size_t i = 0; i < d.nodes.size(); ++i)
    for (auto k : {NodeKind::saddle_node, NodeKind::period_doubling, NodeKind::hopf, NodeKind::terminal})
      if (k != d.nodes[i].kind) {
        Diagram m = d;
        m.nodes[i].kind = k;
        out.push_back(m);
      }
  return out;
}

// joins the origin to (0,1,0) along the y axis exactly at mu = 1/2
struct Connector final : VectorField {
  double mu = 0.5;
  State3 eval(const State3& s) const override {
    return {s[0] * (2 * s[1] - 1) + (mu - 0.5) * s[1] * (1 - s[1]), s[1] * (1 - s[1]), -2 * s[2]};
  }
  Mat3 jacobian(const State3& s) const override {
    Mat3 j;
    j << 2 * s[1] - 1, 2 * s[0] + (mu - 0.5) * (1 - 2 * s[1]), 0, 0, 1 - 2 * s[1], 0, 0, 0, -2;
    return j;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main() {
  criterion(1, "graph-entropy of the two-strand cover is 1+sqrt2", 10, [] {
    std::ostringstream out, err;
    const int code = run_cli({"graph-entropy", fixture("cover2.json")}, out, err);
    const double rho = nlohmann::json::parse(out.str())["spectral_radius"].get<double>();
    const double e = std::abs(rho - (1 + std::numbers::sqrt2));
    return Outcome{code == 0 && e <= 1e-9, fmt("error %.2e", e)};
  });

  criterion(2, "phi == psi on 10^4 random Type-0 pairs", 5000, [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> logmag(-3, 3), th(1e-3, std::numbers::pi - 1e-3), coin(0, 1);
    int checked = 0, bad = 0;
    while (checked < 10000) {
      MultiplierPair m;
      const double r = std::exp(logmag(rng));
      if (coin(rng) < 0.5) {
        const double t = th(rng);
        m = {std::polar(r, t), std::polar(r, -t)};
      } else {
        const double s = coin(rng) < 0.5 ? -1 : 1;
        m = {cplx(s * r, 0), cplx(s * std::exp(logmag(rng)), 0)};
      }
      if (classify_orbit_type(m) != OrbitType::Type0) continue;
      bad += phi_index(m) != psi_index(m);
      ++checked;
    }
    return Outcome{bad == 0, std::to_string(bad) + " mismatches"};
  });

  criterion(3, "suspension index matches the Jacobian-product oracle up to length 12", 10000, [] {
    int words = 0, bad = 0, fake_not_minus = 0;
    for (auto kind : {HorseshoeKind::smale, HorseshoeKind::fake}) {
      const auto model = make_horseshoe(kind);
      for (const auto& w : enumerate_periodic_words(12)) {
        Eigen::EigenSolver<Mat2> es(jacobian_product_oracle(model, w));
        const int idx = suspension_index(model, w);
        bad += idx != phi_index({es.eigenvalues()[0], es.eigenvalues()[1]});
        if (kind == HorseshoeKind::fake) fake_not_minus += idx != -1;
        ++words;
      }
    }
    return Outcome{bad == 0 && fake_not_minus == 0, std::to_string(words) + " words, " + std::to_string(bad) +
                                                        " mismatches, " + std::to_string(fake_not_minus) +
                                                        " fake orbits off -1"};
  });

  criterion(4, "valid diagrams pass, posib and every mutation fail", 1000, [] {
    int clean = 0, caught = 0, total = 0;
    for (const char* name : {"coll223.json", "da2.json", "colli.json"}) {
      const auto d = load_diagram(name);
      clean += validate_diagram(d).ok;
      for (const auto& m : single_label_mutations(d)) {
        ++total;
        caught += !validate_diagram(m).ok;
      }
    }
    const bool posib = !validate_diagram(load_diagram("posib_cyan.json")).ok;
    return Outcome{clean == 3 && posib && caught == total,
                   std::to_string(caught) + "/" + std::to_string(total) + " mutations caught"};
  });

  criterion(5, "fixed points and parameter-space clauses", 0, [] {
    const FlowSystem lor(LorenzParams{});
    const auto lf = fixed_points(lor);
    const double s72 = std::sqrt(72.0);
    double err = 0, res = 0;
    for (const auto& [name, sign] : {std::pair{"p+", 1.0}, std::pair{"p-", -1.0}}) {
      const auto& p = find_fixed_point(lf, name).location;
      err = std::max(err, (p - State3(sign * s72, sign * s72, 27)).norm());
      res = std::max(res, lor.eval(p).norm());
    }
    const FlowSystem ros(RosslerParams{});
    const auto rf = fixed_points(ros);
    const auto& in = find_fixed_point(rf, "P_In");
    const auto& out = find_fixed_point(rf, "P_Out");
    const double disc = std::sqrt(5.7 * 5.7 - 4 * 0.04);
    const double x_in = (5.7 - disc) / 2, x_out = (5.7 + disc) / 2;
    double rerr = (in.location - State3(x_in, -x_in / 0.2, x_in / 0.2)).norm();
    rerr = std::max(rerr, (out.location - State3(x_out, -x_out / 0.2, x_out / 0.2)).norm());
    const bool foci = in.cls.type == TopoType::saddle_focus && out.cls.type == TopoType::saddle_focus;
    const bool opposite = in.cls.poincare_index && out.cls.poincare_index &&
                          *in.cls.poincare_index == -*out.cls.poincare_index;
    const bool space = in_parameter_space(ros).ok && in_parameter_space(lor).ok;
    return Outcome{err <= 1e-10 && res <= 1e-10 && rerr <= 1e-10 && foci && opposite && space,
                   fmt("lorenz %.1e", err) + fmt(" residual %.1e", res) + fmt(" rossler %.1e", rerr)};
  });

  criterion(6, "Lorenz LR orbit: residual, trivial multiplier, Liouville, frame", 0, [] {
    const FlowSystem lor(LorenzParams{});
    OrbitOptions o;
    o.ret.integ.tol = 1e-12;
    const Section sec = default_section(lor);
    const auto orbit = find_periodic_orbit(lor, sec, Vec2(13.76, 19.58), 2, o);
    const auto base = return_map_jacobian(lor, sec, sec.lift(orbit.uv), 2, o.ret);
    Eigen::EigenSolver<Mat3> mono(base.monodromy);
    double trivial = 1e9;
    for (int i = 0; i < 3; ++i) trivial = std::min(trivial, std::abs(mono.eigenvalues()[i] - cplx(1, 0)));
    const double liouville = std::exp(-(10 + 1 + 8.0 / 3.0) * orbit.flight_time);
    const double lerr = std::abs(base.det - liouville) / liouville;
    const auto m0 = floquet_multipliers(base.jacobian, base.det);
    double frame = 0;
    for (double ang : {0.7, 2.3}) {
      const auto r = return_map_jacobian(lor, sec.rotated_frame(ang), sec.lift(orbit.uv), 2, o.ret);
      const auto m1 = floquet_multipliers(r.jacobian, r.det);
      frame = std::max({frame, std::abs(m1.mu1 - m0.mu1) / std::max(1.0, std::abs(m0.mu1)),
                        std::abs(m1.mu2 - m0.mu2) / std::max(1.0, std::abs(m0.mu2))});
    }
    return Outcome{orbit.residual <= 1e-10 && trivial <= 1e-5 && lerr <= 1e-5 && frame <= 1e-6,
                   fmt("residual %.1e", orbit.residual) + fmt(" trivial %.1e", trivial) +
                       fmt(" liouville %.1e", lerr) + fmt(" frame %.1e", frame)};
  });

  criterion(7, "trapping dot product equals b", 0, [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> par(0.05, 1.0), c(1.0, 10.0), pt(-50, 50);
    int bad = 0;
    for (int set = 0; set < 5; ++set) {
      const RosslerParams p{par(rng), par(rng), c(rng)};
      const FlowSystem ros(p);
      for (int k = 0; k < 1000; ++k) bad += trapping_dot_check(ros, State3(pt(rng), pt(rng), 0)) != p.b;
    }
    return Outcome{bad == 0, std::to_string(bad) + " of 5000 off"};
  });

  criterion(8, "template knots: LR unknot, trefoil, positive lorenz braids", 30000, [] {
    const bool lr = alexander_polynomial(braid_word(TemplateKind::lorenz, SymbolWord("LR"))).str() == "1";
    BraidWord s3;
    s3.strands = 2;
    s3.gens = {1, 1, 1};
    s3.component = {0, 0};
    const auto tre = alexander_polynomial(s3);
    const bool trefoil = tre.str() == "1-t+t^2" && detect_torus_knot(tre) == std::pair{2, 3};
    int negative = 0, words = 0;
    for (const auto& w : enumerate_periodic_words(8, "LR")) {
      if (w.length() < 2) continue;
      ++words;
      for (int g : braid_word(TemplateKind::lorenz, w).gens) negative += g < 0;
    }
    return Outcome{lr && trefoil && negative == 0,
                   "trefoil " + tre.str() + ", " + std::to_string(words) + " words, " + std::to_string(negative) +
                       " negative crossings"};
  });

  criterion(9, "heteroclinic bisection: linear fixture and Lorenz homoclinic", 0, [] {
    ConnectionSpec lin;
    lin.radius = 0.1;
    const Sampler linear = [lin](double mu) {
      Connector f;
      f.mu = mu;
      auto s = connection_distance(f, State3::Zero(), State3(0, 1, 0), lin);
      s.param = mu;
      return s;
    };
    const double lin_err = std::abs(bisect_connection(linear, 0.2, 0.9).estimate - 0.5);

    ConnectionSpec hom;
    hom.source = hom.target = "origin";
    hom.radius = 5;
    const auto lorenz = make_sampler(FlowSystem(LorenzParams{}), "rho", hom);
    const auto scan = scan_parameter(lorenz, 13, 15, 21);
    int flags = 0;
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < scan.size(); ++i)
      if (scan[i].flag && flags++ == 0) lo = scan[i - 1].sample.param, hi = scan[i].sample.param;
    double dist = INFINITY, est = NAN;
    if (flags > 0) {
      const auto r = bisect_connection(lorenz, lo, hi);
      dist = std::abs(r.distance);
      est = r.estimate;
    }
    return Outcome{lin_err <= 1e-8 && flags >= 1 && dist < 1e-5,
                   fmt("linear error %.1e", lin_err) + ", " + std::to_string(flags) + " flags" +
                       fmt(", rho* %.10f", est) + fmt(" |d| %.1e", dist)};
  });

  criterion(10, "spectral radius vs characteristic roots, all matrices up to 3x3 with entries 0..3", 0, [] {
    long count = 0;
    double worst = 0;
    for (int n = 1; n <= 3; ++n) {
      const int cells = n * n;
      long total = 1;
      for (int i = 0; i < cells; ++i) total *= 4;
      Eigen::MatrixXd a(n, n);
      for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < cells; ++i, c /= 4) a(i / n, i % n) = static_cast<double>(c % 4);
        worst = std::max(worst, std::abs(spectral_radius(a) - oracle::spectral_radius(a)));
        ++count;
      }
    }
    return Outcome{worst <= 1e-8, std::to_string(count) + fmt(" matrices, worst %.1e", worst)};
  });

  return failures == 0 ? 0 : 1;
}
