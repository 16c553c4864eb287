#include "tdyn/poincare.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dopri.hpp"
#include "tdyn/error.hpp"

namespace tdyn {

namespace {

State3 unit(const State3& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0) || !std::isfinite(n)) fail(ErrorKind::InvalidArgument, std::string(what) + " is zero");
  return v / n;
}

State3 default_e1(const State3& n) {
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[axis]) - 1e-12) axis = i;
  State3 e = State3::Unit(axis);
  return unit(e - e.dot(n) * n, "frame vector");
}

template <int N>
struct Hit {
  detail::VecN<N> y;
  double t;
  int sign;
};

template <int N>
std::optional<Hit<N>> refine(const detail::Driver<N>& drv, const VectorField& field,
                             const Section& sec, double ta, double ga, double tb, double gb,
                             double event_tol) {
  // Narrow the bracket on the Hermite interpolant, then Newton on exact substeps.
  // The sign refers to forward time whatever the integration direction.
  const int sign = (gb > ga ? 1 : -1) * static_cast<int>(drv.direction());
  auto exact = [&](double tq) {
    if (tq == drv.t_prev) return drv.y_prev;
    if (tq == drv.t) return drv.y;
    return drv.substep(tq - drv.t_prev);
  };
  // exact bracket: the sampled sub-interval if its true endpoint values
  // straddle zero, the whole step otherwise
  double ea = ta, eb = tb;
  double fa = sec.eval(State3(exact(ea).template head<3>()));
  double fb = sec.eval(State3(exact(eb).template head<3>()));
  if ((fa < 0) == (fb < 0)) {
    ea = drv.t_prev, eb = drv.t;
    fa = sec.eval(State3(drv.y_prev.template head<3>()));
    fb = sec.eval(State3(drv.y.template head<3>()));
  }
  for (int i = 0; i < 20; ++i) {
    const double tm = 0.5 * (ta + tb);
    const double gm = sec.eval(drv.dense(tm));
    if ((gm < 0) == (ga < 0)) ta = tm, ga = gm;
    else tb = tm, gb = gm;
  }
  double tc = ga == gb ? 0.5 * (ta + tb) : ta - ga * (tb - ta) / (gb - ga);
  const double lo = std::min(ea, eb), hi = std::max(ea, eb);
  if (!(tc > lo && tc < hi)) tc = 0.5 * (ea + eb);
  detail::VecN<N> y = exact(tc);
  for (int it = 0; it < 60; ++it) {
    const State3 s = y.template head<3>();
    const double g = sec.eval(s);
    if (std::abs(g) <= event_tol) return Hit<N>{y, tc, sign};
    if ((fa < 0) == (fb < 0)) break;
    if ((g < 0) == (fa < 0)) ea = tc, fa = g;
    else eb = tc, fb = g;
    const double dg = sec.normal().dot(field.eval(s));
    double next = dg != 0 ? tc - g / dg : 0.5 * (ea + eb);
    if (!(next > std::min(ea, eb) && next < std::max(ea, eb))) next = 0.5 * (ea + eb);
    if (next == tc) break;
    tc = next;
    y = exact(tc);
  }
  return Hit<N>{y, tc, sign};
}

template <int N>
Hit<N> find_return(detail::Driver<N>& drv, const VectorField& field, const Section& sec,
                   const ReturnOptions& opts) {
  const double t0 = drv.t;
  const double dir = drv.direction();
  const double t_end = t0 + dir * opts.t_max;
  const double t_on = t0 + dir * opts.t_min;
  constexpr int kSamples = 8;
  while (drv.t != t_end) {
    drv.advance(t_end);
    if (dir * (drv.t - t_on) <= 0) continue;
    const double ta = dir * (drv.t_prev - t_on) < 0 ? t_on : drv.t_prev;
    double tl = ta;
    double gl = sec.eval(drv.dense(tl));
    for (int k = 1; k <= kSamples; ++k) {
      const double tr = k == kSamples ? drv.t : ta + (drv.t - ta) * k / kSamples;
      const double gr = sec.eval(k == kSamples ? State3(drv.y.template head<3>()) : drv.dense(tr));
      if ((gl < 0 && gr >= 0) || (gl > 0 && gr <= 0)) {
        auto hit = refine<N>(drv, field, sec, tl, gl, tr, gr, opts.event_tol);
        if (hit && sec.accepts(hit->y.template head<3>(), hit->sign)) return *hit;
      }
      tl = tr;
      gl = gr;
    }
  }
  fail(ErrorKind::NoReturn, "no section crossing within t_max=" + std::to_string(opts.t_max));
}

ReturnEvent make_event(const VectorField& field, const Section& sec, const State3& s, double dt,
                       int sign, const ReturnOptions& opts) {
  ReturnEvent ev;
  ev.state = s;
  ev.time = std::abs(dt);
  ev.sign = sign;
  ev.uv = sec.coords(s);
  ev.tangent = std::abs(sec.normal().dot(field.eval(s))) < opts.tangency_tol;
  return ev;
}

}  // namespace

Section::Section(const State3& point, const State3& normal, Orientation orientation)
    : point_(point), normal_(unit(normal, "section normal")), orientation_(orientation) {
  e1_ = default_e1(normal_);
  e2_ = normal_.cross(e1_);
}

Section::Section(const State3& point, const State3& normal, const State3& e1, Orientation orientation)
    : point_(point), normal_(unit(normal, "section normal")), orientation_(orientation) {
  e1_ = unit(e1 - e1.dot(normal_) * normal_, "frame vector");
  e2_ = normal_.cross(e1_);
}

Vec2 Section::coords(const State3& s) const {
  const State3 d = s - point_;
  return Vec2(e1_.dot(d), e2_.dot(d));
}

Eigen::Matrix<double, 3, 2> Section::frame() const {
  Eigen::Matrix<double, 3, 2> e;
  e.col(0) = e1_;
  e.col(1) = e2_;
  return e;
}

bool Section::accepts(const State3& s, int sign) const {
  if (orientation_ == Orientation::positive && sign < 0) return false;
  if (orientation_ == Orientation::negative && sign > 0) return false;
  const Vec2 uv = coords(s);
  if (clip && clip->a * uv[0] + clip->b * uv[1] > clip->c) return false;
  if (radius && uv.norm() > *radius) return false;
  return true;
}

Section Section::rotated_frame(double angle) const {
  Section out = *this;
  const double c = std::cos(angle), s = std::sin(angle);
  out.e1_ = c * e1_ + s * e2_;
  out.e2_ = normal_.cross(out.e1_);
  if (clip) {
    // keep the same half-plane in the rotated coordinates
    out.clip = HalfPlane{clip->a * c + clip->b * s, -clip->a * s + clip->b * c, clip->c};
  }
  return out;
}

Section Section::with_orientation(Orientation o) const {
  Section out = *this;
  out.orientation_ = o;
  return out;
}

ReturnEvent first_return(const VectorField& field, const Section& section, const State3& s0,
                         const ReturnOptions& opts) {
  detail::Driver<3> drv(field, s0, 0.0, opts.direction, opts.integ);
  const auto hit = find_return<3>(drv, field, section, opts);
  return make_event(field, section, hit.y, hit.t, hit.sign, opts);
}

VariationalReturn first_return_variational(const VectorField& field, const Section& section,
                                           const State3& s0, const Fundamental& start,
                                           const ReturnOptions& opts) {
  detail::Driver<12> drv(field, detail::pack(s0, start.q), 0.0, opts.direction, opts.integ, start.r);
  const auto hit = find_return<12>(drv, field, section, opts);
  VariationalReturn out;
  out.event = make_event(field, section, hit.y.head<3>(), hit.t, hit.sign, opts);
  const Fundamental local = Fundamental::from(detail::unpack_psi(hit.y));
  out.fundamental.q = local.q;
  out.fundamental.r = local.r * drv.r_prev();
  return out;
}

std::vector<ReturnEvent> collect_returns(const VectorField& field, const Section& section,
                                         const State3& s0, int count, const ReturnOptions& opts) {
  std::vector<ReturnEvent> out;
  State3 s = s0;
  for (int i = 0; i < count; ++i) {
    out.push_back(first_return(field, section, s, opts));
    s = out.back().state;
  }
  return out;
}

ReturnMapResult iterate_return_map(const VectorField& field, const Section& section,
                                   const Vec2& uv, int n, const ReturnOptions& opts) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "period must be positive");
  const State3 s0 = section.lift(uv);
  const State3 f0 = field.eval(s0);
  if (std::abs(section.normal().dot(f0)) < opts.tangency_tol)
    fail(ErrorKind::Tangency, "flow is tangent to the section at the start point");

  Mat3 basis;
  basis.col(0) = f0.normalized();
  basis.col(1) = section.e1();
  basis.col(2) = section.e2();

  ReturnMapResult out;
  Fundamental fund = Fundamental::from(basis);
  State3 s = s0;
  for (int k = 0; k < n; ++k) {
    auto vr = first_return_variational(field, section, s, fund, opts);
    out.time += vr.event.time;
    out.events.push_back(vr.event);
    s = vr.event.state;
    fund = vr.fundamental;
  }
  out.image = section.coords(s);

  // The first column of Q follows the flow direction; projecting along it
  // onto the plane annihilates that column, leaving D = G * R[1:,1:].
  const State3 q0 = fund.q.col(0);
  const double nq = section.normal().dot(q0);
  if (std::abs(nq) < 1e-14) fail(ErrorKind::Tangency, "flow is tangent to the section at the return");
  Eigen::Matrix<double, 3, 2> pq;
  for (int j = 0; j < 2; ++j) {
    const State3 col = fund.q.col(j + 1);
    pq.col(j) = col - q0 * (section.normal().dot(col) / nq);
  }
  const Mat2 g = section.frame().transpose() * pq;
  const Mat2 r = fund.r.block<2, 2>(1, 1);
  out.jacobian = g * r;
  out.det = g.determinant() * r(0, 0) * r(1, 1);
  out.monodromy = fund.matrix() * basis.inverse();
  return out;
}

ReturnMapResult return_map_jacobian(const VectorField& field, const Section& section,
                                    const State3& s_fixed, int n, const ReturnOptions& opts) {
  const Vec2 uv = section.coords(s_fixed);
  auto res = iterate_return_map(field, section, uv, n, opts);
  const double residual = (res.image - uv).norm();
  if (residual > 1e-6)
    fail(ErrorKind::InvalidArgument,
         "point does not close after " + std::to_string(n) + " returns (residual " +
             std::to_string(residual) + ")");
  return res;
}

Section default_section(const FlowSystem& system) {
  switch (system.kind()) {
    case SystemKind::lorenz: {
      const double rho = system.get("rho");
      Section sec(State3(0, 0, rho - 1), State3::UnitZ(), State3::UnitX(), Orientation::positive);
      sec.symbol = [](const State3& s) { return s[0] < 0 ? 'L' : 'R'; };
      return sec;
    }
    case SystemKind::rossler: {
      Section sec(State3::Zero(), State3::UnitY(), State3::UnitX(), Orientation::positive);
      const auto fps = fixed_points(system);
      sec.clip = HalfPlane{1, 0, find_fixed_point(fps, "P_Out").location[0]};
      return sec;
    }
    case SystemKind::moore_spiegel:
      return Section(State3::Zero(), State3::UnitX(), State3::UnitY(), Orientation::positive);
  }
  fail(ErrorKind::InvalidArgument, "unknown system");
}

void write_events_csv(std::ostream& os, const std::vector<ReturnEvent>& events) {
  os << "t,x,y,z,sign,u,v\n";
  char buf[192];
  double t = 0;
  for (const auto& e : events) {
    t += e.time;
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%d,%.12g,%.12g\n", t, e.state[0],
                  e.state[1], e.state[2], e.sign, e.uv[0], e.uv[1]);
    os << buf;
  }
}

OneDimDirection one_dim_direction(const VectorField& field, const State3& fp) {
  Eigen::EigenSolver<Mat3> es(field.jacobian(fp));
  const auto ev = es.eigenvalues();
  int unstable = 0;
  for (int i = 0; i < 3; ++i) unstable += ev[i].real() > 0;
  int pick = -1;
  for (int i = 0; i < 3; ++i) {
    const bool wanted = unstable == 1 ? ev[i].real() > 0 : unstable == 2 ? ev[i].real() < 0 : false;
    if (wanted && nearly_real(ev[i])) pick = i;
  }
  if (pick < 0) fail(ErrorKind::NoRealEigenvector, "fixed point has no real 1-D manifold direction");
  State3 v = es.eigenvectors().col(pick).real().normalized();
  int big = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[big]) + 1e-12) big = i;
  if (v[big] < 0) v = -v;
  return {v, ev[pick].real(), unstable == 2};
}

ManifoldTrace trace_manifold_1d(const VectorField& field, const State3& fp, int branch,
                                double arclength, const ManifoldOptions& opts) {
  if (branch != 1 && branch != -1) fail(ErrorKind::InvalidArgument, "branch must be +1 or -1");
  const auto dir = one_dim_direction(field, fp);
  ManifoldTrace out;
  out.stable = dir.stable;
  out.direction = branch * dir.vector;
  out.eigenvalue = dir.eigenvalue;
  const double scale = std::max(1.0, fp.norm());
  const State3 start = fp + opts.delta * scale * out.direction;
  out.polyline = {fp, start};
  out.arclength = (start - fp).norm();

  auto add = [&](const State3& p) {
    const double len = (p - out.polyline.back()).norm();
    if (out.arclength + len >= arclength) {
      const double frac = len > 0 ? (arclength - out.arclength) / len : 0;
      out.polyline.push_back(out.polyline.back() + frac * (p - out.polyline.back()));
      out.arclength = arclength;
      return true;
    }
    out.polyline.push_back(p);
    out.arclength += len;
    return false;
  };

  try {
    detail::Driver<3> drv(field, start, 0.0, dir.stable ? -1.0 : 1.0, opts.integ);
    const double t_end = (dir.stable ? -1.0 : 1.0) * opts.t_max;
    while (out.arclength < arclength && drv.t != t_end) {
      drv.advance(t_end);
      // split the step until every piece is short enough
      std::vector<std::pair<double, State3>> pieces{{drv.t_prev, drv.y_prev.head<3>()}, {drv.t, drv.y.head<3>()}};
      for (std::size_t k = 1; k < pieces.size();) {
        const auto& [ta, pa] = pieces[k - 1];
        const auto& [tb, pb] = pieces[k];
        if ((pb - pa).norm() > opts.max_segment && std::abs(tb - ta) > 1e-15 * std::max(1.0, std::abs(tb))) {
          const double tm = 0.5 * (ta + tb);
          pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(k), {tm, drv.dense(tm)});
        } else {
          ++k;
        }
      }
      for (std::size_t k = 1; k < pieces.size(); ++k)
        if (add(pieces[k].second)) break;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BlowUp) throw;
    out.blew_up = true;
  }
  return out;
}

}  // namespace tdyn
