#include "tdyn/heteroclinic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <thread>

#include <Eigen/Eigenvalues>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

struct MeasurePlane {
  Section section;
  Mat3 basis_inv;  // coordinates in (v, b1, b2)
  std::string label;
};

std::string vec_str(const State3& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g,%.6g,%.6g)", v[0] + 0.0, v[1] + 0.0, v[2] + 0.0);
  return buf;
}

std::string num_str(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

MeasurePlane measurement_plane(const VectorField& field, const State3& source, const State3& q,
                               const ConnectionSpec& spec) {
  const auto dir = one_dim_direction(field, q);
  if (dir.stable) fail(ErrorKind::InvalidArgument, "target has no 1-D unstable direction");
  const State3 v = dir.vector;

  Eigen::EigenSolver<Mat3> es(field.jacobian(q));
  const auto ev = es.eigenvalues();
  std::vector<int> stable;
  for (int i = 0; i < 3; ++i)
    if (ev[i].real() < 0) stable.push_back(i);
  if (stable.size() != 2) fail(ErrorKind::InvalidArgument, "target needs a 2-D stable manifold");

  Mat3 basis;
  basis.col(0) = v;
  if (nearly_real(ev[stable[0]]) && nearly_real(ev[stable[1]])) {
    const int weak = ev[stable[0]].real() > ev[stable[1]].real() ? stable[0] : stable[1];
    const int strong = weak == stable[0] ? stable[1] : stable[0];
    State3 w = es.eigenvectors().col(weak).real().normalized();
    int big = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(w[i]) > std::abs(w[big]) + 1e-12) big = i;
    if (w[big] < 0) w = -w;
    const double lean = w.dot(source - q);
    const double side = lean < 0 ? -1.0 : 1.0;
    basis.col(1) = w;
    basis.col(2) = es.eigenvectors().col(strong).real().normalized();
    State3 e1 = v - v.dot(w) * w;
    Section sec = e1.norm() > 1e-8 ? Section(q + side * spec.radius * w, -side * w, e1, Orientation::positive)
                                   : Section(q + side * spec.radius * w, -side * w, Orientation::positive);
    if (std::isfinite(spec.capture)) sec.radius = spec.capture;
    return {sec, basis.inverse(),
            "offset plane r=" + num_str(spec.radius) + " normal=" + vec_str(-side * w)};
  }
  const Eigen::Vector3cd w = es.eigenvectors().col(stable[0]);
  basis.col(1) = w.real();
  basis.col(2) = w.imag();
  State3 n = w.real() - w.real().dot(v) * v;
  if (n.norm() < 1e-10) n = w.imag() - w.imag().dot(v) * v;
  Section sec(q, n.normalized(), v, Orientation::both);
  if (std::isfinite(spec.capture)) sec.radius = spec.capture;
  return {sec, basis.inverse(), "unstable plane normal=" + vec_str(n.normalized())};
}

}  // namespace

std::string_view to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::ok: return "ok";
    case SampleStatus::blowup: return "blowup";
    case SampleStatus::no_crossing: return "no_crossing";
  }
  return "?";
}

SplittingSample connection_distance(const VectorField& field, const State3& source,
                                    const State3& target, const ConnectionSpec& spec) {
  if (spec.branch != 1 && spec.branch != -1) fail(ErrorKind::InvalidArgument, "branch must be +1 or -1");
  const auto src = one_dim_direction(field, source);
  if (src.stable) fail(ErrorKind::InvalidArgument, "source has no 1-D unstable manifold");
  const MeasurePlane mp = measurement_plane(field, source, target, spec);

  SplittingSample out;
  out.plane = mp.label;
  const State3 start = source + spec.delta * std::max(1.0, source.norm()) * spec.branch * src.vector;
  ReturnOptions ret = spec.ret;
  ret.direction = 1;
  ReturnEvent ev;
  try {
    if (mp.section.orientation() == Orientation::both && (source - target).norm() < spec.radius) {
      // homoclinic through the unstable plane: leave the neighbourhood before measuring
      const State3 away = spec.branch * src.vector;
      const Section exit(source + spec.radius * away, away, Orientation::positive);
      const ReturnEvent out_leg = first_return(field, exit, start, ret);
      ev = first_return(field, mp.section, out_leg.state, ret);
      ev.time += out_leg.time;
    } else {
      ev = first_return(field, mp.section, start, ret);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BlowUp) {
      out.status = SampleStatus::blowup;
      return out;
    }
    if (e.kind() == ErrorKind::NoReturn) fail(ErrorKind::NoCrossing, e.what());
    throw;
  }
  out.distance = (mp.basis_inv * (ev.state - target))[0];
  out.flight_time = ev.time;
  out.crossing = ev.state;
  if (spec.record_arc) {
    const Trajectory tr = integrate(field, start, 0.0, ev.time, ret.integ);
    out.arc = {source};
    out.arc.insert(out.arc.end(), tr.states().begin(), tr.states().end() - 1);
    out.arc.push_back(ev.state);
  }
  return out;
}

SplittingSample connection_distance(const FlowSystem& system, const ConnectionSpec& spec) {
  const auto fps = fixed_points(system);
  return connection_distance(system, find_fixed_point(fps, spec.source).location,
                             find_fixed_point(fps, spec.target).location, spec);
}

Sampler make_sampler(const FlowSystem& base, const std::string& axis, const ConnectionSpec& spec) {
  base.get(axis);  // rejects unknown parameter names up front
  return [base, axis, spec](double p) {
    auto s = connection_distance(base.with(axis, p), spec);
    s.param = p;
    return s;
  };
}

std::vector<ScanPoint> scan_parameter(const Sampler& sampler, double lo, double hi, int steps,
                                      unsigned threads) {
  if (steps < 2) fail(ErrorKind::InvalidArgument, "scan needs at least 2 steps");
  std::vector<ScanPoint> out(static_cast<std::size_t>(steps));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < steps; i = next++) {
      const double p = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
      ScanPoint& sp = out[static_cast<std::size_t>(i)];
      try {
        sp.sample = sampler(p);
      } catch (const Error& e) {
        sp.sample.status = SampleStatus::no_crossing;
        sp.error = std::string(to_string(e.kind())) + ": " + e.what();
      }
      sp.sample.param = p;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(steps));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const ScanPoint* prev = nullptr;
  for (auto& sp : out) {
    if (sp.sample.status != SampleStatus::ok) continue;
    if (prev && (prev->sample.distance < 0) != (sp.sample.distance < 0)) sp.flag = true;
    prev = &sp;
  }
  return out;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& scan) {
  os << "param,distance,flag\n";
  char buf[128];
  for (const auto& sp : scan) {
    const auto& s = sp.sample;
    if (s.status == SampleStatus::ok)
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d\n", s.param, s.distance, sp.flag ? 1 : 0);
    else
      std::snprintf(buf, sizeof buf, "%.12g,%s,0\n", s.param, s.status == SampleStatus::blowup ? "inf" : "nan");
    os << buf;
  }
}

BisectResult bisect_connection(const Sampler& sampler, double a, double b, double tol) {
  if (!(tol > 0)) fail(ErrorKind::InvalidArgument, "tolerance must be positive");
  auto finite = [&](double p, const char* what) {
    SplittingSample s;
    try {
      s = sampler(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossing) throw;
      s.status = SampleStatus::no_crossing;
    }
    if (s.status != SampleStatus::ok) fail(ErrorKind::BracketInvalid, std::string(what) + " has no finite distance");
    return s.distance;
  };
  BisectResult r;
  r.lo = std::min(a, b);
  r.hi = std::max(a, b);
  r.d_lo = finite(r.lo, "lower endpoint");
  r.d_hi = finite(r.hi, "upper endpoint");
  if (r.d_lo == 0 || r.d_hi == 0) {
    r.estimate = r.d_lo == 0 ? r.lo : r.hi;
    return r;
  }
  if ((r.d_lo < 0) == (r.d_hi < 0)) fail(ErrorKind::BracketInvalid, "bracket endpoints share a sign");
  while (r.hi - r.lo > tol) {
    const double m = 0.5 * (r.lo + r.hi);
    if (m <= r.lo || m >= r.hi) break;
    SplittingSample s;
    try {
      s = sampler(m);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossing) throw;
      s.status = SampleStatus::no_crossing;
    }
    if (s.status != SampleStatus::ok) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s inside sub-bracket [%.12g, %.12g]", std::string(to_string(s.status)).c_str(),
                    r.lo, r.hi);
      fail(ErrorKind::LostSign, buf);
    }
    ++r.iterations;
    if (s.distance == 0) {
      r.lo = r.hi = m;
      r.d_lo = r.d_hi = 0;
      break;
    }
    if ((s.distance < 0) == (r.d_lo < 0)) {
      r.lo = m;
      r.d_lo = s.distance;
    } else {
      r.hi = m;
      r.d_hi = s.distance;
    }
  }
  r.estimate = 0.5 * (r.lo + r.hi);
  r.distance = r.lo == r.hi ? 0.0 : sampler(r.estimate).distance;
  return r;
}

namespace {

// Closed polyline in cycle order, with each vertex's arc index.
struct Loop {
  std::vector<State3> pts;
};

bool intersect_xz(const State3& p0, const State3& p1, const State3& q0, const State3& q1, double& s,
                  double& u) {
  const double ax = p1[0] - p0[0], az = p1[2] - p0[2];
  const double bx = q1[0] - q0[0], bz = q1[2] - q0[2];
  const double den = ax * bz - az * bx;
  const double cx = q0[0] - p0[0], cz = q0[2] - p0[2];
  if (std::abs(den) < 1e-300) {
    if (std::abs(cx * az - cz * ax) > 1e-12 * (1 + std::hypot(ax, az))) return false;
    const double len2 = ax * ax + az * az;
    if (len2 == 0) return false;
    const double t0 = (cx * ax + cz * az) / len2;
    const double t1 = ((q1[0] - p0[0]) * ax + (q1[2] - p0[2]) * az) / len2;
    if (std::max(t0, t1) >= 0 && std::min(t0, t1) < 1)
      fail(ErrorKind::DegenerateProjection, "collinear overlapping segments in projection");
    return false;
  }
  s = (cx * bz - cz * bx) / den;
  u = (cx * az - cz * ax) / den;
  return s >= 0 && s < 1 && u >= 0 && u < 1;
}

}  // namespace

HeteroclinicKnot assemble_knot(const std::map<std::string, State3>& fixed_points,
                               const std::vector<KnotArc>& arcs, double endpoint_tol) {
  HeteroclinicKnot k;
  if (arcs.empty()) fail(ErrorKind::ChainBroken, "no arcs");
  std::map<std::string, int> as_source, as_target;
  std::map<std::string, std::size_t> from;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    for (const auto* name : {&a.source, &a.target})
      if (!fixed_points.count(*name)) fail(ErrorKind::ChainBroken, "unknown fixed point '" + *name + "'");
    if (a.polyline.size() < 2) fail(ErrorKind::ChainBroken, "arc " + a.source + "->" + a.target + " is empty");
    if ((a.polyline.front() - fixed_points.at(a.source)).norm() > endpoint_tol)
      fail(ErrorKind::ChainBroken, "arc " + a.source + "->" + a.target + " does not start at " + a.source);
    if ((a.polyline.back() - fixed_points.at(a.target)).norm() > endpoint_tol)
      fail(ErrorKind::ChainBroken, "arc " + a.source + "->" + a.target + " does not end at " + a.target);
    ++as_source[a.source];
    ++as_target[a.target];
    from[a.source] = i;
  }
  for (const auto& [name, p] : fixed_points) {
    if (as_source[name] != 1 || as_target[name] != 1)
      fail(ErrorKind::ChainBroken, "fixed point " + name + " is not entered and left exactly once");
  }

  // follow the permutation source -> target from the first arc
  std::set<std::string> seen;
  std::string at = arcs.front().source;
  while (!seen.count(at)) {
    seen.insert(at);
    k.order.push_back(at);
    k.arcs.push_back(arcs[from.at(at)]);
    at = arcs[from.at(at)].target;
  }
  if (seen.size() != fixed_points.size()) {
    k.diagnostics.push_back("chain splits into several cycles; first cycle visits " +
                            std::to_string(seen.size()) + " of " + std::to_string(fixed_points.size()) +
                            " fixed points");
    return k;
  }
  k.closed = true;

  std::vector<State3> pts;
  for (const auto& a : k.arcs) pts.insert(pts.end(), a.polyline.begin(), a.polyline.end() - 1);
  const std::size_t n = pts.size();
  if (n < 3) return k;

  struct Event {
    double pos;
    bool over;
  };
  std::vector<Event> events;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // cyclic neighbours
      const State3& p0 = pts[i];
      const State3& p1 = pts[(i + 1) % n];
      const State3& q0 = pts[j];
      const State3& q1 = pts[(j + 1) % n];
      double s = 0, u = 0;
      if (!intersect_xz(p0, p1, q0, q1, s, u)) continue;
      const State3 a = p0 + s * (p1 - p0);
      const State3 b = q0 + u * (q1 - q0);
      if (std::abs(a[1] - b[1]) < 1e-12) fail(ErrorKind::DegenerateProjection, "crossing strands at equal height");
      for (const auto& c : k.crossing_list)
        if (std::hypot(c.x - a[0], c.z - a[2]) < 1e-6)
          fail(ErrorKind::DegenerateProjection, "crossings closer than 1e-6 in projection");
      const bool i_over = a[1] > b[1];
      k.crossing_list.push_back({i_over ? i : j, i_over ? j : i, a[0], a[2]});
      events.push_back({i + s, i_over});
      events.push_back({j + u, !i_over});
    }
  }
  k.crossings = static_cast<int>(k.crossing_list.size());
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.pos < y.pos; });
  k.alternating = !events.empty();
  for (std::size_t e = 0; e < events.size(); ++e)
    if (events[e].over == events[(e + 1) % events.size()].over) k.alternating = false;
  k.trefoil_candidate = k.crossings >= 3 && k.alternating;
  return k;
}

nlohmann::ordered_json to_json(const HeteroclinicKnot& knot) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["closed"] = knot.closed;
  j["order"] = knot.order;
  j["crossings"] = knot.crossings;
  j["alternating"] = knot.alternating;
  j["trefoil_candidate"] = knot.trefoil_candidate;
  j["diagnostics"] = knot.diagnostics;
  j["arcs"] = oj::array();
  for (const auto& a : knot.arcs) {
    oj pl = oj::array();
    for (const auto& p : a.polyline) pl.push_back({p[0], p[1], p[2]});
    j["arcs"].push_back({{"source", a.source}, {"target", a.target}, {"polyline", pl}});
  }
  return j;
}

}  // namespace tdyn
