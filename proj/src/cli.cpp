#include "tdyn/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "tdyn/bifurcation.hpp"
#include "tdyn/config.hpp"
#include "tdyn/error.hpp"
#include "tdyn/graphmap.hpp"
#include "tdyn/heteroclinic.hpp"
#include "tdyn/orbits.hpp"
#include "tdyn/symbolic.hpp"
#include "tdyn/templates.hpp"

namespace tdyn {

namespace {

using oj = nlohmann::ordered_json;
namespace fs = std::filesystem;

// 12 significant digits, so reruns print identical bytes.
oj num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

oj vec(const auto& v) {
  oj a = oj::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

oj complex(cplx z) { return oj::array({num(z.real()), num(z.imag())}); }

oj optional_int(const std::optional<int>& v) { return v ? oj(*v) : oj(nullptr); }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path p = fs::path(dir) / name;
  std::ofstream f(p);
  if (!f) fail(ErrorKind::Io, "cannot write '" + p.string() + "'");
  return f;
}

oj params_json(const FlowSystem& s) {
  oj j = oj::object();
  for (const auto& k : s.parameter_names()) j[k] = num(s.get(k));
  return j;
}

struct Globals {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string system;
};

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config.empty() ? parse_config_text("") : parse_config(g.config);
  if (!g.system.empty()) {
    if (!g.config.empty()) fail(ErrorKind::Schema, "--system conflicts with --config");
    cfg = parse_config_text("[system]\nname = " + g.system + "\n", "--system");
  }
  if (g.tol) {
    if (!(*g.tol > 0)) fail(ErrorKind::Schema, "--tol must be positive");
    cfg.integrate.tol = *g.tol;
  }
  return cfg;
}

oj fixed_points_json(const RunConfig& cfg) {
  const auto check = in_parameter_space(cfg.system);
  oj j;
  j["system"] = std::string(to_string(cfg.system.kind()));
  j["params"] = params_json(cfg.system);
  j["in_parameter_space"] = {{"ok", check.ok}, {"reasons", check.reasons}};
  j["fixed_points"] = oj::array();
  for (const auto& fp : fixed_points(cfg.system)) {
    oj e;
    e["name"] = fp.name;
    e["location"] = vec(fp.location);
    e["label"] = type_label(fp.cls);
    e["unstable_dim"] = fp.cls.unstable_dim;
    e["poincare_index"] = optional_int(fp.cls.poincare_index);
    e["eigenvalues"] = oj::array();
    for (const auto& z : fp.cls.eigenvalues) e["eigenvalues"].push_back(complex(z));
    e["residual"] = num(eval_field(cfg.system, fp.location).norm());
    j["fixed_points"].push_back(e);
  }
  return j;
}

int cmd_integrate(const RunConfig& cfg, const Globals& g, std::ostream& out) {
  const auto opts = integrate_options(cfg);
  const auto& in = cfg.integrate;
  const Trajectory traj = integrate(cfg.system, in.x0, in.t0, in.t1, opts);
  std::vector<ReturnEvent> events;
  if (cfg.section) {
    const Section sec = make_section(cfg);
    ReturnOptions ro;
    ro.integ = opts;
    ro.direction = in.t1 >= in.t0 ? 1 : -1;
    const double span = std::abs(in.t1 - in.t0);
    double elapsed = 0;
    State3 s = in.x0;
    while (true) {
      ro.t_max = span - elapsed;
      if (ro.t_max <= ro.t_min) break;
      try {
        events.push_back(first_return(cfg.system, sec, s, ro));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoReturn) throw;
        break;
      }
      elapsed += events.back().time;
      s = events.back().state;
    }
    if (!events.empty()) events.front().time += in.t0 * ro.direction;
  }
  if (g.out_dir.empty()) {
    write_trajectory_csv(out, traj);
    return 0;
  }
  auto tf = open_out(g.out_dir, "trajectory.csv");
  write_trajectory_csv(tf, traj);
  oj j;
  j["steps"] = traj.size();
  j["t_end"] = num(traj.t_back());
  j["final"] = vec(traj.states().back());
  j["trajectory"] = (fs::path(g.out_dir) / "trajectory.csv").string();
  if (cfg.section) {
    auto ef = open_out(g.out_dir, "events.csv");
    write_events_csv(ef, events);
    j["events"] = events.size();
    j["events_file"] = (fs::path(g.out_dir) / "events.csv").string();
  }
  out << j.dump(2) << "\n";
  return 0;
}

oj orbit_json(const RunConfig& cfg, const PeriodicOrbit& o) {
  oj j;
  j["system"] = std::string(to_string(cfg.system.kind()));
  j["params"] = params_json(cfg.system);
  j["period"] = o.period;
  j["requested_period"] = o.requested_period;
  j["downgraded"] = o.downgraded;
  j["word"] = o.word;
  j["flight_time"] = num(o.flight_time);
  j["uv"] = vec(o.uv);
  j["residual"] = num(o.residual);
  j["iterations"] = o.iterations;
  j["multipliers"] = {complex(o.multipliers.mu1), complex(o.multipliers.mu2)};
  j["det"] = num(o.det);
  j["type"] = std::string(to_string(o.type));
  j["label"] = std::string(to_string(o.label));
  j["phi"] = optional_int(o.phi);
  j["psi"] = optional_int(o.psi);
  j["points"] = oj::array();
  for (const auto& p : o.points) j["points"].push_back(vec(p));
  return j;
}

void append_db(const std::string& path, const oj& entry) {
  oj db = oj::array();
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      db = oj::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Schema, path + ": " + e.what());
    }
    if (!db.is_array()) fail(ErrorKind::Schema, path + ": orbit database must be a JSON array");
  }
  db.push_back(entry);
  std::ofstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot write '" + path + "'");
  f << db.dump(2) << "\n";
}

int cmd_find_orbit(const RunConfig& cfg, const std::string& db, std::ostream& out) {
  const Section sec = make_section(cfg);
  OrbitOptions opts;
  opts.tol = cfg.orbit.tol;
  opts.ret.t_max = cfg.orbit.t_max;
  opts.ret.integ = integrate_options(cfg);
  const int n = cfg.orbit.period;
  std::vector<Vec2> seeds;
  if (cfg.orbit.seed) seeds.push_back(*cfg.orbit.seed);
  else seeds = seeds_from_trajectory(cfg.system, sec, cfg.integrate.x0, n, 12, cfg.orbit.returns, opts.ret);
  std::string last = "no seeds found";
  for (const auto& seed : seeds) {
    try {
      const PeriodicOrbit o = find_periodic_orbit(cfg.system, sec, seed, n, opts);
      const oj j = orbit_json(cfg, o);
      if (!db.empty()) append_db(db, j);
      out << j.dump(2) << "\n";
      return 0;
    } catch (const Error& e) {
      if (cfg.orbit.seed) throw;
      last = e.what();
    }
  }
  fail(ErrorKind::NoConvergence, "no seed converged: " + last);
}

oj classify_json(const MultiplierPair& m) {
  oj j;
  const OrbitType type = classify_orbit_type(m);
  j["type"] = std::string(to_string(type));
  std::optional<int> phi, psi;
  if (type == OrbitType::Type0) {
    phi = phi_index(m);
    psi = psi_index(m);
  }
  j["phi"] = optional_int(phi);
  j["psi"] = optional_int(psi);
  j["label"] = std::string(to_string(stability_label(m)));
  const auto c = is_globally_continuable(m);
  j["continuable"] = c.continuable;
  if (!c.reasons.empty()) j["reasons"] = c.reasons;
  return j;
}

MultiplierPair random_type0(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logmag(-3.0, 3.0), angle(0.05, std::numbers::pi - 0.05), coin(0, 1);
  while (true) {
    MultiplierPair m;
    if (coin(rng) < 0.5) {
      const double r = std::exp(logmag(rng));
      const double th = angle(rng);
      m = {std::polar(r, th), std::polar(r, -th)};
    } else {
      const double a = std::exp(logmag(rng)) * (coin(rng) < 0.5 ? -1 : 1);
      const double b = std::exp(logmag(rng)) * (coin(rng) < 0.5 ? -1 : 1);
      m = {a, b};
    }
    if (classify_orbit_type(m) == OrbitType::Type0) return m;
  }
}

int cmd_classify(const std::optional<double>& mu1, const std::optional<double>& mu2,
                 const std::optional<double>& re, const std::optional<double>& im, int random,
                 const Globals& g, std::ostream& out) {
  if (random > 0) {
    std::mt19937_64 rng(g.seed.value_or(1));
    int agree = 0;
    oj mismatches = oj::array();
    for (int i = 0; i < random; ++i) {
      const auto m = random_type0(rng);
      if (phi_index(m) == psi_index(m)) ++agree;
      else if (mismatches.size() < 10) mismatches.push_back({complex(m.mu1), complex(m.mu2)});
    }
    oj j;
    j["count"] = random;
    j["seed"] = g.seed.value_or(1);
    j["agree"] = agree;
    j["mismatches"] = mismatches;
    out << j.dump(2) << "\n";
    return agree == random ? 0 : 1;
  }
  MultiplierPair m;
  if (re && im) {
    m = {cplx(*re, *im), cplx(*re, -*im)};
  } else if (mu1 && mu2) {
    m = {*mu1, *mu2};
  } else {
    fail(ErrorKind::Schema, "classify-orbit needs --mu1/--mu2, --re/--im or --random");
  }
  out << classify_json(m).dump() << "\n";
  return 0;
}

int cmd_horseshoe(const std::string& model_name, int max_len, const std::vector<std::string>& words,
                  const Globals& g, std::ostream& out) {
  const HorseshoeModel model = make_horseshoe(horseshoe_kind_from(model_name));
  std::vector<SymbolWord> ws;
  if (!words.empty()) {
    for (const auto& w : words) ws.emplace_back(w);
  } else {
    if (max_len < 1 || max_len > 24) fail(ErrorKind::InvalidArgument, "--max-length must be in 1..24");
    ws = enumerate_periodic_words(max_len, "12");
  }
  oj j;
  j["model"] = std::string(to_string(model.kind));
  std::map<int, int> counts{{-1, 0}, {0, 0}, {1, 0}};
  int agree = 0;
  oj rows = oj::array();
  for (const auto& w : ws) {
    const int idx = suspension_index(model, w);
    const int phi = phi_index(floquet_multipliers(jacobian_product_oracle(model, w)));
    ++counts[idx];
    agree += idx == phi;
    if (!words.empty()) rows.push_back({{"word", w.str()}, {"r", w.count('2')}, {"index", idx}, {"phi", phi}});
  }
  j["words"] = ws.size();
  j["index_counts"] = {{"-1", counts[-1]}, {"0", counts[0]}, {"+1", counts[1]}};
  j["agree_with_oracle"] = agree;
  if (!words.empty()) j["orbits"] = rows;
  if (!g.out_dir.empty()) {
    auto f = open_out(g.out_dir, "horseshoe.csv");
    write_horseshoe_csv(f, model, ws);
    j["file"] = (fs::path(g.out_dir) / "horseshoe.csv").string();
  }
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_template_knot(const std::string& tmpl_name, const std::vector<std::string>& words, int max_len,
                      bool link, const Globals& g, std::ostream& out) {
  const TemplateKind t = template_kind_from(tmpl_name);
  std::vector<SymbolWord> ws;
  for (const auto& w : words) ws.emplace_back(w);
  if (ws.empty()) {
    if (max_len < 1 || max_len > 16) fail(ErrorKind::InvalidArgument, "--max-length must be in 1..16");
    for (const auto& w : enumerate_periodic_words(max_len, "LR"))
      if (w.length() >= 2) ws.push_back(w);
  }
  std::vector<KnotSummary> rows;
  oj knots = oj::array();
  for (const auto& w : ws) {
    rows.push_back(summarize_knot(t, w));
    const auto& k = rows.back();
    oj e;
    e["word"] = k.word;
    e["template"] = std::string(to_string(t));
    e["strands"] = k.braid.strands;
    e["crossings"] = k.braid.crossings();
    e["writhe"] = k.braid.writhe();
    e["braid"] = k.braid.gens;
    e["alexander"] = k.alexander.str();
    e["torus"] = k.torus ? oj::array({k.torus->first, k.torus->second}) : oj(nullptr);
    knots.push_back(e);
  }
  oj j;
  j["knots"] = knots;
  if (link) {
    if (ws.size() != 2) fail(ErrorKind::InvalidArgument, "--link needs exactly two --word values");
    j["linking_number"] = linking_number(t, ws[0], ws[1]);
  }
  if (!g.out_dir.empty()) {
    auto f = open_out(g.out_dir, "knots.csv");
    write_knot_csv(f, rows);
  }
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_graph_entropy(const std::string& path, std::ostream& out) {
  const GraphMap g = graph_map_from_json(read_json(path));
  const PaResult r = pa_criterion(g);
  oj j;
  j["spectral_radius"] = num(r.growth);
  j["entropy"] = num(r.growth > 0 ? std::log(r.growth) : 0.0);
  oj m = oj::array();
  for (int i = 0; i < r.matrix.rows(); ++i) {
    oj row = oj::array();
    for (int k = 0; k < r.matrix.cols(); ++k) row.push_back(r.matrix(i, k));
    m.push_back(row);
  }
  j["matrix"] = m;
  j["pseudo_anosov_isotopic"] = r.pseudo_anosov_isotopic;
  j["backtracking"] = r.backtracking;
  oj edges = oj::array();
  for (int e : r.all_periods_edges)
    edges.push_back(g.graph.edge_names.empty() ? oj(e + 1) : oj(g.graph.edge_names[static_cast<std::size_t>(e)]));
  j["all_periods_edges"] = edges;
  j["diagnostics"] = r.diagnostics;
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const ValidationReport r = validate_diagram(diagram_from_json(read_json(path)));
  out << to_json(r).dump(2) << "\n";
  return r.ok ? 0 : 1;
}

oj sample_json(const SplittingSample& s) {
  oj j;
  j["param"] = num(s.param);
  j["distance"] = num(s.distance);
  j["status"] = std::string(to_string(s.status));
  j["flight_time"] = num(s.flight_time);
  return j;
}

int cmd_het_scan(const RunConfig& cfg, const Globals& g, std::ostream& out) {
  const auto spec = connection_spec(cfg);
  const auto& h = *cfg.heteroclinic;
  const auto scan = scan_parameter(make_sampler(cfg.system, h.axis, spec), h.lo, h.hi, h.steps);
  oj j;
  j["axis"] = h.axis;
  j["range"] = {num(h.lo), num(h.hi)};
  j["steps"] = h.steps;
  j["plane"] = scan.front().sample.plane;
  oj samples = oj::array(), flags = oj::array();
  double prev = h.lo;
  for (const auto& sp : scan) {
    oj s = sample_json(sp.sample);
    s["flag"] = sp.flag;
    if (!sp.error.empty()) s["error"] = sp.error;
    samples.push_back(s);
    if (sp.flag) flags.push_back({num(prev), num(sp.sample.param)});
    if (sp.sample.status == SampleStatus::ok) prev = sp.sample.param;
  }
  j["sign_changes"] = flags;
  j["samples"] = samples;
  if (!g.out_dir.empty()) {
    auto f = open_out(g.out_dir, "scan.csv");
    write_scan_csv(f, scan);
  }
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_het_bisect(const RunConfig& cfg, const std::vector<double>& bracket, std::ostream& out) {
  const auto spec = connection_spec(cfg);
  const auto& h = *cfg.heteroclinic;
  const Sampler sampler = make_sampler(cfg.system, h.axis, spec);
  std::pair<double, double> br;
  if (bracket.size() == 2) br = {bracket[0], bracket[1]};
  else if (h.bracket) br = *h.bracket;
  else {
    const auto scan = scan_parameter(sampler, h.lo, h.hi, h.steps);
    std::optional<double> prev;
    bool found = false;
    for (const auto& sp : scan) {
      if (sp.flag && prev) {
        br = {*prev, sp.sample.param};
        found = true;
        break;
      }
      if (sp.sample.status == SampleStatus::ok) prev = sp.sample.param;
    }
    if (!found) fail(ErrorKind::BracketInvalid, "scan found no sign change to bisect");
  }
  const BisectResult r = bisect_connection(sampler, br.first, br.second, h.tol);
  oj j;
  j["axis"] = h.axis;
  j["estimate"] = num(r.estimate);
  j["bracket"] = {num(r.lo), num(r.hi)};
  j["endpoint_distances"] = {num(r.d_lo), num(r.d_hi)};
  j["distance"] = num(r.distance);
  j["iterations"] = r.iterations;
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_het_assemble(const std::string& path, std::ostream& out) {
  const auto in = read_json(path);
  std::map<std::string, State3> fps;
  std::vector<KnotArc> arcs;
  double tol = 1e-6;
  try {
    for (const auto& [name, p] : in.at("fixed_points").items())
      fps[name] = State3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    for (const auto& a : in.at("arcs")) {
      KnotArc arc;
      arc.source = a.at("source").get<std::string>();
      arc.target = a.at("target").get<std::string>();
      for (const auto& p : a.at("polyline"))
        arc.polyline.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
      arcs.push_back(std::move(arc));
    }
    tol = in.value("endpoint_tol", tol);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
  oj j = to_json(assemble_knot(fps, arcs, tol));
  for (auto& arc : j["arcs"])
    for (auto& p : arc["polyline"])
      for (auto& x : p) x = num(x.get<double>());
  out << j.dump(2) << "\n";
  return 0;
}

void report(std::ostream& err, std::string_view kind, const std::string& message) {
  oj j;
  j["error"] = {{"kind", std::string(kind)}, {"message", message}};
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"topological dynamics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI run configuration");
  app.add_option("--out", g.out_dir, "directory for CSV artifacts");
  app.add_option("--seed", g.seed, "seed for randomized demos");
  app.add_option("--tol", g.tol, "integrator tolerance override");
  app.add_option("--system", g.system, "rossler, lorenz or moore-spiegel with default parameters");

  auto* fixed = app.add_subcommand("fixed-points", "fixed points and parameter-space checks");
  auto* integ = app.add_subcommand("integrate", "trajectory CSV, plus section events when configured");
  auto* orbit = app.add_subcommand("find-orbit", "shoot for a periodic orbit on the section");
  std::string orbit_db;
  orbit->add_option("--orbit-db", orbit_db, "JSON array file to append the orbit to");

  auto* classify = app.add_subcommand("classify-orbit", "type, indices and continuability from multipliers");
  std::optional<double> mu1, mu2, re, im;
  int random = 0;
  classify->add_option("--mu1", mu1);
  classify->add_option("--mu2", mu2);
  classify->add_option("--re", re, "real part of a conjugate pair");
  classify->add_option("--im", im, "imaginary part of a conjugate pair");
  classify->add_option("--random", random, "check phi == psi on N random Type-0 pairs");

  auto* horse = app.add_subcommand("horseshoe-index", "suspension indices of horseshoe orbits");
  std::string model = "smale";
  int hs_len = 8;
  std::vector<std::string> hs_words;
  horse->add_option("--model", model, "smale, fake, baker or baker-reversing");
  horse->add_option("--max-length", hs_len);
  horse->add_option("--word", hs_words);

  auto* knot = app.add_subcommand("template-knot", "braid and Alexander polynomial of template orbits");
  std::string tmpl = "lorenz";
  std::vector<std::string> words;
  int knot_len = 6;
  bool link = false;
  knot->add_option("--template", tmpl, "lorenz or l01");
  knot->add_option("--word", words);
  knot->add_option("--max-length", knot_len);
  knot->add_flag("--link", link, "linking number of the two words");

  std::string path;
  auto* graph = app.add_subcommand("graph-entropy", "spectral radius of a graph map");
  graph->add_option("file", path)->required();
  auto* diag = app.add_subcommand("validate-diagram", "index bookkeeping of a bifurcation diagram");
  diag->add_option("file", path)->required();
  auto* scan = app.add_subcommand("het-scan", "splitting distance over a parameter range");
  auto* bisect = app.add_subcommand("het-bisect", "bisect a connection parameter");
  std::vector<double> bracket;
  bisect->add_option("--bracket", bracket)->expected(2);
  auto* assemble = app.add_subcommand("het-assemble", "assemble connection arcs into a knot");
  assemble->add_option("file", path)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "Usage", e.what());
    return 2;
  }

  try {
    if (fixed->parsed()) {
      out << fixed_points_json(load(g)).dump(2) << "\n";
      return 0;
    }
    if (integ->parsed()) return cmd_integrate(load(g), g, out);
    if (orbit->parsed()) return cmd_find_orbit(load(g), orbit_db, out);
    if (classify->parsed()) return cmd_classify(mu1, mu2, re, im, random, g, out);
    if (horse->parsed()) return cmd_horseshoe(model, hs_len, hs_words, g, out);
    if (knot->parsed()) return cmd_template_knot(tmpl, words, knot_len, link, g, out);
    if (graph->parsed()) return cmd_graph_entropy(path, out);
    if (diag->parsed()) return cmd_validate(path, out);
    if (scan->parsed()) return cmd_het_scan(load(g), g, out);
    if (bisect->parsed()) return cmd_het_bisect(load(g), bracket, out);
    if (assemble->parsed()) return cmd_het_assemble(path, out);
  } catch (const Error& e) {
    report(err, to_string(e.kind()), e.what());
    return e.is_input_error() ? 2 : 1;
  } catch (const std::exception& e) {
    report(err, "Internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace tdyn
