#include "tdyn/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"system", {"name"}},
      {"rossler", {"a", "b", "c"}},
      {"lorenz", {"sigma", "rho", "beta"}},
      {"moore-spiegel", {"tau", "rho"}},
      {"integrate", {"t0", "t1", "x0", "tol", "bound"}},
      {"section", {"point", "normal", "e1", "orientation", "clip", "radius"}},
      {"orbit", {"seed", "period", "tol", "t_max", "returns"}},
      {"heteroclinic",
       {"source", "target", "branch", "axis", "range", "steps", "radius", "capture", "t_max", "tol",
        "bracket"}},
  };
  return s;
}

bool is_system_section(const std::string& s) {
  return s == "rossler" || s == "lorenz" || s == "moore-spiegel";
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Line-level checks, so every error can point at its line.
std::vector<std::string> scan_lines(const std::string& text) {
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line, section, system;
  std::map<std::string, int> system_lines;
  int no = 0;
  auto err = [&](int n, const std::string& msg) { errors.push_back("line " + std::to_string(n) + ": " + msg); };
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        err(no, "unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) err(no, "unknown section [" + section + "]");
      if (is_system_section(section)) system_lines[section] = no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err(no, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (section.empty()) {
      err(no, "key '" + key + "' outside any section");
      continue;
    }
    const auto it = schema().find(section);
    if (it == schema().end()) continue;
    if (!it->second.count(key)) err(no, "unknown key '" + key + "' in [" + section + "]");
    if (section == "system" && key == "name") system = trim(line.substr(eq + 1));
  }
  if (!system.empty() && !is_system_section(system)) errors.push_back("unknown system '" + system + "'");
  for (const auto& [sec, n] : system_lines)
    if (sec != (system.empty() ? std::string("lorenz") : system))
      err(n, "parameters for [" + sec + "] do not belong to the selected system");
  return errors;
}

double to_double(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    fail(ErrorKind::Schema, what + ": '" + raw + "' is not a number");
  return v;
}

std::vector<double> to_list(const std::string& raw, const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) out.push_back(to_double(item, what));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> to_vec(const std::string& raw, const std::string& what) {
  const auto v = to_list(raw, what);
  if (static_cast<int>(v.size()) != N)
    fail(ErrorKind::Schema, what + " needs " + std::to_string(N) + " comma-separated numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

int to_int(const std::string& raw, const std::string& what) {
  const double v = to_double(raw, what);
  if (v != static_cast<int>(v)) fail(ErrorKind::Schema, what + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  const auto errors = scan_lines(text);
  if (!errors.empty()) {
    std::string msg = origin + ":";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(ErrorKind::Schema, msg);
  }
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Schema, origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  cfg.path = origin;
  const std::string name = tree.get("system.name", std::string("lorenz"));
  if (name == "rossler") cfg.system = FlowSystem(RosslerParams{});
  else if (name == "moore-spiegel") cfg.system = FlowSystem(MooreSpiegelParams{});
  if (auto params = tree.get_child_optional(name))
    for (const auto& [key, node] : *params)
      cfg.system = cfg.system.with(key, to_double(node.data(), name + "." + key));

  if (auto s = tree.get_child_optional("integrate")) {
    auto& in = cfg.integrate;
    for (const auto& [key, node] : *s) {
      const std::string what = "integrate." + key;
      const std::string& v = node.data();
      if (key == "t0") in.t0 = to_double(v, what);
      else if (key == "t1") in.t1 = to_double(v, what);
      else if (key == "x0") in.x0 = to_vec<3>(v, what);
      else if (key == "tol") in.tol = to_double(v, what);
      else if (key == "bound") in.bound = to_double(v, what);
    }
    if (!(in.tol > 0)) fail(ErrorKind::Schema, "integrate.tol must be positive");
  }

  if (auto s = tree.get_child_optional("section")) {
    SectionSpec sec;
    bool has_point = false, has_normal = false;
    for (const auto& [key, node] : *s) {
      const std::string what = "section." + key;
      const std::string& v = node.data();
      if (key == "point") sec.point = to_vec<3>(v, what), has_point = true;
      else if (key == "normal") sec.normal = to_vec<3>(v, what), has_normal = true;
      else if (key == "e1") sec.e1 = to_vec<3>(v, what);
      else if (key == "radius") sec.radius = to_double(v, what);
      else if (key == "clip") {
        const auto c = to_vec<3>(v, what);
        sec.clip = HalfPlane{c[0], c[1], c[2]};
      } else if (key == "orientation") {
        const std::string o = trim(v);
        if (o == "positive") sec.orientation = Orientation::positive;
        else if (o == "negative") sec.orientation = Orientation::negative;
        else if (o == "both") sec.orientation = Orientation::both;
        else fail(ErrorKind::Schema, what + " must be positive, negative or both");
      }
    }
    if (!has_point || !has_normal) fail(ErrorKind::Schema, "[section] needs point and normal");
    cfg.section = sec;
  }

  if (auto s = tree.get_child_optional("orbit")) {
    auto& o = cfg.orbit;
    for (const auto& [key, node] : *s) {
      const std::string what = "orbit." + key;
      const std::string& v = node.data();
      if (key == "seed") o.seed = to_vec<2>(v, what);
      else if (key == "period") o.period = to_int(v, what);
      else if (key == "tol") o.tol = to_double(v, what);
      else if (key == "t_max") o.t_max = to_double(v, what);
      else if (key == "returns") o.returns = to_int(v, what);
    }
    if (o.period < 1) fail(ErrorKind::Schema, "orbit.period must be positive");
  }

  if (auto s = tree.get_child_optional("heteroclinic")) {
    HeteroclinicSpec h;
    for (const auto& [key, node] : *s) {
      const std::string what = "heteroclinic." + key;
      const std::string& v = node.data();
      if (key == "source") h.source = trim(v);
      else if (key == "target") h.target = trim(v);
      else if (key == "axis") h.axis = trim(v);
      else if (key == "branch") h.branch = to_int(v, what);
      else if (key == "steps") h.steps = to_int(v, what);
      else if (key == "radius") h.radius = to_double(v, what);
      else if (key == "capture") h.capture = to_double(v, what);
      else if (key == "t_max") h.t_max = to_double(v, what);
      else if (key == "tol") h.tol = to_double(v, what);
      else if (key == "range") {
        const auto r = to_vec<2>(v, what);
        h.lo = r[0];
        h.hi = r[1];
      } else if (key == "bracket") {
        const auto r = to_vec<2>(v, what);
        h.bracket = std::pair{r[0], r[1]};
      }
    }
    if (h.source.empty() || h.target.empty()) fail(ErrorKind::Schema, "[heteroclinic] needs source and target");
    if (h.branch != 1 && h.branch != -1) fail(ErrorKind::Schema, "heteroclinic.branch must be 1 or -1");
    if (h.steps < 2) fail(ErrorKind::Schema, "heteroclinic.steps must be at least 2");
    cfg.heteroclinic = h;
  }
  return cfg;
}

Section make_section(const RunConfig& cfg) {
  if (!cfg.section) return default_section(cfg.system);
  const auto& s = *cfg.section;
  Section sec = s.e1 ? Section(s.point, s.normal, *s.e1, s.orientation) : Section(s.point, s.normal, s.orientation);
  sec.clip = s.clip;
  sec.radius = s.radius;
  sec.symbol = default_section(cfg.system).symbol;
  return sec;
}

IntegrateOptions integrate_options(const RunConfig& cfg) {
  IntegrateOptions o;
  o.tol = cfg.integrate.tol;
  o.bound = cfg.integrate.bound;
  return o;
}

ConnectionSpec connection_spec(const RunConfig& cfg) {
  if (!cfg.heteroclinic) fail(ErrorKind::Schema, "config has no [heteroclinic] section");
  const auto& h = *cfg.heteroclinic;
  ConnectionSpec c;
  c.source = h.source;
  c.target = h.target;
  c.branch = h.branch;
  c.radius = h.radius;
  if (h.capture) c.capture = *h.capture;
  c.ret.t_max = h.t_max;
  c.ret.integ = integrate_options(cfg);
  return c;
}

}  // namespace tdyn
