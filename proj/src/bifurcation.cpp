#include "tdyn/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

double eps(const Diagram& d) { return 1e-12 * std::max(1.0, d.t_max - d.t_min); }

std::string join(const std::vector<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) s += (s.empty() ? "" : ",") + id;
  return s;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string node_label(const BifNode& n) {
  return std::string(to_string(n.kind)) + "@" + fmt(n.t);
}

struct Incident {
  const Branch* b;
  bool left;
};

std::vector<double> sample_points(const Diagram& d) {
  std::vector<double> ts{d.t_min, d.t_max};
  for (const auto& b : d.branches) ts.insert(ts.end(), {b.t0, b.t1});
  for (const auto& n : d.nodes) ts.push_back(n.t);
  std::sort(ts.begin(), ts.end());
  std::vector<double> mids;
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i] - ts[i - 1] > eps(d)) mids.push_back(0.5 * (ts[i] + ts[i - 1]));
  return mids;
}

}  // namespace

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::saddle_node: return "saddle-node";
    case NodeKind::period_doubling: return "period-doubling";
    case NodeKind::hopf: return "hopf";
    case NodeKind::terminal: return "terminal";
  }
  return "?";
}

NodeKind node_kind_from(std::string_view s) {
  if (s == "saddle-node") return NodeKind::saddle_node;
  if (s == "period-doubling") return NodeKind::period_doubling;
  if (s == "hopf") return NodeKind::hopf;
  if (s == "terminal") return NodeKind::terminal;
  fail(ErrorKind::Schema, "unknown node kind '" + std::string(s) + "'");
}

const Branch& Diagram::branch(const std::string& id) const {
  for (const auto& b : branches)
    if (b.id == id) return b;
  fail(ErrorKind::MalformedDiagram, "unknown branch '" + id + "'");
}

void check_structure(const Diagram& d) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::MalformedDiagram, msg); };
  if (!(d.t_min < d.t_max)) bad("empty parameter range");
  const double e = eps(d);
  std::set<std::string> ids;
  for (const auto& b : d.branches) {
    if (!ids.insert(b.id).second) bad("duplicate branch id '" + b.id + "'");
    if (!(b.t0 < b.t1)) bad("branch " + b.id + " has t0 >= t1");
    if (b.t0 < d.t_min - e || b.t1 > d.t_max + e) bad("branch " + b.id + " leaves the parameter range");
    if (b.index < -1 || b.index > 1) bad("branch " + b.id + " index must be -1, 0 or +1");
    if (b.mult < 1) bad("branch " + b.id + " needs a positive period multiplier");
  }
  std::map<std::string, int> ends, starts;
  for (const auto& n : d.nodes) {
    if (n.t < d.t_min - e || n.t > d.t_max + e) bad("node " + node_label(n) + " outside the range");
    for (const auto& id : n.left) {
      if (std::abs(d.branch(id).t1 - n.t) > e) bad("branch " + id + " does not end at " + node_label(n));
      if (++ends[id] > 1) bad("branch " + id + " ends at two nodes");
    }
    for (const auto& id : n.right) {
      if (std::abs(d.branch(id).t0 - n.t) > e) bad("branch " + id + " does not start at " + node_label(n));
      if (++starts[id] > 1) bad("branch " + id + " starts at two nodes");
    }
  }
  for (const auto& b : d.branches) {
    if (std::abs(b.t0 - d.t_min) > e && !starts.count(b.id)) bad("branch " + b.id + " starts in mid-air");
    if (std::abs(b.t1 - d.t_max) > e && !ends.count(b.id)) bad("branch " + b.id + " ends in mid-air");
  }
}

std::vector<Violation> validate_node(const Diagram& d, const BifNode& node) {
  std::vector<Violation> out;
  const std::string where = node_label(node);
  auto add = [&](std::string rule, std::string detail) {
    out.push_back({std::move(rule), where, std::move(detail)});
  };
  std::vector<Incident> inc;
  int left_sum = 0, right_sum = 0;
  for (const auto& id : node.left) {
    inc.push_back({&d.branch(id), true});
    left_sum += inc.back().b->index;
  }
  for (const auto& id : node.right) {
    inc.push_back({&d.branch(id), false});
    right_sum += inc.back().b->index;
  }
  auto conservation = [&] {
    if (left_sum != right_sum)
      add("index conservation", "left sum " + std::to_string(left_sum) + " != right sum " +
                                    std::to_string(right_sum));
  };

  switch (node.kind) {
    case NodeKind::saddle_node: {
      if (inc.size() != 2) {
        add("saddle-node arity", "expected 2 incident branches, got " + std::to_string(inc.size()));
        break;
      }
      const Branch& a = *inc[0].b;
      const Branch& b = *inc[1].b;
      if (inc[0].left != inc[1].left) add("saddle-node sides", "colliding branches lie on opposite sides");
      if (std::min(a.index, b.index) != -1 || std::max(a.index, b.index) != 1)
        add("saddle-node index pair", a.id + "/" + b.id + " indices are not {-1,+1}");
      if (a.mult != b.mult) add("saddle-node period", a.id + "/" + b.id + " differ in period");
      if (a.knot && b.knot && *a.knot != *b.knot)
        add("saddle-node knot type", a.id + "/" + b.id + " carry different knot types");
      conservation();
      break;
    }
    case NodeKind::period_doubling: {
      if (inc.size() != 3) {
        add("period-doubling arity", "expected 3 incident branches, got " + std::to_string(inc.size()));
        break;
      }
      int m = inc[0].b->mult;
      for (const auto& i : inc) m = std::min(m, i.b->mult);
      std::vector<Incident> bases, arms;
      for (const auto& i : inc) {
        if (i.b->mult == m) bases.push_back(i);
        else if (i.b->mult == 2 * m) arms.push_back(i);
        else add("period-doubling multiplier", i.b->id + " is neither the base nor its double");
      }
      const bool through = bases.size() == 2 && bases[0].left != bases[1].left;
      if (!through || arms.size() != 1) {
        add("period-doubling sides", "need one through-branch and a doubled arm on one side");
      } else {
        const bool arm_left = arms[0].left;
        for (const auto& base : bases)
          if (base.left == arm_left && base.b->index == -1)
            add("notyp2", base.b->id + " with index -1 feeds the doubling beside its arm");
      }
      conservation();
      break;
    }
    case NodeKind::hopf:
      if (inc.size() != 1) add("hopf arity", "expected 1 incident branch, got " + std::to_string(inc.size()));
      break;
    case NodeKind::terminal:
      if (inc.size() != 1)
        add("terminal arity", "expected 1 incident branch, got " + std::to_string(inc.size()));
      break;
  }
  return out;
}

int slice_sum(const Diagram& d, double t) {
  if (!(t > d.t_min && t < d.t_max)) fail(ErrorKind::InvalidArgument, "slice outside the parameter range");
  for (const auto& n : d.nodes)
    if (std::abs(n.t - t) <= eps(d)) fail(ErrorKind::SliceOnNode, "slice at a bifurcation parameter");
  int sum = 0;
  for (const auto& b : d.branches)
    if (b.t0 < t && t < b.t1) sum += b.index;
  return sum;
}

ValidationReport validate_diagram(const Diagram& d) {
  check_structure(d);
  ValidationReport r;
  for (const auto& n : d.nodes) {
    auto v = validate_node(d, n);
    r.violations.insert(r.violations.end(), v.begin(), v.end());
  }

  // components joined through saddle-node and period-doubling nodes
  std::map<std::string, std::string> parent;
  for (const auto& b : d.branches) parent[b.id] = b.id;
  auto find = [&](std::string x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::set<std::string> exempt;
  for (const auto& n : d.nodes) {
    std::vector<std::string> ids = n.left;
    ids.insert(ids.end(), n.right.begin(), n.right.end());
    if (n.kind == NodeKind::hopf || n.kind == NodeKind::terminal) {
      exempt.insert(ids.begin(), ids.end());
      continue;
    }
    for (std::size_t i = 1; i < ids.size(); ++i) parent[find(ids[i])] = find(ids[0]);
  }
  std::map<std::string, std::vector<const Branch*>> comps;
  for (const auto& b : d.branches) comps[find(b.id)].push_back(&b);
  for (const auto& id : exempt) comps.erase(find(id));

  const auto mids = sample_points(d);
  for (const auto& [root, members] : comps) {
    std::optional<int> first;
    for (double t : mids) {
      int s = 0;
      for (const Branch* b : members)
        if (b->t0 < t && t < b->t1) s += b->index;
      if (!first) first = s;
      else if (s != *first) {
        std::vector<std::string> ids;
        for (const Branch* b : members) ids.push_back(b->id);
        r.violations.push_back({"slice constancy", join(ids),
                                "slice sum changes from " + std::to_string(*first) + " to " +
                                    std::to_string(s) + " near t=" + fmt(t)});
        break;
      }
    }
  }
  if (d.lambda) {
    for (double t : mids) {
      const int s = slice_sum(d, t);
      if (s != *d.lambda) {
        r.violations.push_back({"slice lambda", "t=" + fmt(t),
                                "slice sum " + std::to_string(s) + " != " + std::to_string(*d.lambda)});
        break;
      }
    }
  }
  r.ok = r.violations.empty();
  return r;
}

Diagram diagram_from_json(const nlohmann::json& j) {
  auto id_of = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    fail(ErrorKind::Schema, "branch id must be a string or an integer");
  };
  try {
    Diagram d;
    for (const auto& b : j.at("branches")) {
      Branch br;
      br.id = id_of(b.at("id"));
      br.t0 = b.at("t0").get<double>();
      br.t1 = b.at("t1").get<double>();
      br.index = b.at("index").get<int>();
      br.mult = b.value("mult", 1);
      if (b.contains("knot") && !b["knot"].is_null()) br.knot = b["knot"].get<std::string>();
      d.branches.push_back(std::move(br));
    }
    for (const auto& n : j.at("nodes")) {
      BifNode node;
      node.kind = node_kind_from(n.at("kind").get<std::string>());
      node.t = n.at("t").get<double>();
      for (const auto& id : n.value("left", nlohmann::json::array())) node.left.push_back(id_of(id));
      for (const auto& id : n.value("right", nlohmann::json::array())) node.right.push_back(id_of(id));
      d.nodes.push_back(std::move(node));
    }
    if (j.contains("t_range")) {
      d.t_min = j["t_range"].at(0).get<double>();
      d.t_max = j["t_range"].at(1).get<double>();
    } else if (!d.branches.empty()) {
      d.t_min = d.branches.front().t0;
      d.t_max = d.branches.front().t1;
      for (const auto& b : d.branches) {
        d.t_min = std::min(d.t_min, b.t0);
        d.t_max = std::max(d.t_max, b.t1);
      }
    }
    if (j.contains("lambda")) d.lambda = j["lambda"].get<int>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("diagram: ") + e.what());
  }
}

nlohmann::json to_json(const Diagram& d) {
  nlohmann::json j;
  j["t_range"] = {d.t_min, d.t_max};
  if (d.lambda) j["lambda"] = *d.lambda;
  j["branches"] = nlohmann::json::array();
  for (const auto& b : d.branches) {
    nlohmann::json jb{{"id", b.id}, {"t0", b.t0}, {"t1", b.t1}, {"index", b.index}, {"mult", b.mult}};
    if (b.knot) jb["knot"] = *b.knot;
    j["branches"].push_back(jb);
  }
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : d.nodes)
    j["nodes"].push_back({{"kind", std::string(to_string(n.kind))}, {"t", n.t}, {"left", n.left}, {"right", n.right}});
  return j;
}

nlohmann::ordered_json to_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["ok"] = r.ok;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.violations)
    j["violations"].push_back({{"rule", v.rule}, {"where", v.where}, {"detail", v.detail}});
  return j;
}

}  // namespace tdyn
