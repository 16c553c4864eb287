#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tdyn {

struct Branch {
  std::string id;
  double t0 = 0, t1 = 0;
  int index = 0;  // -1, 0, +1
  int mult = 1;   // period multiplier relative to the base orbit
  std::optional<std::string> knot;
};

enum class NodeKind { saddle_node, period_doubling, hopf, terminal };

std::string_view to_string(NodeKind k);
NodeKind node_kind_from(std::string_view s);

struct BifNode {
  NodeKind kind = NodeKind::terminal;
  double t = 0;
  std::vector<std::string> left;   // branches ending at t
  std::vector<std::string> right;  // branches starting at t
};

struct Diagram {
  std::vector<Branch> branches;
  std::vector<BifNode> nodes;
  double t_min = 0, t_max = 1;
  // expected slice sum of the whole diagram, when the isolating
  // neighbourhood's index is known
  std::optional<int> lambda;

  const Branch& branch(const std::string& id) const;
};

struct Violation {
  std::string rule;
  std::string where;
  std::string detail;
};

// Throws MalformedDiagram when ids, incidences or endpoints do not fit together.
void check_structure(const Diagram& d);

std::vector<Violation> validate_node(const Diagram& d, const BifNode& node);

// Sum of indices of the branches alive at t; t must avoid node parameters.
int slice_sum(const Diagram& d, double t);

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

ValidationReport validate_diagram(const Diagram& d);

Diagram diagram_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Diagram& d);
nlohmann::ordered_json to_json(const ValidationReport& r);

}  // namespace tdyn
