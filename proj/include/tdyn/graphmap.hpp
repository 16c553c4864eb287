#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace tdyn {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct SpineGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // (tail, head), 0-based vertices
  std::vector<std::string> vertex_names;
  std::vector<std::string> edge_names;

  bool is_connected() const;
  // spine of an n-punctured disc: a tree on the punctures
  bool is_spine() const { return is_connected() && static_cast<int>(edges.size()) == vertices - 1; }
};

// Edge paths are signed 1-based edge indices: +e runs tail->head, -e head->tail.
struct GraphMap {
  SpineGraph graph;
  std::vector<int> vertex_image;
  std::vector<std::vector<int>> edge_paths;
};

// Throws InconsistentPath when a path is broken or misses its endpoint images.
void validate_graph_map(const GraphMap& g);

// a_ij = number of times the image of edge j runs over edge i (either direction).
IntMatrix transition_matrix(const GraphMap& g);

// Perron root of a nonnegative matrix.
double spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-10);
double spectral_radius(const IntMatrix& a, double tol = 1e-10);

struct PaResult {
  IntMatrix matrix;
  double growth = 0;
  bool pseudo_anosov_isotopic = false;
  std::vector<int> all_periods_edges;  // 0-based edges with a_ii > 1
  bool backtracking = false;
  std::vector<std::string> diagnostics;
};

PaResult pa_criterion(const GraphMap& g);

// outer(inner(.)): vertex images and unreduced concatenated edge paths
GraphMap compose(const GraphMap& outer, const GraphMap& inner);

GraphMap graph_map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GraphMap& g);

}  // namespace tdyn
