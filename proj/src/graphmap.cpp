#include "tdyn/graphmap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

int edge_start(const SpineGraph& g, int signed_edge) {
  const auto& e = g.edges[static_cast<std::size_t>(std::abs(signed_edge) - 1)];
  return signed_edge > 0 ? e.first : e.second;
}

int edge_end(const SpineGraph& g, int signed_edge) {
  const auto& e = g.edges[static_cast<std::size_t>(std::abs(signed_edge) - 1)];
  return signed_edge > 0 ? e.second : e.first;
}

// strongly connected components of the support graph i -> j when a_ij > 0
std::vector<std::vector<int>> components(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  std::function<void(int)> forward = [&](int v) {
    seen[v] = true;
    for (int w = 0; w < n; ++w)
      if (a(v, w) > 0 && !seen[w]) forward(w);
    order.push_back(v);
  };
  for (int v = 0; v < n; ++v)
    if (!seen[v]) forward(v);
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  std::function<void(int)> backward = [&](int v) {
    comp[v] = static_cast<int>(out.size()) - 1;
    out.back().push_back(v);
    for (int w = 0; w < n; ++w)
      if (a(w, v) > 0 && comp[w] < 0) backward(w);
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    out.emplace_back();
    backward(*it);
  }
  return out;
}

double irreducible_radius(const Eigen::MatrixXd& block, double tol) {
  // A + I is primitive, so its Perron root strictly dominates; the
  // Collatz-Wielandt quotients bracket it from both sides.
  const Eigen::MatrixXd b = block + Eigen::MatrixXd::Identity(block.rows(), block.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(block.rows());
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd y = b * x;
    const Eigen::ArrayXd q = y.array() / x.array();
    const double lo = q.minCoeff(), hi = q.maxCoeff();
    if (hi - lo <= tol) return 0.5 * (lo + hi) - 1.0;
    x = y / y.maxCoeff();
  }
  // slow mixing: fall back to a dense eigen-solve
  Eigen::EigenSolver<Eigen::MatrixXd> es(block, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

int vertex_ref(const nlohmann::json& v, const std::vector<std::string>& names, int count) {
  if (v.is_number_integer()) {
    const int i = v.get<int>();
    if (i < 0 || i >= count) fail(ErrorKind::Schema, "vertex index out of range");
    return i;
  }
  if (v.is_string()) {
    const auto it = std::find(names.begin(), names.end(), v.get<std::string>());
    if (it == names.end()) fail(ErrorKind::Schema, "unknown vertex '" + v.get<std::string>() + "'");
    return static_cast<int>(it - names.begin());
  }
  fail(ErrorKind::Schema, "vertex reference must be an index or a name");
}

}  // namespace

bool SpineGraph::is_connected() const {
  if (vertices <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(vertices));
  for (int i = 0; i < vertices; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [u, v] : edges) parent[find(u)] = find(v);
  for (int i = 1; i < vertices; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

void validate_graph_map(const GraphMap& g) {
  const auto& gr = g.graph;
  const int ne = static_cast<int>(gr.edges.size());
  for (auto [u, v] : gr.edges)
    if (u < 0 || v < 0 || u >= gr.vertices || v >= gr.vertices)
      fail(ErrorKind::InvalidArgument, "edge endpoint out of range");
  if (!gr.is_connected()) fail(ErrorKind::InvalidArgument, "graph is not connected");
  if (static_cast<int>(g.vertex_image.size()) != gr.vertices)
    fail(ErrorKind::InvalidArgument, "one vertex image per vertex required");
  for (int v : g.vertex_image)
    if (v < 0 || v >= gr.vertices) fail(ErrorKind::InvalidArgument, "vertex image out of range");
  if (static_cast<int>(g.edge_paths.size()) != ne)
    fail(ErrorKind::InvalidArgument, "one edge path per edge required");

  for (int e = 0; e < ne; ++e) {
    const auto& path = g.edge_paths[e];
    const std::string label = "edge " + std::to_string(e + 1);
    for (int s : path)
      if (s == 0 || std::abs(s) > ne) fail(ErrorKind::InvalidArgument, label + ": bad edge index in path");
    const int from = g.vertex_image[gr.edges[e].first];
    const int to = g.vertex_image[gr.edges[e].second];
    if (path.empty()) {
      if (from != to) fail(ErrorKind::InconsistentPath, label + ": empty path between distinct vertices");
      continue;
    }
    if (edge_start(gr, path.front()) != from)
      fail(ErrorKind::InconsistentPath, label + ": path does not start at the tail image");
    for (std::size_t i = 1; i < path.size(); ++i)
      if (edge_end(gr, path[i - 1]) != edge_start(gr, path[i]))
        fail(ErrorKind::InconsistentPath, label + ": path breaks after step " + std::to_string(i));
    if (edge_end(gr, path.back()) != to)
      fail(ErrorKind::InconsistentPath, label + ": path does not end at the head image");
  }
}

IntMatrix transition_matrix(const GraphMap& g) {
  validate_graph_map(g);
  const Eigen::Index ne = static_cast<Eigen::Index>(g.graph.edges.size());
  IntMatrix m = IntMatrix::Zero(ne, ne);
  for (Eigen::Index j = 0; j < ne; ++j)
    for (int s : g.edge_paths[static_cast<std::size_t>(j)]) ++m(std::abs(s) - 1, j);
  return m;
}

double spectral_radius(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "matrix must be square");
  if (!a.allFinite() || (a.array() < 0).any())
    fail(ErrorKind::InvalidArgument, "matrix must be finite and nonnegative");
  double rho = 0;
  for (const auto& comp : components(a)) {
    if (comp.size() == 1) {
      rho = std::max(rho, a(comp[0], comp[0]));
      continue;
    }
    Eigen::MatrixXd block(comp.size(), comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j) block(i, j) = a(comp[i], comp[j]);
    rho = std::max(rho, irreducible_radius(block, tol));
  }
  return rho;
}

double spectral_radius(const IntMatrix& a, double tol) { return spectral_radius(Eigen::MatrixXd(a.cast<double>()), tol); }

PaResult pa_criterion(const GraphMap& g) {
  PaResult r;
  r.matrix = transition_matrix(g);
  r.growth = spectral_radius(r.matrix);
  r.pseudo_anosov_isotopic = r.growth > 1 + 1e-9;
  for (Eigen::Index i = 0; i < r.matrix.rows(); ++i)
    if (r.matrix(i, i) > 1) r.all_periods_edges.push_back(static_cast<int>(i));
  for (std::size_t e = 0; e < g.edge_paths.size(); ++e) {
    const auto& p = g.edge_paths[e];
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (p[i] == -p[i - 1]) {
        r.backtracking = true;
        r.diagnostics.push_back("edge " + std::to_string(e + 1) + " image backtracks at step " +
                                std::to_string(i));
      }
    }
  }
  return r;
}

GraphMap compose(const GraphMap& outer, const GraphMap& inner) {
  validate_graph_map(outer);
  validate_graph_map(inner);
  GraphMap out;
  out.graph = inner.graph;
  for (int v : inner.vertex_image) out.vertex_image.push_back(outer.vertex_image[v]);
  for (const auto& path : inner.edge_paths) {
    std::vector<int> img;
    for (int s : path) {
      const auto& sub = outer.edge_paths[static_cast<std::size_t>(std::abs(s) - 1)];
      if (s > 0) img.insert(img.end(), sub.begin(), sub.end());
      else
        for (auto it = sub.rbegin(); it != sub.rend(); ++it) img.push_back(-*it);
    }
    out.edge_paths.push_back(std::move(img));
  }
  return out;
}

GraphMap graph_map_from_json(const nlohmann::json& j) {
  try {
    GraphMap g;
    const auto& verts = j.at("vertices");
    if (verts.is_number_integer()) {
      g.graph.vertices = verts.get<int>();
    } else {
      for (const auto& v : verts) g.graph.vertex_names.push_back(v.get<std::string>());
      g.graph.vertices = static_cast<int>(g.graph.vertex_names.size());
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) fail(ErrorKind::Schema, "edge must be a pair of vertices");
      g.graph.edges.emplace_back(vertex_ref(e[0], g.graph.vertex_names, g.graph.vertices),
                                 vertex_ref(e[1], g.graph.vertex_names, g.graph.vertices));
    }
    if (j.contains("edge_names")) g.graph.edge_names = j["edge_names"].get<std::vector<std::string>>();
    for (const auto& v : j.at("vertex_images"))
      g.vertex_image.push_back(vertex_ref(v, g.graph.vertex_names, g.graph.vertices));
    g.edge_paths = j.at("edge_paths").get<std::vector<std::vector<int>>>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("graph map: ") + e.what());
  }
}

nlohmann::json to_json(const GraphMap& g) {
  nlohmann::json j;
  if (g.graph.vertex_names.empty()) j["vertices"] = g.graph.vertices;
  else j["vertices"] = g.graph.vertex_names;
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : g.graph.edges) j["edges"].push_back({u, v});
  if (!g.graph.edge_names.empty()) j["edge_names"] = g.graph.edge_names;
  j["vertex_images"] = g.vertex_image;
  j["edge_paths"] = g.edge_paths;
  return j;
}

}  // namespace tdyn
