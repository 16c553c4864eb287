#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdyn/polynomial.hpp"
#include "tdyn/symbolic.hpp"

namespace tdyn {

// lorenz: two untwisted strips. l01: the R strip carries one positive half-twist.
enum class TemplateKind { lorenz, l01 };

std::string_view to_string(TemplateKind t);
TemplateKind template_kind_from(std::string_view s);

struct TemplateOrbit {
  TemplateKind tmpl;
  SymbolWord word;
  std::vector<int> positions;  // branch-line rank of the k-th shift, 0-based
  bool boundary = false;       // fixed point at the end of the branch line
};

// Strict order of two infinite periodic sequences on the branch line.
bool branch_line_less(TemplateKind t, const std::string& a, const std::string& b);

TemplateOrbit template_orbit(TemplateKind t, const SymbolWord& w);

// Artin word; +i is sigma_i (strand i over strand i+1), -i its inverse.
struct BraidWord {
  int strands = 1;
  std::vector<int> gens;
  std::vector<int> component;  // component label of the strand starting at each position

  int crossings() const { return static_cast<int>(gens.size()); }
  int writhe() const;
  std::vector<int> permutation() const;  // start position -> end position
  int closure_components() const;
};

BraidWord braid_word(TemplateKind t, const std::vector<SymbolWord>& orbits);
BraidWord braid_word(TemplateKind t, const SymbolWord& w);

// Reduced Burau: det(I - B) / (1 + t + ... + t^(n-1)), normalised.
Laurent alexander_polynomial(const BraidWord& b);

int linking_number(TemplateKind t, const SymbolWord& w1, const SymbolWord& w2);

// (t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1))
Laurent torus_knot_polynomial(int p, int q);
std::optional<std::pair<int, int>> detect_torus_knot(const Laurent& alexander, int pq_max = 100);

struct KnotSummary {
  std::string word;
  TemplateKind tmpl;
  BraidWord braid;
  Laurent alexander;
  std::optional<std::pair<int, int>> torus;
};

KnotSummary summarize_knot(TemplateKind t, const SymbolWord& w);
void write_knot_csv(std::ostream& os, const std::vector<KnotSummary>& rows);

}  // namespace tdyn
