#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tdyn/types.hpp"

namespace tdyn {

// Primitive periodic word, stored in its lexicographically minimal rotation.
// The alphabet is {1,2} or {L,R}; words are never mixed.
class SymbolWord {
public:
  explicit SymbolWord(std::string_view raw);

  const std::string& str() const noexcept { return word_; }
  std::size_t length() const noexcept { return word_.size(); }
  char operator[](std::size_t i) const { return word_[i]; }
  std::size_t count(char c) const;
  // k-th rotation of the canonical word (not canonicalised)
  std::string rotation(std::size_t k) const;

  friend bool operator==(const SymbolWord&, const SymbolWord&) = default;
  friend auto operator<=>(const SymbolWord& a, const SymbolWord& b) {
    if (a.word_.size() != b.word_.size()) return a.word_.size() <=> b.word_.size();
    return a.word_ <=> b.word_;
  }

private:
  std::string word_;
};

std::string canonical_rotation(std::string_view w);
bool is_primitive(std::string_view w);

// All primitive words of length <= n_max, ordered by length then lexicographically.
std::vector<SymbolWord> enumerate_periodic_words(int n_max, std::string_view alphabet = "12");

enum class HorseshoeKind { smale, fake, baker, baker_reversing };

std::string_view to_string(HorseshoeKind k);
HorseshoeKind horseshoe_kind_from(std::string_view s);

struct Rect {
  double x0, x1, y0, y1;
  bool contains(const Vec2& p, double tol = 1e-9) const {
    return p[0] >= x0 - tol && p[0] <= x1 + tol && p[1] >= y0 - tol && p[1] <= y1 + tol;
  }
};

// Branch i maps domain R_i affinely: x -> M_i x + offset_i.
struct HorseshoeBranch {
  Mat2 m;
  Vec2 offset;
  Rect domain;
};

struct HorseshoeModel {
  HorseshoeKind kind;
  std::array<HorseshoeBranch, 2> branches;
};

HorseshoeModel make_horseshoe(HorseshoeKind kind);

struct HorseshoeOrbit {
  Vec2 point;
  std::vector<Vec2> iterates;  // point, h(point), ... (length of the word)
};

HorseshoeOrbit horseshoe_orbit_point(const HorseshoeModel& model, const SymbolWord& w);

// M_{w[k-1]} ... M_{w[0]}
Mat2 jacobian_product_oracle(const HorseshoeModel& model, const SymbolWord& w);

// Index of the suspended orbit: smale from the parity of '2's, the other
// models constant -1.
int suspension_index(const HorseshoeModel& model, const SymbolWord& w);

// Fraction of primitive words of length <= n with an even number of '2's.
double even_parity_fraction(int n);

void write_horseshoe_csv(std::ostream& os, const HorseshoeModel& model,
                         const std::vector<SymbolWord>& words);

}  // namespace tdyn
