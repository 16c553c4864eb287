#include "tdyn/symbolic.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "tdyn/error.hpp"
#include "tdyn/orbits.hpp"

namespace tdyn {

namespace {

char branch_symbol(char c) {
  if (c == '1' || c == 'L') return 0;
  return 1;
}

Mat2 diag(double a, double b) {
  Mat2 m;
  m << a, 0, 0, b;
  return m;
}

MultiplierPair eigenpair(const Mat2& m) {
  Eigen::EigenSolver<Mat2> es(m, false);
  cplx a = es.eigenvalues()[0], b = es.eigenvalues()[1];
  if (std::abs(a) > std::abs(b)) std::swap(a, b);
  return {a, b};
}

}  // namespace

std::string canonical_rotation(std::string_view w) {
  std::string best(w);
  std::string rot(w);
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

bool is_primitive(std::string_view w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    if (w.substr(d) == w.substr(0, n - d)) return false;
  }
  return n > 0;
}

SymbolWord::SymbolWord(std::string_view raw) {
  if (raw.empty()) fail(ErrorKind::InvalidArgument, "empty word");
  const bool digits = raw.find_first_not_of("12") == std::string_view::npos;
  const bool letters = raw.find_first_not_of("LR") == std::string_view::npos;
  if (!digits && !letters)
    fail(ErrorKind::InvalidArgument, "word '" + std::string(raw) + "' is not over {1,2} or {L,R}");
  if (!is_primitive(raw))
    fail(ErrorKind::InvalidArgument, "word '" + std::string(raw) + "' is a proper power");
  word_ = canonical_rotation(raw);
}

std::size_t SymbolWord::count(char c) const {
  return static_cast<std::size_t>(std::count(word_.begin(), word_.end(), c));
}

std::string SymbolWord::rotation(std::size_t k) const {
  k %= word_.size();
  return word_.substr(k) + word_.substr(0, k);
}

std::vector<SymbolWord> enumerate_periodic_words(int n_max, std::string_view alphabet) {
  if (alphabet.size() != 2 || alphabet[0] >= alphabet[1])
    fail(ErrorKind::InvalidArgument, "alphabet must be two ordered symbols");
  std::vector<SymbolWord> out;
  if (n_max < 1) return out;
  // Duval: Lyndon words in lexicographic order
  std::vector<int> w{0};
  while (!w.empty()) {
    std::string s;
    for (int c : w) s.push_back(alphabet[c]);
    out.emplace_back(s);
    const std::size_t m = w.size();
    while (w.size() < static_cast<std::size_t>(n_max)) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == 1) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(HorseshoeKind k) {
  switch (k) {
    case HorseshoeKind::smale: return "smale";
    case HorseshoeKind::fake: return "fake";
    case HorseshoeKind::baker: return "baker";
    case HorseshoeKind::baker_reversing: return "baker-reversing";
  }
  return "?";
}

HorseshoeKind horseshoe_kind_from(std::string_view s) {
  if (s == "smale") return HorseshoeKind::smale;
  if (s == "fake") return HorseshoeKind::fake;
  if (s == "baker") return HorseshoeKind::baker;
  if (s == "baker-reversing") return HorseshoeKind::baker_reversing;
  fail(ErrorKind::InvalidArgument, "unknown horseshoe model '" + std::string(s) + "'");
}

HorseshoeModel make_horseshoe(HorseshoeKind kind) {
  const Rect low{0, 1, 0, 1.0 / 3}, high{0, 1, 2.0 / 3, 1};
  const Rect left{0, 0.5, 0, 1}, right{0.5, 1, 0, 1};
  switch (kind) {
    case HorseshoeKind::smale:
      // strips map onto the left and right vertical thirds, the second folded over
      return {kind, {{{diag(1.0 / 3, 3), Vec2(0, 0), low}, {-diag(1.0 / 3, 3), Vec2(1, 3), high}}}};
    case HorseshoeKind::fake:
      return {kind, {{{diag(1.0 / 3, 3), Vec2(0, 0), low}, {diag(1.0 / 3, 3), Vec2(2.0 / 3, -2), high}}}};
    case HorseshoeKind::baker:
      return {kind, {{{diag(2, 0.5), Vec2(0, 0), left}, {diag(2, 0.5), Vec2(-1, 0.5), right}}}};
    case HorseshoeKind::baker_reversing:
      return {kind, {{{diag(2, -0.5), Vec2(0, 0.5), left}, {diag(2, -0.5), Vec2(-1, 1), right}}}};
  }
  fail(ErrorKind::InvalidArgument, "unknown horseshoe model");
}

Mat2 jacobian_product_oracle(const HorseshoeModel& model, const SymbolWord& w) {
  Mat2 p = Mat2::Identity();
  for (char c : w.str()) p = model.branches[branch_symbol(c)].m * p;
  return p;
}

HorseshoeOrbit horseshoe_orbit_point(const HorseshoeModel& model, const SymbolWord& w) {
  Mat2 a = Mat2::Identity();
  Vec2 b = Vec2::Zero();
  for (char c : w.str()) {
    const auto& br = model.branches[branch_symbol(c)];
    a = br.m * a;
    b = br.m * b + br.offset;
  }
  const Mat2 lhs = Mat2::Identity() - a;
  if (std::abs(lhs.determinant()) < 1e-14)
    fail(ErrorKind::ItineraryEscape, "I - M is singular for word " + w.str());
  HorseshoeOrbit orb;
  orb.point = lhs.fullPivLu().solve(b);
  Vec2 p = orb.point;
  for (char c : w.str()) {
    const auto& br = model.branches[branch_symbol(c)];
    if (!br.domain.contains(p))
      fail(ErrorKind::ItineraryEscape, "orbit of " + w.str() + " leaves its rectangles");
    orb.iterates.push_back(p);
    p = br.m * p + br.offset;
  }
  if ((p - orb.point).norm() > 1e-9)
    fail(ErrorKind::ItineraryEscape, "orbit of " + w.str() + " does not close");
  return orb;
}

int suspension_index(const HorseshoeModel& model, const SymbolWord& w) {
  switch (model.kind) {
    case HorseshoeKind::smale: {
      const std::size_t r = w.count('2') + w.count('R');
      return r % 2 == 0 ? -1 : 0;
    }
    case HorseshoeKind::fake:
    case HorseshoeKind::baker:
    case HorseshoeKind::baker_reversing:
      // one expanding multiplier above +1; a flipped contraction never drops below -1
      return -1;
  }
  return 0;
}

double even_parity_fraction(int n) {
  const auto words = enumerate_periodic_words(n);
  if (words.empty()) return 0;
  std::size_t even = 0;
  for (const auto& w : words) even += w.count('2') % 2 == 0;
  return static_cast<double>(even) / static_cast<double>(words.size());
}

void write_horseshoe_csv(std::ostream& os, const HorseshoeModel& model,
                         const std::vector<SymbolWord>& words) {
  os << "word,r,index,eig1,eig2\n";
  char buf[160];
  for (const auto& w : words) {
    const auto ev = eigenpair(jacobian_product_oracle(model, w));
    std::snprintf(buf, sizeof buf, "%s,%zu,%d,%.12g,%.12g\n", w.str().c_str(),
                  w.count('2') + w.count('R'), suspension_index(model, w), ev.mu1.real(),
                  ev.mu2.real());
    os << buf;
  }
}

}  // namespace tdyn
