#include "tdyn/templates.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

struct Strand {
  int component;
  std::size_t shift;
  std::string seq;
};

void require_lr(const SymbolWord& w) {
  if (w.str().find_first_not_of("LR") != std::string::npos)
    fail(ErrorKind::InvalidArgument, "template words use the alphabet {L,R}: " + w.str());
}

// Reduced Burau image of one generator, applied on the left: only row r changes.
void apply_burau(std::vector<std::vector<Laurent>>& b, int gen) {
  const int d = static_cast<int>(b.size());
  const int r = std::abs(gen) - 1;
  const Laurent t = Laurent::monomial(1, 1), tinv = Laurent::monomial(1, -1);
  std::vector<Laurent> row(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    Laurent v;
    if (gen > 0) {
      v = -t * b[r][c];
      if (r > 0) v = v + t * b[r - 1][c];
      if (r + 1 < d) v = v + b[r + 1][c];
    } else {
      v = -tinv * b[r][c];
      if (r > 0) v = v + b[r - 1][c];
      if (r + 1 < d) v = v + tinv * b[r + 1][c];
    }
    row[static_cast<std::size_t>(c)] = v;
  }
  b[r] = std::move(row);
}

}  // namespace

std::string_view to_string(TemplateKind t) { return t == TemplateKind::lorenz ? "lorenz" : "l01"; }

TemplateKind template_kind_from(std::string_view s) {
  if (s == "lorenz") return TemplateKind::lorenz;
  if (s == "l01") return TemplateKind::l01;
  fail(ErrorKind::InvalidArgument, "unknown template '" + std::string(s) + "'");
}

bool branch_line_less(TemplateKind t, const std::string& a, const std::string& b) {
  const std::size_t len = a.size() + b.size();
  bool flipped = false;
  for (std::size_t i = 0; i < len; ++i) {
    const char ca = a[i % a.size()], cb = b[i % b.size()];
    if (ca != cb) return (ca == 'L') != flipped;
    // the twisted strip reverses order for everything that passes through it
    if (t == TemplateKind::l01 && ca == 'R') flipped = !flipped;
  }
  return false;
}

TemplateOrbit template_orbit(TemplateKind t, const SymbolWord& w) {
  require_lr(w);
  const std::size_t n = w.length();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return branch_line_less(t, w.rotation(i), w.rotation(j));
  });
  TemplateOrbit orb{t, w, std::vector<int>(n, 0), false};
  for (std::size_t r = 0; r < n; ++r) orb.positions[idx[r]] = static_cast<int>(r);
  orb.boundary = w.str() == "L" || (t == TemplateKind::lorenz && w.str() == "R");
  return orb;
}

int BraidWord::writhe() const {
  int s = 0;
  for (int g : gens) s += g > 0 ? 1 : -1;
  return s;
}

std::vector<int> BraidWord::permutation() const {
  std::vector<int> at(static_cast<std::size_t>(strands));  // position -> start position
  std::iota(at.begin(), at.end(), 0);
  for (int g : gens) std::swap(at[std::abs(g) - 1], at[std::abs(g)]);
  std::vector<int> perm(at.size());
  for (std::size_t pos = 0; pos < at.size(); ++pos) perm[at[pos]] = static_cast<int>(pos);
  return perm;
}

int BraidWord::closure_components() const {
  const auto perm = permutation();
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

BraidWord braid_word(TemplateKind t, const std::vector<SymbolWord>& orbits) {
  if (orbits.empty()) fail(ErrorKind::InvalidArgument, "no orbits given");
  std::vector<Strand> strands;
  for (std::size_t c = 0; c < orbits.size(); ++c) {
    require_lr(orbits[c]);
    for (std::size_t k = 0; k < orbits[c].length(); ++k)
      strands.push_back({static_cast<int>(c), k, orbits[c].rotation(k)});
  }
  const std::size_t n = strands.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return branch_line_less(t, strands[i].seq, strands[j].seq);
  });
  for (std::size_t r = 1; r < n; ++r)
    if (!branch_line_less(t, strands[order[r - 1]].seq, strands[order[r]].seq))
      fail(ErrorKind::InvalidArgument, "orbits share a point on the branch line");

  std::vector<int> pos(n);
  for (std::size_t r = 0; r < n; ++r) pos[order[r]] = static_cast<int>(r);
  auto target = [&](std::size_t s) {
    const auto& st = strands[s];
    const std::size_t len = orbits[static_cast<std::size_t>(st.component)].length();
    const std::size_t base = s - st.shift;
    return pos[base + (st.shift + 1) % len];
  };

  BraidWord b;
  b.strands = static_cast<int>(n);
  for (std::size_t r = 0; r < n; ++r) b.component.push_back(strands[order[r]].component);

  std::vector<std::size_t> arr = order;  // position -> strand
  const std::size_t p = static_cast<std::size_t>(
      std::count_if(strands.begin(), strands.end(), [](const Strand& s) { return s.seq[0] == 'L'; }));
  if (t == TemplateKind::l01 && n - p > 1) {
    // positive half-twist on the R block
    for (std::size_t len = n - p - 1; len >= 1; --len)
      for (std::size_t j = 0; j < len; ++j) {
        b.gens.push_back(static_cast<int>(p + j + 1));
        std::swap(arr[p + j], arr[p + j + 1]);
      }
  }
  // overlay of the two strips: L strands pass over R strands
  std::vector<int> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = target(arr[k]);
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (a[k] > a[k + 1]) {
        std::swap(a[k], a[k + 1]);
        b.gens.push_back(static_cast<int>(k + 1));
        swapped = true;
      }
    }
  }
  return b;
}

BraidWord braid_word(TemplateKind t, const SymbolWord& w) { return braid_word(t, std::vector{w}); }

Laurent alexander_polynomial(const BraidWord& b) {
  if (b.closure_components() != 1)
    fail(ErrorKind::MultiComponent, "braid closure has " + std::to_string(b.closure_components()) +
                                        " components");
  const int d = b.strands - 1;
  std::vector<std::vector<Laurent>> m(static_cast<std::size_t>(d),
                                      std::vector<Laurent>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) m[i][i] = Laurent(1);
  for (int g : b.gens) apply_burau(m, g);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] = (i == j ? Laurent(1) : Laurent()) - m[i][j];
  const Laurent det = determinant(std::move(m));
  const Laurent denom(0, std::vector<std::int64_t>(static_cast<std::size_t>(b.strands), 1));
  return det.divide_exact(denom).normalized();
}

int linking_number(TemplateKind t, const SymbolWord& w1, const SymbolWord& w2) {
  if (w1 == w2) fail(ErrorKind::InvalidArgument, "linking number needs two distinct orbits");
  const BraidWord b = braid_word(t, std::vector{w1, w2});
  std::vector<int> comp = b.component;
  int signed_crossings = 0;
  for (int g : b.gens) {
    const std::size_t k = static_cast<std::size_t>(std::abs(g) - 1);
    if (comp[k] != comp[k + 1]) signed_crossings += g > 0 ? 1 : -1;
    std::swap(comp[k], comp[k + 1]);
  }
  return signed_crossings / 2;
}

Laurent torus_knot_polynomial(int p, int q) {
  auto tk_minus_1 = [](int k) { return Laurent::monomial(1, k) - Laurent(1); };
  return (tk_minus_1(p * q) * tk_minus_1(1)).divide_exact(tk_minus_1(p) * tk_minus_1(q)).normalized();
}

std::optional<std::pair<int, int>> detect_torus_knot(const Laurent& alexander, int pq_max) {
  const Laurent target = alexander.normalized();
  std::vector<std::pair<int, int>> cands;
  for (int p = 2; p * (p + 1) <= pq_max; ++p)
    for (int q = p + 1; p * q <= pq_max; ++q)
      if (std::gcd(p, q) == 1) cands.emplace_back(p, q);
  std::sort(cands.begin(), cands.end(), [](auto a, auto b) {
    return a.first * a.second != b.first * b.second ? a.first * a.second < b.first * b.second
                                                    : a.first < b.first;
  });
  for (auto [p, q] : cands)
    if (torus_knot_polynomial(p, q) == target) return std::pair{p, q};
  return std::nullopt;
}

KnotSummary summarize_knot(TemplateKind t, const SymbolWord& w) {
  KnotSummary k{w.str(), t, braid_word(t, w), {}, {}};
  k.alexander = alexander_polynomial(k.braid);
  k.torus = detect_torus_knot(k.alexander);
  return k;
}

void write_knot_csv(std::ostream& os, const std::vector<KnotSummary>& rows) {
  os << "word,template,crossings,writhe,alexander,torus_pq\n";
  for (const auto& k : rows) {
    os << k.word << ',' << to_string(k.tmpl) << ',' << k.braid.crossings() << ','
       << k.braid.writhe() << ',' << k.alexander.str() << ',';
    if (k.torus) os << k.torus->first << ':' << k.torus->second;
    os << '\n';
  }
}

}  // namespace tdyn
