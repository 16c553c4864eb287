#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <map>
#include <set>
#include <sstream>

#include "tdyn/error.hpp"
#include "tdyn/orbits.hpp"
#include "tdyn/symbolic.hpp"

using namespace tdyn;

namespace {

std::vector<std::string> strs(const std::vector<SymbolWord>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(w.str());
  return out;
}

// number of primitive necklaces of length n over two letters
long long necklaces(int n) {
  auto mobius = [](int k) {
    int m = 1;
    for (int p = 2; p * p <= k; ++p) {
      if (k % p) continue;
      k /= p;
      if (k % p == 0) return 0;
      m = -m;
    }
    return k > 1 ? -m : m;
  };
  long long s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += mobius(d) * (1LL << (n / d));
  return s / n;
}

const HorseshoeKind kAll[] = {HorseshoeKind::smale, HorseshoeKind::fake, HorseshoeKind::baker,
                              HorseshoeKind::baker_reversing};

}  // namespace

TEST_CASE("word canonicalisation") {
  CHECK(SymbolWord("21").str() == "12");
  CHECK(SymbolWord("RL").str() == "LR");
  CHECK(SymbolWord("2112").str() == "1122");
  CHECK(canonical_rotation("bca") == "abc");
  CHECK(is_primitive("112"));
  CHECK_FALSE(is_primitive("1212"));
  CHECK_THROWS_AS(SymbolWord("1212"), Error);
  CHECK_THROWS_AS(SymbolWord("13"), Error);
  CHECK(SymbolWord("1122").count('2') == 2);
}

TEST_CASE("periodic word enumeration") {
  CHECK(strs(enumerate_periodic_words(1)) == std::vector<std::string>{"1", "2"});
  CHECK(strs(enumerate_periodic_words(2)) == std::vector<std::string>{"1", "2", "12"});
  const auto ws = enumerate_periodic_words(12);
  std::map<std::size_t, long long> by_len;
  for (const auto& w : ws) ++by_len[w.length()];
  for (int n = 1; n <= 12; ++n) CHECK(by_len[static_cast<std::size_t>(n)] == necklaces(n));
  const auto all = strs(ws);
  std::set<std::string> uniq(all.begin(), all.end());
  CHECK(uniq.size() == ws.size());
}

TEST_CASE("horseshoe orbit points") {
  const auto smale = make_horseshoe(HorseshoeKind::smale);
  const auto one = horseshoe_orbit_point(smale, SymbolWord("1"));
  CHECK(smale.branches[0].domain.contains(one.point));

  const auto two = horseshoe_orbit_point(smale, SymbolWord("12"));
  REQUIRE(two.iterates.size() == 2);
  CHECK(smale.branches[0].domain.contains(two.iterates[0]));
  CHECK(smale.branches[1].domain.contains(two.iterates[1]));
  auto apply = [&](const Vec2& p) {
    for (const auto& b : smale.branches)
      if (b.domain.contains(p)) return Vec2(b.m * p + b.offset);
    FAIL("point left the rectangles");
    return p;
  };
  CHECK((apply(apply(two.point)) - two.point).norm() < 1e-12);

  const auto baker = make_horseshoe(HorseshoeKind::baker);
  CHECK(baker.branches[1].domain.contains(horseshoe_orbit_point(baker, SymbolWord("2")).point));
}

TEST_CASE("suspension indices") {
  const auto smale = make_horseshoe(HorseshoeKind::smale);
  CHECK(suspension_index(smale, SymbolWord("1")) == -1);
  CHECK(suspension_index(smale, SymbolWord("12")) == 0);
  CHECK(suspension_index(make_horseshoe(HorseshoeKind::fake), SymbolWord("12")) == -1);

  for (auto kind : kAll) {
    const auto model = make_horseshoe(kind);
    for (const auto& w : enumerate_periodic_words(12)) {
      const Mat2 p = jacobian_product_oracle(model, w);
      Eigen::EigenSolver<Mat2> es(p);
      const MultiplierPair m{es.eigenvalues()[0], es.eigenvalues()[1]};
      INFO(to_string(kind), " ", w.str());
      CHECK(suspension_index(model, w) == phi_index(m));
    }
  }
}

TEST_CASE("branch matrices") {
  for (const auto& b : make_horseshoe(HorseshoeKind::fake).branches) {
    Eigen::EigenSolver<Mat2> es(b.m);
    CHECK(es.eigenvalues()[0].real() > 0);
    CHECK(es.eigenvalues()[1].real() > 0);
    CHECK(es.eigenvalues()[0].imag() == 0);
  }
  for (const auto& b : make_horseshoe(HorseshoeKind::baker_reversing).branches) CHECK(b.m.determinant() < 0);
}

TEST_CASE("parity density proxy") {
  for (int n = 1; n <= 14; ++n) CHECK(even_parity_fraction(n) >= 1.0 / 3.0);
  // length 2 has the single word 12, which is odd
  for (int len = 3; len <= 14; ++len) {
    bool found = false;
    for (const auto& w : enumerate_periodic_words(len))
      if (w.length() == static_cast<std::size_t>(len) && w.count('2') % 2 == 0) found = true;
    CHECK(found);
  }
}

TEST_CASE("horseshoe csv") {
  std::ostringstream os;
  write_horseshoe_csv(os, make_horseshoe(HorseshoeKind::smale), enumerate_periodic_words(2));
  CHECK(os.str().rfind("word,r,index,eig1,eig2\n", 0) == 0);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
