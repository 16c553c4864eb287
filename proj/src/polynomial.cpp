#include "tdyn/polynomial.hpp"

#include <algorithm>

#include "tdyn/error.hpp"

namespace tdyn {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::InvalidArgument, "polynomial coefficient overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::InvalidArgument, "polynomial coefficient overflow");
  return r;
}

}  // namespace

Laurent::Laurent(std::int64_t c) {
  if (c != 0) c_ = {c};
}

Laurent::Laurent(int low, std::vector<std::int64_t> coeffs) : low_(low), c_(std::move(coeffs)) { trim(); }

Laurent Laurent::monomial(std::int64_t c, int exp) { return Laurent(exp, {c}); }

void Laurent::trim() {
  std::size_t lead = 0;
  while (lead < c_.size() && c_[lead] == 0) ++lead;
  if (lead == c_.size()) {
    c_.clear();
    low_ = 0;
    return;
  }
  c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
  low_ += static_cast<int>(lead);
  while (c_.back() == 0) c_.pop_back();
}

std::int64_t Laurent::coeff(int exp) const {
  if (is_zero() || exp < low_ || exp > high()) return 0;
  return c_[static_cast<std::size_t>(exp - low_)];
}

Laurent Laurent::operator+(const Laurent& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  const int lo = std::min(low_, o.low_), hi = std::max(high(), o.high());
  std::vector<std::int64_t> r(static_cast<std::size_t>(hi - lo + 1), 0);
  for (int e = lo; e <= hi; ++e) r[static_cast<std::size_t>(e - lo)] = checked_add(coeff(e), o.coeff(e));
  return Laurent(lo, std::move(r));
}

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

Laurent Laurent::operator-(const Laurent& o) const { return *this + (-o); }

Laurent Laurent::operator*(const Laurent& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<std::int64_t> r(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j)
      r[i + j] = checked_add(r[i + j], checked_mul(c_[i], o.c_[j]));
  return Laurent(low_ + o.low_, std::move(r));
}

Laurent Laurent::divide_exact(const Laurent& o) const {
  if (o.is_zero()) fail(ErrorKind::InvalidArgument, "division by zero polynomial");
  if (is_zero()) return {};
  // long division from the top; both are trimmed so the divisor's low term is nonzero
  std::vector<std::int64_t> rem = c_;
  const std::size_t dn = o.c_.size();
  if (rem.size() < dn) fail(ErrorKind::InvalidArgument, "inexact polynomial division");
  std::vector<std::int64_t> q(rem.size() - dn + 1, 0);
  const std::int64_t lead = o.c_.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    const std::int64_t top = rem[k + dn - 1];
    if (top % lead != 0) fail(ErrorKind::InvalidArgument, "inexact polynomial division");
    q[k] = top / lead;
    for (std::size_t j = 0; j < dn; ++j) rem[k + j] = checked_add(rem[k + j], -checked_mul(q[k], o.c_[j]));
  }
  for (auto v : rem)
    if (v != 0) fail(ErrorKind::InvalidArgument, "inexact polynomial division");
  return Laurent(low_ - o.low_, std::move(q));
}

Laurent Laurent::normalized() const {
  if (is_zero()) return {};
  Laurent r(0, c_);
  if (r.c_.back() < 0) r = -r;
  return r;
}

bool Laurent::is_palindromic() const {
  for (std::size_t i = 0, j = c_.size(); i < j--; ++i)
    if (c_[i] != c_[j]) return false;
  return true;
}

std::string Laurent::str() const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const std::int64_t c = c_[i];
    if (c == 0) continue;
    const int e = low_ + static_cast<int>(i);
    const std::int64_t mag = c < 0 ? -c : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? "-" : "+";
    }
    if (mag != 1 || e == 0) out += std::to_string(mag);
    if (e != 0) {
      out += "t";
      if (e != 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

Laurent determinant(std::vector<std::vector<Laurent>> m) {
  const std::size_t n = m.size();
  if (n == 0) return Laurent(1);
  Laurent prev(1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m[p][k].is_zero()) ++p;
      if (p == n) return {};
      std::swap(m[k], m[p]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).divide_exact(prev);
      m[i][k] = Laurent();
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

}  // namespace tdyn
