#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tdyn {

// Integer Laurent polynomial sum_k coeff[k] t^(low + k), kept trimmed.
class Laurent {
public:
  Laurent() = default;
  Laurent(std::int64_t c);  // constant
  Laurent(int low, std::vector<std::int64_t> coeffs);
  static Laurent monomial(std::int64_t c, int exp);

  bool is_zero() const noexcept { return c_.empty(); }
  int low() const noexcept { return low_; }
  int high() const noexcept { return low_ + static_cast<int>(c_.size()) - 1; }
  std::int64_t coeff(int exp) const;
  const std::vector<std::int64_t>& coeffs() const noexcept { return c_; }

  Laurent operator+(const Laurent& o) const;
  Laurent operator-(const Laurent& o) const;
  Laurent operator*(const Laurent& o) const;
  Laurent operator-() const;
  bool operator==(const Laurent& o) const = default;

  // Exact quotient; throws if o does not divide *this.
  Laurent divide_exact(const Laurent& o) const;

  // Shift to lowest exponent 0 and make the leading coefficient positive.
  Laurent normalized() const;
  bool is_palindromic() const;

  std::string str() const;  // "1-t+t^2"

private:
  void trim();
  int low_ = 0;
  std::vector<std::int64_t> c_;
};

// Determinant by fraction-free elimination.
Laurent determinant(std::vector<std::vector<Laurent>> m);

}  // namespace tdyn
