#ifndef QFDIV_EXTENDED_REAL_HPP
#define QFDIV_EXTENDED_REAL_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "qfdiv/errors.hpp"

namespace qfdiv {

/// A finite double or +inf. Every divergence lands here.
///
/// Multiplying +inf by a zero weight yields 0, the convention used when a
/// kernel overlap vanishes.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  bool is_finite() const { return std::isfinite(value_); }
  bool is_infinite() const { return std::isinf(value_) && value_ > 0; }

  /// Raw value; +inf for the infinite marker.
  constexpr double value() const { return value_; }

  /// Finite value, throws DomainError on +inf.
  double finite_value() const {
    if (!is_finite()) throw DomainError("extended real is +inf where a finite value is required");
    return value_;
  }

  /// weight * this, with 0 * inf := 0. Weight must be >= 0.
  ExtendedReal weighted(double weight) const {
    if (weight == 0.0) return ExtendedReal(0.0);
    return ExtendedReal(weight * value_);
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    return ExtendedReal(a.value_ + b.value_);
  }
  ExtendedReal& operator+=(ExtendedReal o) {
    value_ += o.value_;
    return *this;
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }
  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.value_ < b.value_; }
  friend bool operator<=(ExtendedReal a, ExtendedReal b) { return a.value_ <= b.value_; }

  std::string to_string(int significant_digits = 12) const;

  friend std::ostream& operator<<(std::ostream& os, ExtendedReal x) { return os << x.to_string(); }

 private:
  double value_ = 0.0;
};

/// Fixed-width rendering used by the CLI: 12 significant digits, trailing
/// zeros kept, "inf" for the infinite marker, negative zero folded to zero.
inline std::string format_number(double v, int significant_digits = 12) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.*g", significant_digits, v);
  return buf;
}

inline std::string ExtendedReal::to_string(int significant_digits) const {
  return format_number(value_, significant_digits);
}

}  // namespace qfdiv

#endif  // QFDIV_EXTENDED_REAL_HPP
