#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace simdsl {

// Runtime value: 64-bit signed integer or double. Mixed arithmetic
// promotes to Real; Int overflow is a runtime error, not wraparound.
struct Value {
  std::variant<std::int64_t, double> v;

  Value() : v(std::int64_t{0}) {}
  explicit Value(std::int64_t i) : v(i) {}
  explicit Value(double d) : v(d) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  double as_real() const { return std::get<double>(v); }

  // Numeric view, Int widened to double.
  double widen() const {
    return is_int() ? static_cast<double>(as_int()) : as_real();
  }

  bool operator==(const Value&) const = default;
};

// "10" for Int, "10.0"-style shortest round-trip for Real.
std::string value_to_string(const Value& value);

}  // namespace simdsl
