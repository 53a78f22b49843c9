#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mexp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown for malformed input documents and invalid user-supplied data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation is called outside its stated preconditions.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(std::int64_t p, std::int64_t q = 1) {
  if (q == 0) throw PreconditionError("rational with zero denominator");
  return Rational(BigInt(p), BigInt(q));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Canonical text form: "p/q" in lowest terms, or "p" when q = 1.
inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "<int>" or "<int>/<positive int>". Surrounding whitespace is not allowed.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] { return InputError("malformed rational \"" + std::string(text) + "\""); };
  auto parse_int = [&](std::string_view s, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) throw bad();
    for (std::size_t k = i; k < s.size(); ++k) {
      if (s[k] < '0' || s[k] > '9') throw bad();
    }
    BigInt v(std::string(s.substr(i)));
    return (s[0] == '-') ? BigInt(-v) : v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, true));
  const BigInt p = parse_int(text.substr(0, slash), true);
  const BigInt q = parse_int(text.substr(slash + 1), false);
  if (q == 0) throw InputError("rational \"" + std::string(text) + "\" has zero denominator");
  return Rational(p, q);
}

inline Rational sum(std::span<const Rational> values) {
  Rational s = 0;
  for (const auto& v : values) s += v;
  return s;
}

/// Nonnegative rationals rescaled by a common positive factor to integers:
/// values[i] * scale == weights[i] exactly.
template <class Int>
struct ScaledWeights {
  std::vector<Int> weights;
  Int total{};
  Rational scale;
};

/// Rescales to integers by the least common denominator. Returns nullopt if
/// Int = int64 cannot hold the scaled total with headroom for one product.
template <class Int>
std::optional<ScaledWeights<Int>> scale_to_integers(std::span<const Rational> values) {
  BigInt l = 1;
  for (const auto& v : values) {
    const BigInt d = denominator_of(v);
    l = boost::multiprecision::lcm(l, d);
  }
  std::vector<BigInt> big;
  big.reserve(values.size());
  BigInt total = 0;
  for (const auto& v : values) {
    big.push_back(numerator_of(v) * (l / denominator_of(v)));
    total += big.back();
  }
  ScaledWeights<Int> out;
  out.scale = Rational(l);
  if constexpr (std::is_same_v<Int, BigInt>) {
    out.weights = std::move(big);
    out.total = total;
  } else {
    // Cross-multiplied comparisons use a type twice as wide, so the operands
    // themselves only need to fit comfortably in Int.
    const BigInt limit = BigInt(std::numeric_limits<Int>::max()) / 4;
    if (boost::multiprecision::abs(total) > limit) return std::nullopt;
    for (const auto& b : big) {
      if (boost::multiprecision::abs(b) > limit) return std::nullopt;
      out.weights.push_back(b.template convert_to<Int>());
    }
    out.total = total.template convert_to<Int>();
  }
  return out;
}

}  // namespace mexp
