#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace fcc {

using Rational = boost::rational<std::int64_t>;

/// A carrier element. Every shipped carrier embeds into the non-negative
/// rationals extended with infinity, so one representation serves all of
/// them: booleans are 0/1, fuzzy levels are rationals in [0,1], weights are
/// non-negative rationals or infinity.
struct Level {
  Rational value{0};
  bool infinite = false;

  static Level of(Rational v) { return Level{v, false}; }
  static Level of(std::int64_t num, std::int64_t den = 1) {
    return Level{Rational(num, den), false};
  }
  static Level infinity() { return Level{Rational(0), true}; }

  friend bool operator==(const Level& a, const Level& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

/// Exact textual form: "0", "3/5", "inf".
std::string to_rational_string(const Level& level);

enum class SemiringKind { Boolean, Fuzzy, Weighted };

/// A c-semiring <A, +, x, 0, 1>. Instances are immutable singletons
/// obtained from the registry; compare them by address.
class CSemiring {
 public:
  explicit CSemiring(SemiringKind kind);

  CSemiring(const CSemiring&) = delete;
  CSemiring& operator=(const CSemiring&) = delete;

  SemiringKind kind() const { return kind_; }
  std::string_view name() const;

  Level zero() const;
  Level one() const;
  Level plus(const Level& a, const Level& b) const;
  Level times(const Level& a, const Level& b) const;

  /// a <=_S b iff a + b = b.
  bool leq(const Level& a, const Level& b) const {
    return plus(a, b) == b;
  }
  bool less(const Level& a, const Level& b) const {
    return leq(a, b) && !(a == b);
  }

  bool contains(const Level& level) const;

  /// Whole carrier when it is finite (boolean), otherwise nullopt.
  std::optional<std::vector<Level>> finite_carrier() const;

  /// Reads a level literal: "true"/"false" (boolean), decimals such as
  /// "0.75" or fractions such as "3/4", and "inf" (weighted).
  /// Throws InvalidArgument when the literal is malformed or outside the
  /// carrier.
  Level parse_level(std::string_view text) const;

  /// Inverse of parse_level.
  std::string format(const Level& level) const;

 private:
  SemiringKind kind_;
};

const CSemiring& boolean_semiring();
const CSemiring& fuzzy_semiring();
const CSemiring& weighted_semiring();

/// Registry lookup by name ("boolean", "fuzzy", "weighted").
const CSemiring* find_semiring(std::string_view name);
std::vector<const CSemiring*> registered_semirings();

/// A level tagged with the instance it belongs to. Binary operations on
/// values from different instances throw InstanceMismatch.
class SemiringValue {
 public:
  SemiringValue(const CSemiring& instance, Level level);

  const CSemiring& instance() const { return *instance_; }
  const Level& level() const { return level_; }

  friend bool operator==(const SemiringValue& a, const SemiringValue& b) {
    return a.instance_ == b.instance_ && a.level_ == b.level_;
  }

 private:
  const CSemiring* instance_;
  Level level_;
};

SemiringValue plus(const SemiringValue& a, const SemiringValue& b);
SemiringValue times(const SemiringValue& a, const SemiringValue& b);
bool leq(const SemiringValue& a, const SemiringValue& b);

std::string to_string(const SemiringValue& value);

}  // namespace fcc
