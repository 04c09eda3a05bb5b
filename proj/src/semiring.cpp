#include "fcc/semiring.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "fcc/error.hpp"

namespace fcc {

namespace {

std::optional<std::int64_t> parse_digits(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return out;
}

// Non-negative decimal ("12", "0.75") or fraction ("3/4").
std::optional<Rational> parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_digits(text.substr(0, slash));
    auto den = parse_digits(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Rational(*num, *den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 17) return std::nullopt;
    auto w = whole.empty() ? std::optional<std::int64_t>(0) : parse_digits(whole);
    auto f = parse_digits(frac);
    if (!w || !f) return std::nullopt;
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    return Rational(*w) + Rational(*f, scale);
  }
  auto n = parse_digits(text);
  if (!n) return std::nullopt;
  return Rational(*n);
}

}  // namespace

std::string to_rational_string(const Level& level) {
  if (level.infinite) return "inf";
  if (level.value.denominator() == 1) {
    return std::to_string(level.value.numerator());
  }
  return std::to_string(level.value.numerator()) + "/" +
         std::to_string(level.value.denominator());
}

CSemiring::CSemiring(SemiringKind kind) : kind_(kind) {}

std::string_view CSemiring::name() const {
  switch (kind_) {
    case SemiringKind::Boolean:
      return "boolean";
    case SemiringKind::Fuzzy:
      return "fuzzy";
    case SemiringKind::Weighted:
      return "weighted";
  }
  return "?";
}

Level CSemiring::zero() const {
  return kind_ == SemiringKind::Weighted ? Level::infinity() : Level::of(0);
}

Level CSemiring::one() const {
  return kind_ == SemiringKind::Weighted ? Level::of(0) : Level::of(1);
}

Level CSemiring::plus(const Level& a, const Level& b) const {
  switch (kind_) {
    case SemiringKind::Boolean:
    case SemiringKind::Fuzzy:
      // or / max
      return a.value < b.value ? b : a;
    case SemiringKind::Weighted:
      // min, with infinity as the largest number
      if (a.infinite) return b;
      if (b.infinite) return a;
      return a.value < b.value ? a : b;
  }
  return a;
}

Level CSemiring::times(const Level& a, const Level& b) const {
  switch (kind_) {
    case SemiringKind::Boolean:
    case SemiringKind::Fuzzy:
      // and / min
      return a.value < b.value ? a : b;
    case SemiringKind::Weighted:
      if (a.infinite || b.infinite) return Level::infinity();
      return Level::of(a.value + b.value);
  }
  return a;
}

bool CSemiring::contains(const Level& level) const {
  switch (kind_) {
    case SemiringKind::Boolean:
      return !level.infinite &&
             (level.value == Rational(0) || level.value == Rational(1));
    case SemiringKind::Fuzzy:
      return !level.infinite && level.value >= Rational(0) &&
             level.value <= Rational(1);
    case SemiringKind::Weighted:
      return level.infinite || level.value >= Rational(0);
  }
  return false;
}

std::optional<std::vector<Level>> CSemiring::finite_carrier() const {
  if (kind_ == SemiringKind::Boolean) {
    return std::vector<Level>{Level::of(0), Level::of(1)};
  }
  return std::nullopt;
}

Level CSemiring::parse_level(std::string_view text) const {
  auto fail = [&](const char* why) -> Level {
    throw InvalidArgument("invalid " + std::string(name()) + " level '" +
                          std::string(text) + "': " + why);
  };
  if (kind_ == SemiringKind::Boolean) {
    if (text == "true") return Level::of(1);
    if (text == "false") return Level::of(0);
  }
  if (kind_ == SemiringKind::Weighted && text == "inf") {
    return Level::infinity();
  }
  auto parsed = parse_rational(text);
  if (!parsed) return fail("not a level literal");
  Level level = Level::of(*parsed);
  if (!contains(level)) return fail("outside the carrier");
  return level;
}

std::string CSemiring::format(const Level& level) const {
  if (kind_ == SemiringKind::Boolean) {
    return level.value == Rational(0) ? "false" : "true";
  }
  return to_rational_string(level);
}

const CSemiring& boolean_semiring() {
  static const CSemiring instance(SemiringKind::Boolean);
  return instance;
}

const CSemiring& fuzzy_semiring() {
  static const CSemiring instance(SemiringKind::Fuzzy);
  return instance;
}

const CSemiring& weighted_semiring() {
  static const CSemiring instance(SemiringKind::Weighted);
  return instance;
}

std::vector<const CSemiring*> registered_semirings() {
  return {&boolean_semiring(), &fuzzy_semiring(), &weighted_semiring()};
}

const CSemiring* find_semiring(std::string_view name) {
  for (const CSemiring* s : registered_semirings()) {
    if (s->name() == name) return s;
  }
  return nullptr;
}

SemiringValue::SemiringValue(const CSemiring& instance, Level level)
    : instance_(&instance), level_(level) {
  if (!instance.contains(level)) {
    throw InvalidArgument(to_rational_string(level) + " is not in the " +
                          std::string(instance.name()) + " carrier");
  }
}

namespace {

const CSemiring& common_instance(const SemiringValue& a, const SemiringValue& b) {
  if (&a.instance() != &b.instance()) {
    throw InstanceMismatch("operands from semirings '" +
                           std::string(a.instance().name()) + "' and '" +
                           std::string(b.instance().name()) + "'");
  }
  return a.instance();
}

}  // namespace

SemiringValue plus(const SemiringValue& a, const SemiringValue& b) {
  const CSemiring& s = common_instance(a, b);
  return SemiringValue(s, s.plus(a.level(), b.level()));
}

SemiringValue times(const SemiringValue& a, const SemiringValue& b) {
  const CSemiring& s = common_instance(a, b);
  return SemiringValue(s, s.times(a.level(), b.level()));
}

bool leq(const SemiringValue& a, const SemiringValue& b) {
  return common_instance(a, b).leq(a.level(), b.level());
}

std::string to_string(const SemiringValue& value) {
  return value.instance().format(value.level());
}

}  // namespace fcc
