#include "fcc/constraints.hpp"

#include <algorithm>
#include <unordered_set>

#include "fcc/error.hpp"

namespace fcc {

namespace {

constexpr std::size_t kMaxTableSize = std::size_t{1} << 24;

std::size_t table_size(std::size_t domain_size, std::size_t arity) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (size > kMaxTableSize / domain_size) {
      throw InvalidArgument("constraint table exceeds " +
                            std::to_string(kMaxTableSize) + " entries");
    }
    size *= domain_size;
  }
  return size;
}

// Odometer over all tuples in table-index order (last digit fastest).
bool advance(std::vector<std::size_t>& tuple, std::size_t domain_size) {
  for (std::size_t i = tuple.size(); i-- > 0;) {
    if (++tuple[i] < domain_size) return true;
    tuple[i] = 0;
  }
  return false;
}

// For every variable of `target`, the stride of that variable in the table of
// a constraint over `scope`, or 0 when scope does not mention it.
std::vector<std::size_t> strides_within(const std::vector<VarId>& target,
                                        const std::vector<VarId>& scope,
                                        std::size_t domain_size) {
  std::vector<std::size_t> out(target.size(), 0);
  std::size_t stride = 1;
  for (std::size_t j = scope.size(); j-- > 0;) {
    auto it = std::find(target.begin(), target.end(), scope[j]);
    if (it != target.end()) out[static_cast<std::size_t>(it - target.begin())] = stride;
    stride *= domain_size;
  }
  return out;
}

std::size_t dot(const std::vector<std::size_t>& tuple,
                const std::vector<std::size_t>& strides) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) index += tuple[i] * strides[i];
  return index;
}

void require_same_system(const SoftConstraint& a, const SoftConstraint& b) {
  if (a.system() != b.system()) {
    throw InstanceMismatch("constraints belong to different constraint systems");
  }
}

std::vector<VarId> scope_union(const std::vector<VarId>& a,
                               const std::vector<VarId>& b) {
  std::vector<VarId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<VarId> scope_intersection(const std::vector<VarId>& a,
                                      std::vector<VarId> b) {
  std::sort(b.begin(), b.end());
  std::vector<VarId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

ConstraintSystem::ConstraintSystem(const CSemiring& semiring,
                                   std::vector<std::string> domain,
                                   std::vector<std::string> variables)
    : semiring_(&semiring),
      domain_(std::move(domain)),
      variables_(std::move(variables)) {
  if (domain_.empty()) throw InvalidArgument("domain must not be empty");
  std::unordered_set<std::string> seen;
  for (const auto& v : domain_) {
    if (!seen.insert(v).second) {
      throw InvalidArgument("duplicate domain value '" + v + "'");
    }
  }
  seen.clear();
  for (const auto& v : variables_) {
    if (!seen.insert(v).second) {
      throw InvalidArgument("duplicate variable '" + v + "'");
    }
  }
}

std::optional<VarId> ConstraintSystem::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i] == name) return static_cast<VarId>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> ConstraintSystem::find_value(std::string_view value) const {
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    if (domain_[i] == value) return i;
  }
  return std::nullopt;
}

SystemPtr make_system(const CSemiring& semiring, std::vector<std::string> domain,
                      std::vector<std::string> variables) {
  return std::make_shared<const ConstraintSystem>(semiring, std::move(domain),
                                                  std::move(variables));
}

SoftConstraint::SoftConstraint(SystemPtr system, std::vector<VarId> scope,
                               std::vector<Level> table)
    : system_(std::move(system)), scope_(std::move(scope)), table_(std::move(table)) {
  if (!system_) throw InvalidArgument("constraint without a system");
  if (!std::is_sorted(scope_.begin(), scope_.end()) ||
      std::adjacent_find(scope_.begin(), scope_.end()) != scope_.end()) {
    throw InvalidArgument("constraint scope must be strictly increasing");
  }
  if (table_.size() != table_size(system_->domain_size(), scope_.size())) {
    throw InvalidArgument("constraint table has " + std::to_string(table_.size()) +
                          " entries, expected |D|^" + std::to_string(scope_.size()));
  }
  for (const Level& level : table_) {
    if (!system_->semiring().contains(level)) {
      throw InvalidArgument("table entry " + to_rational_string(level) +
                            " outside the semiring carrier");
    }
  }
}

SoftConstraint SoftConstraint::constant(SystemPtr system, const Level& level) {
  return SoftConstraint(std::move(system), {}, {level});
}

SoftConstraint SoftConstraint::all_one(SystemPtr system) {
  Level one = system->semiring().one();
  return constant(std::move(system), one);
}

SoftConstraint SoftConstraint::tabulate(
    SystemPtr system, std::vector<VarId> scope,
    const std::function<Level(std::span<const std::size_t>)>& fn) {
  std::vector<VarId> sorted = scope;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("duplicate variable in constraint scope");
  }
  const std::size_t d = system->domain_size();
  // position of sorted[i] within the caller's scope order
  std::vector<std::size_t> where(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    where[i] = static_cast<std::size_t>(
        std::find(scope.begin(), scope.end(), sorted[i]) - scope.begin());
  }
  std::vector<Level> table;
  table.reserve(table_size(d, sorted.size()));
  std::vector<std::size_t> tuple(sorted.size(), 0);
  std::vector<std::size_t> caller(scope.size(), 0);
  do {
    for (std::size_t i = 0; i < sorted.size(); ++i) caller[where[i]] = tuple[i];
    table.push_back(fn(caller));
  } while (advance(tuple, d));
  return SoftConstraint(std::move(system), std::move(sorted), std::move(table));
}

const Level& SoftConstraint::at(std::span<const std::size_t> tuple) const {
  if (tuple.size() != scope_.size()) {
    throw InvalidArgument("tuple arity does not match constraint scope");
  }
  std::size_t index = 0;
  for (std::size_t v : tuple) {
    if (v >= system_->domain_size()) throw InvalidArgument("tuple value out of domain");
    index = index * system_->domain_size() + v;
  }
  return table_[index];
}

SemiringValue SoftConstraint::value() const {
  if (!scope_.empty()) {
    throw InvalidArgument("value() requires an empty-scope constraint");
  }
  return SemiringValue(semiring(), table_.front());
}

SoftConstraint SoftConstraint::rename(const std::map<VarId, VarId>& mapping) const {
  std::vector<VarId> mapped(scope_.size());
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    auto it = mapping.find(scope_[i]);
    mapped[i] = it == mapping.end() ? scope_[i] : it->second;
  }
  std::vector<VarId> target = mapped;
  std::sort(target.begin(), target.end());
  target.erase(std::unique(target.begin(), target.end()), target.end());

  // For each old position, which digit of the new tuple supplies its value.
  std::vector<std::size_t> source(scope_.size());
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    source[i] = static_cast<std::size_t>(
        std::lower_bound(target.begin(), target.end(), mapped[i]) - target.begin());
  }
  const std::size_t d = system_->domain_size();
  std::vector<Level> table;
  table.reserve(table_size(d, target.size()));
  std::vector<std::size_t> tuple(target.size(), 0);
  std::vector<std::size_t> old(scope_.size(), 0);
  do {
    for (std::size_t i = 0; i < scope_.size(); ++i) old[i] = tuple[source[i]];
    table.push_back(at(old));
  } while (advance(tuple, d));
  return SoftConstraint(system_, std::move(target), std::move(table));
}

SoftConstraint combine(const SoftConstraint& c1, const SoftConstraint& c2) {
  require_same_system(c1, c2);
  const CSemiring& s = c1.semiring();
  const std::size_t d = c1.system()->domain_size();
  std::vector<VarId> scope = scope_union(c1.scope(), c2.scope());
  auto s1 = strides_within(scope, c1.scope(), d);
  auto s2 = strides_within(scope, c2.scope(), d);
  std::vector<Level> table;
  table.reserve(table_size(d, scope.size()));
  std::vector<std::size_t> tuple(scope.size(), 0);
  do {
    table.push_back(s.times(c1.table()[dot(tuple, s1)], c2.table()[dot(tuple, s2)]));
  } while (advance(tuple, d));
  return SoftConstraint(c1.system(), std::move(scope), std::move(table));
}

SoftConstraint project(const SoftConstraint& c, std::span<const VarId> keep) {
  const CSemiring& s = c.semiring();
  const std::size_t d = c.system()->domain_size();
  std::vector<VarId> kept = scope_intersection(
      c.scope(), std::vector<VarId>(keep.begin(), keep.end()));
  if (kept.size() == c.scope().size()) return c;
  auto strides = strides_within(c.scope(), kept, d);
  std::vector<Level> table(table_size(d, kept.size()), s.zero());
  std::vector<std::size_t> tuple(c.scope().size(), 0);
  std::size_t i = 0;
  do {
    Level& slot = table[dot(tuple, strides)];
    slot = s.plus(slot, c.table()[i++]);
  } while (advance(tuple, d));
  return SoftConstraint(c.system(), std::move(kept), std::move(table));
}

SemiringValue blevel(const SoftConstraint& c) {
  return project(c, std::span<const VarId>{}).value();
}

bool leq_constraint(const SoftConstraint& c1, const SoftConstraint& c2) {
  require_same_system(c1, c2);
  if (c1.scope() != c2.scope()) {
    throw ScopeMismatch("pointwise comparison needs identical scopes");
  }
  const CSemiring& s = c1.semiring();
  for (std::size_t i = 0; i < c1.table().size(); ++i) {
    if (!s.leq(c1.table()[i], c2.table()[i])) return false;
  }
  return true;
}

namespace {

// Calls visit(info_value, bound_value) for every tuple of bound's scope, where
// info_value is info projected on the shared variables. Stops when visit
// returns false.
template <typename Visit>
bool compare_on_scope(const SoftConstraint& info, const SoftConstraint& bound,
                      Visit visit) {
  require_same_system(info, bound);
  const std::size_t d = info.system()->domain_size();
  SoftConstraint projected = project(info, bound.scope());
  auto strides = strides_within(bound.scope(), projected.scope(), d);
  std::vector<std::size_t> tuple(bound.scope().size(), 0);
  std::size_t i = 0;
  do {
    if (!visit(projected.table()[dot(tuple, strides)], bound.table()[i++])) {
      return false;
    }
  } while (advance(tuple, d));
  return true;
}

}  // namespace

bool below_on_scope(const SoftConstraint& info, const SoftConstraint& bound) {
  const CSemiring& s = info.semiring();
  return compare_on_scope(info, bound, [&](const Level& a, const Level& b) {
    return s.leq(a, b);
  });
}

bool strictly_below_on_scope(const SoftConstraint& info,
                             const SoftConstraint& bound) {
  const CSemiring& s = info.semiring();
  bool differs = false;
  bool below = compare_on_scope(info, bound, [&](const Level& a, const Level& b) {
    if (!(a == b)) differs = true;
    return s.leq(a, b);
  });
  return below && differs;
}

SoftConstraint solution(const Scsp& problem) {
  SoftConstraint acc = SoftConstraint::all_one(problem.system);
  for (const SoftConstraint& c : problem.constraints) acc = combine(acc, c);
  return project(acc, problem.interest);
}

SemiringValue blevel(const Scsp& problem) {
  SoftConstraint acc = SoftConstraint::all_one(problem.system);
  for (const SoftConstraint& c : problem.constraints) acc = combine(acc, c);
  return blevel(acc);
}

Store::Store(SystemPtr system)
    : system_(system), combination_(SoftConstraint::all_one(system)) {}

Store Store::tell(AgentId agent, const SoftConstraint& c) const {
  if (c.system() != system_) {
    throw InstanceMismatch("told constraint belongs to another constraint system");
  }
  Store next = *this;
  next.sections_[agent].push_back(c);
  next.combination_ = combine(combination_, c);
  return next;
}

SoftConstraint Store::recompute() const {
  SoftConstraint acc = SoftConstraint::all_one(system_);
  for (const auto& [agent, told] : sections_) {
    for (const SoftConstraint& c : told) acc = combine(acc, c);
  }
  return acc;
}

bool entails(const Store& store, const SoftConstraint& c) {
  return below_on_scope(store.combination(), c);
}

}  // namespace fcc
