#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcc/semiring.hpp"

namespace fcc {

/// Index of a variable. Declared variables take 0..n-1 in declaration
/// order; fresh variables created at run time get larger ids. Scopes are
/// kept sorted by id, which is the canonical variable order.
using VarId = std::uint32_t;

using AgentId = std::uint32_t;

/// <S, D, V>: a semiring, a finite domain shared by all variables and the
/// declared variable names.
class ConstraintSystem {
 public:
  ConstraintSystem(const CSemiring& semiring, std::vector<std::string> domain,
                   std::vector<std::string> variables);

  const CSemiring& semiring() const { return *semiring_; }
  const std::vector<std::string>& domain() const { return domain_; }
  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t domain_size() const { return domain_.size(); }

  std::optional<VarId> find_variable(std::string_view name) const;
  std::optional<std::size_t> find_value(std::string_view value) const;

 private:
  const CSemiring* semiring_;
  std::vector<std::string> domain_;
  std::vector<std::string> variables_;
};

using SystemPtr = std::shared_ptr<const ConstraintSystem>;

SystemPtr make_system(const CSemiring& semiring,
                      std::vector<std::string> domain,
                      std::vector<std::string> variables);

/// <def, con>. The table is dense: entry index is the mixed-radix number
/// whose digits are the domain indices of the scope variables, first
/// scope variable most significant.
class SoftConstraint {
 public:
  SoftConstraint(SystemPtr system, std::vector<VarId> scope,
                 std::vector<Level> table);

  /// Empty-scope constraint holding a single level.
  static SoftConstraint constant(SystemPtr system, const Level& level);
  static SoftConstraint all_one(SystemPtr system);

  /// Tabulates fn over every tuple of scope. Tuples are domain indices in
  /// scope order; scope need not be sorted.
  static SoftConstraint tabulate(
      SystemPtr system, std::vector<VarId> scope,
      const std::function<Level(std::span<const std::size_t>)>& fn);

  const SystemPtr& system() const { return system_; }
  const CSemiring& semiring() const { return system_->semiring(); }
  const std::vector<VarId>& scope() const { return scope_; }
  const std::vector<Level>& table() const { return table_; }

  /// Value at a tuple of domain indices given in scope order.
  const Level& at(std::span<const std::size_t> tuple) const;

  /// The level of an empty-scope constraint.
  SemiringValue value() const;

  /// Renames scope variables. Several variables may be mapped to the same
  /// target, in which case the table is restricted to the diagonal.
  SoftConstraint rename(const std::map<VarId, VarId>& mapping) const;

  friend bool operator==(const SoftConstraint& a, const SoftConstraint& b) {
    return a.system_ == b.system_ && a.scope_ == b.scope_ &&
           a.table_ == b.table_;
  }

 private:
  SystemPtr system_;
  std::vector<VarId> scope_;
  std::vector<Level> table_;
};

/// c1 x c2 over the union of the scopes.
SoftConstraint combine(const SoftConstraint& c1, const SoftConstraint& c2);

/// c projected on scope(c) intersected with keep, folding eliminated
/// variables with +.
SoftConstraint project(const SoftConstraint& c, std::span<const VarId> keep);

/// Projection on the empty scope.
SemiringValue blevel(const SoftConstraint& c);

/// Pointwise <=_S; both constraints must have identical scopes.
bool leq_constraint(const SoftConstraint& c1, const SoftConstraint& c2);

/// info projected on scope(bound) is pointwise <=_S bound, where variables
/// of bound missing from info range freely. This is soft entailment of
/// bound by info.
bool below_on_scope(const SoftConstraint& info, const SoftConstraint& bound);

/// below_on_scope and differs from bound on at least one tuple of its scope.
bool strictly_below_on_scope(const SoftConstraint& info,
                             const SoftConstraint& bound);

struct Scsp {
  SystemPtr system;
  std::vector<SoftConstraint> constraints;
  std::vector<VarId> interest;
};

SoftConstraint solution(const Scsp& problem);
SemiringValue blevel(const Scsp& problem);

/// The shared store. Told constraints are kept per agent for reporting; the
/// semantics only looks at the combination of all of them.
class Store {
 public:
  explicit Store(SystemPtr system);

  Store tell(AgentId agent, const SoftConstraint& c) const;

  const SystemPtr& system() const { return system_; }
  const SoftConstraint& combination() const { return combination_; }
  const std::map<AgentId, std::vector<SoftConstraint>>& sections() const {
    return sections_;
  }
  SemiringValue blevel() const { return fcc::blevel(combination_); }

  /// Combination rebuilt from the sections, for cross-checking the cache.
  SoftConstraint recompute() const;

 private:
  SystemPtr system_;
  std::map<AgentId, std::vector<SoftConstraint>> sections_;
  SoftConstraint combination_;
};

bool entails(const Store& store, const SoftConstraint& c);

}  // namespace fcc
