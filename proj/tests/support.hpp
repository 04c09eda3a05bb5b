#pragma once

// Test-only helpers: a brute-force SCSP oracle that never calls combine or
// project, and seeded generators for constraints and programs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcc/constraints.hpp"
#include "fcc/semiring.hpp"

namespace fcc::testing {

using Assignment = std::vector<std::size_t>;

/// Value of c under a complete assignment (one domain index per system
/// variable), computed with its own index arithmetic.
inline Level lookup(const SoftConstraint& c, const Assignment& full) {
  const std::size_t d = c.system()->domain_size();
  std::size_t index = 0;
  for (VarId v : c.scope()) index = index * d + full[v];
  return c.table()[index];
}

/// Enumerates all |D|^|V| complete assignments, multiplies every constraint's
/// value and +-folds per tuple of the interest variables (sorted by id).
/// Keys are tuples over the sorted interest variables.
inline std::map<Assignment, Level> brute_force_solution(
    const SystemPtr& system, const std::vector<SoftConstraint>& constraints,
    std::vector<VarId> interest) {
  const CSemiring& s = system->semiring();
  const std::size_t d = system->domain_size();
  const std::size_t n = system->variables().size();
  std::sort(interest.begin(), interest.end());
  std::map<Assignment, Level> out;
  Assignment full(n, 0);
  auto next = [&] {
    for (std::size_t i = n; i-- > 0;) {
      if (++full[i] < d) return true;
      full[i] = 0;
    }
    return false;
  };
  do {
    Level value = s.one();
    for (const auto& c : constraints) value = s.times(value, lookup(c, full));
    Assignment key;
    for (VarId v : interest) key.push_back(full[v]);
    auto [it, inserted] = out.emplace(key, value);
    if (!inserted) it->second = s.plus(it->second, value);
  } while (next());
  return out;
}

inline Level brute_force_blevel(const SystemPtr& system,
                                const std::vector<SoftConstraint>& constraints) {
  return brute_force_solution(system, constraints, {}).begin()->second;
}

/// Fuzzy levels on a grid of twentieths, zero and one included.
inline Level random_fuzzy(std::mt19937_64& rng, std::int64_t grid = 20) {
  return Level::of(static_cast<std::int64_t>(rng() % (grid + 1)), grid);
}

inline Level random_level(const CSemiring& s, std::mt19937_64& rng) {
  switch (s.kind()) {
    case SemiringKind::Boolean:
      return Level::of(static_cast<std::int64_t>(rng() % 2));
    case SemiringKind::Fuzzy:
      return random_fuzzy(rng);
    case SemiringKind::Weighted:
      if (rng() % 8 == 0) return Level::infinity();
      return Level::of(static_cast<std::int64_t>(rng() % 40), 4);
  }
  return Level::of(0);
}

/// A constraint over a random non-empty subset of at most max_arity variables.
inline SoftConstraint random_constraint(const SystemPtr& system, std::mt19937_64& rng,
                                        std::size_t max_arity = 3) {
  std::vector<VarId> all;
  for (std::size_t i = 0; i < system->variables().size(); ++i) {
    all.push_back(static_cast<VarId>(i));
  }
  std::shuffle(all.begin(), all.end(), rng);
  std::size_t arity = 1 + rng() % std::min(max_arity, all.size());
  std::vector<VarId> scope(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(arity));
  std::sort(scope.begin(), scope.end());
  std::size_t size = 1;
  for (std::size_t i = 0; i < arity; ++i) size *= system->domain_size();
  std::vector<Level> table;
  for (std::size_t i = 0; i < size; ++i) table.push_back(random_level(system->semiring(), rng));
  return SoftConstraint(system, scope, table);
}

inline SystemPtr random_system(const CSemiring& s, std::mt19937_64& rng,
                               std::size_t max_vars = 4, std::size_t max_domain = 3) {
  std::size_t nv = 1 + rng() % max_vars;
  std::size_t nd = 1 + rng() % max_domain;
  std::vector<std::string> vars;
  std::vector<std::string> domain;
  for (std::size_t i = 0; i < nv; ++i) vars.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < nd; ++i) domain.push_back("v" + std::to_string(i));
  return make_system(s, domain, vars);
}

/// Source text of a threshold-free fuzzy program: par of up to max_agents
/// chains of tells and asks over random tables.
inline std::string random_program_text(std::mt19937_64& rng, std::size_t max_agents = 3,
                                       std::size_t max_actions = 4) {
  std::ostringstream out;
  out << "semiring fuzzy;\ndomain {lo, hi};\nvars {x, y};\n";
  const std::size_t n_constraints = 4;
  const char* scopes[] = {"x", "y", "x, y"};
  for (std::size_t i = 0; i < n_constraints; ++i) {
    std::size_t which = rng() % 3;
    out << "constraint c" << i << " on (" << scopes[which] << ") {";
    std::vector<std::string> rows;
    if (which < 2) {
      rows = {"(lo)", "(hi)"};
    } else {
      rows = {"(lo lo)", "(lo hi)", "(hi lo)", "(hi hi)"};
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      // quarters, zero included
      Level l = Level::of(static_cast<std::int64_t>(rng() % 5), 4);
      out << (r ? ", " : " ") << rows[r] << " -> " << to_rational_string(l);
    }
    out << " };\n";
  }
  std::size_t agents = 1 + rng() % max_agents;
  out << "init par(";
  for (std::size_t a = 0; a < agents; ++a) {
    if (a) out << ", ";
    std::size_t actions = 1 + rng() % max_actions;
    for (std::size_t k = 0; k < actions; ++k) {
      out << (rng() % 3 == 0 ? "ask(c" : "tell(c") << rng() % n_constraints << ") -> ";
    }
    out << "success";
  }
  out << ")\n";
  return out.str();
}

}  // namespace fcc::testing
