#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fcc/constraints.hpp"

namespace fcc {

/// lcm(1..m). Throws InvalidArgument for m = 0 or on overflow.
std::int64_t compute_U(std::size_t m);

/// Carpool bookkeeping for one fair parallel node. The driver (the executed
/// agent) gains U(n-1)/n, every other enabled agent pays U/n.
struct CrispScoreVector {
  std::int64_t U = 1;
  std::map<AgentId, std::int64_t> entries;

  /// All-zero scores for the given agents, U = lcm(1..agents.size()).
  static CrispScoreVector initial(std::span<const AgentId> agents);

  friend bool operator==(const CrispScoreVector&, const CrispScoreVector&) = default;
};

/// Per-agent sections: the combination of everything the agent told.
struct SoftScoreVector {
  std::map<AgentId, SoftConstraint> entries;

  static SoftScoreVector initial(const SystemPtr& system,
                                 std::span<const AgentId> agents);
};

struct LedgerEntry {
  std::int64_t executed = 0;       // E
  Rational ideal{0};               // I
  std::int64_t enabled_steps = 0;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// Execution counts against the ideal fair share.
struct FairnessLedger {
  std::map<AgentId, LedgerEntry> entries;

  std::int64_t executed(AgentId agent) const;
};

enum class SoftPolicy { Min, Max };

/// Lowest score among the enabled agents, ties to the lowest id.
AgentId select_crisp(std::span<const AgentId> enabled, const CrispScoreVector& k);

CrispScoreVector update_crisp(const CrispScoreVector& k, AgentId executed,
                              std::span<const AgentId> enabled);

CrispScoreVector remove_agent(const CrispScoreVector& k, AgentId id);
SoftScoreVector remove_agent(const SoftScoreVector& k, AgentId id);

/// Sections have different scopes, so they are compared through their best
/// level of consistency. Min picks a section whose blevel no other enabled
/// section is strictly below; Max the converse. Remaining ties go to the
/// agent executed fewer times, then to the lowest id.
AgentId select_soft(std::span<const AgentId> enabled, const SoftScoreVector& k,
                    SoftPolicy policy, const FairnessLedger& ledger);

/// executed's section becomes section x told; the others are untouched.
SoftScoreVector update_soft(const SoftScoreVector& k, AgentId executed,
                            const SoftConstraint& told);

/// E of executed += 1; I of every enabled agent += 1/|enabled|.
FairnessLedger ledger_record(const FairnessLedger& ledger,
                             std::span<const AgentId> enabled, AgentId executed);

/// A score as shown in traces and reports: an integer (crisp) or a section
/// blevel (soft).
struct ScoreView {
  AgentId agent;
  std::variant<std::int64_t, SemiringValue> value;
};

std::vector<ScoreView> snapshot(const CrispScoreVector& k);
std::vector<ScoreView> snapshot(const SoftScoreVector& k);

struct AgentFairness {
  AgentId agent;
  std::int64_t executed;
  Rational ideal;
  Rational deviation;  // |E - I|
};

struct FairnessReport {
  std::vector<AgentFairness> agents;
  Rational n_bound{0};  // max deviation
  std::vector<ScoreView> final_scores;
  std::vector<std::vector<ScoreView>> score_history;
};

FairnessReport fairness_report(const FairnessLedger& ledger,
                               std::vector<ScoreView> final_scores = {},
                               std::vector<std::vector<ScoreView>> history = {});

std::string to_string(const Rational& r);
nlohmann::json to_json(const std::vector<ScoreView>& scores);
nlohmann::json to_json(const FairnessReport& report, bool include_history);

}  // namespace fcc
