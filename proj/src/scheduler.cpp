#include "fcc/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fcc/error.hpp"

namespace fcc {

namespace {

void require_enabled(std::span<const AgentId> enabled, AgentId executed) {
  if (std::find(enabled.begin(), enabled.end(), executed) == enabled.end()) {
    throw InvalidArgument("agent " + std::to_string(executed) + " is not enabled");
  }
}

void require_nonempty(std::span<const AgentId> enabled) {
  if (enabled.empty()) throw InvalidArgument("no enabled agent to select");
}

}  // namespace

std::int64_t compute_U(std::size_t m) {
  if (m == 0) throw InvalidArgument("U is undefined for zero agents");
  std::int64_t u = 1;
  for (std::int64_t i = 2; i <= static_cast<std::int64_t>(m); ++i) {
    std::int64_t g = std::gcd(u, i);
    if (u / g > std::numeric_limits<std::int64_t>::max() / i) {
      throw InvalidArgument("lcm(1.." + std::to_string(m) + ") overflows");
    }
    u = u / g * i;
  }
  return u;
}

CrispScoreVector CrispScoreVector::initial(std::span<const AgentId> agents) {
  CrispScoreVector k;
  k.U = compute_U(agents.size());
  for (AgentId a : agents) k.entries[a] = 0;
  return k;
}

SoftScoreVector SoftScoreVector::initial(const SystemPtr& system,
                                         std::span<const AgentId> agents) {
  SoftScoreVector k;
  for (AgentId a : agents) k.entries.emplace(a, SoftConstraint::all_one(system));
  return k;
}

std::int64_t FairnessLedger::executed(AgentId agent) const {
  auto it = entries.find(agent);
  return it == entries.end() ? 0 : it->second.executed;
}

AgentId select_crisp(std::span<const AgentId> enabled, const CrispScoreVector& k) {
  require_nonempty(enabled);
  std::optional<AgentId> best;
  std::int64_t best_score = 0;
  for (AgentId a : enabled) {
    auto it = k.entries.find(a);
    if (it == k.entries.end()) {
      throw InvalidArgument("agent " + std::to_string(a) + " has no score");
    }
    if (!best || it->second < best_score || (it->second == best_score && a < *best)) {
      best = a;
      best_score = it->second;
    }
  }
  return *best;
}

CrispScoreVector update_crisp(const CrispScoreVector& k, AgentId executed,
                              std::span<const AgentId> enabled) {
  require_enabled(enabled, executed);
  const auto n = static_cast<std::int64_t>(enabled.size());
  if (k.U % n != 0) {
    throw InvalidArgument("U = " + std::to_string(k.U) + " is not divisible by n = " +
                          std::to_string(n));
  }
  const std::int64_t beta = k.U / n;
  const std::int64_t alpha = beta * (n - 1);
  CrispScoreVector next = k;
  for (AgentId a : enabled) {
    auto it = next.entries.find(a);
    if (it == next.entries.end()) {
      throw InvalidArgument("agent " + std::to_string(a) + " has no score");
    }
    it->second += a == executed ? alpha : -beta;
  }
  return next;
}

CrispScoreVector remove_agent(const CrispScoreVector& k, AgentId id) {
  if (!k.entries.count(id)) throw InvalidArgument("unknown agent " + std::to_string(id));
  CrispScoreVector next = k;
  next.entries.erase(id);
  return next;
}

SoftScoreVector remove_agent(const SoftScoreVector& k, AgentId id) {
  if (!k.entries.count(id)) throw InvalidArgument("unknown agent " + std::to_string(id));
  SoftScoreVector next = k;
  next.entries.erase(id);
  return next;
}

AgentId select_soft(std::span<const AgentId> enabled, const SoftScoreVector& k,
                    SoftPolicy policy, const FairnessLedger& ledger) {
  require_nonempty(enabled);
  std::vector<std::pair<AgentId, Level>> levels;
  const CSemiring* semiring = nullptr;
  for (AgentId a : enabled) {
    auto it = k.entries.find(a);
    if (it == k.entries.end()) {
      throw InvalidArgument("agent " + std::to_string(a) + " has no section");
    }
    semiring = &it->second.semiring();
    levels.emplace_back(a, blevel(it->second).level());
  }
  // Extremal elements: nobody enabled is strictly beyond them.
  std::vector<AgentId> candidates;
  for (const auto& [a, level] : levels) {
    bool dominated = std::any_of(levels.begin(), levels.end(), [&](const auto& other) {
      return policy == SoftPolicy::Min ? semiring->less(other.second, level)
                                       : semiring->less(level, other.second);
    });
    if (!dominated) candidates.push_back(a);
  }
  return *std::min_element(candidates.begin(), candidates.end(),
                           [&](AgentId x, AgentId y) {
                             auto ex = ledger.executed(x);
                             auto ey = ledger.executed(y);
                             return ex != ey ? ex < ey : x < y;
                           });
}

SoftScoreVector update_soft(const SoftScoreVector& k, AgentId executed,
                            const SoftConstraint& told) {
  auto it = k.entries.find(executed);
  if (it == k.entries.end()) {
    throw InvalidArgument("unknown agent " + std::to_string(executed));
  }
  SoftScoreVector next = k;
  next.entries.at(executed) = combine(it->second, told);
  return next;
}

FairnessLedger ledger_record(const FairnessLedger& ledger,
                             std::span<const AgentId> enabled, AgentId executed) {
  require_enabled(enabled, executed);
  FairnessLedger next = ledger;
  const Rational share(1, static_cast<std::int64_t>(enabled.size()));
  for (AgentId a : enabled) {
    LedgerEntry& e = next.entries[a];
    e.ideal += share;
    ++e.enabled_steps;
    if (a == executed) ++e.executed;
  }
  return next;
}

std::vector<ScoreView> snapshot(const CrispScoreVector& k) {
  std::vector<ScoreView> out;
  for (const auto& [a, score] : k.entries) out.push_back({a, score});
  return out;
}

std::vector<ScoreView> snapshot(const SoftScoreVector& k) {
  std::vector<ScoreView> out;
  for (const auto& [a, section] : k.entries) out.push_back({a, blevel(section)});
  return out;
}

FairnessReport fairness_report(const FairnessLedger& ledger,
                               std::vector<ScoreView> final_scores,
                               std::vector<std::vector<ScoreView>> history) {
  FairnessReport report;
  for (const auto& [a, e] : ledger.entries) {
    Rational deviation = Rational(e.executed) - e.ideal;
    if (deviation < Rational(0)) deviation = -deviation;
    report.agents.push_back({a, e.executed, e.ideal, deviation});
    report.n_bound = std::max(report.n_bound, deviation);
  }
  report.final_scores = std::move(final_scores);
  report.score_history = std::move(history);
  return report;
}

std::string to_string(const Rational& r) { return to_rational_string(Level::of(r)); }

nlohmann::json to_json(const std::vector<ScoreView>& scores) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : scores) {
    nlohmann::json entry{{"agent", s.agent}};
    if (auto* crisp = std::get_if<std::int64_t>(&s.value)) {
      entry["score"] = *crisp;
    } else {
      entry["blevel"] = to_rational_string(std::get<SemiringValue>(s.value).level());
    }
    out.push_back(std::move(entry));
  }
  return out;
}

nlohmann::json to_json(const FairnessReport& report, bool include_history) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : report.agents) {
    agents.push_back({{"agent", a.agent},
                      {"e", a.executed},
                      {"i", to_string(a.ideal)},
                      {"deviation", to_string(a.deviation)}});
  }
  nlohmann::json out{{"agents", std::move(agents)},
                     {"n_bound", to_string(report.n_bound)},
                     {"final_scores", to_json(report.final_scores)}};
  if (include_history) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& row : report.score_history) history.push_back(to_json(row));
    out["score_history"] = std::move(history);
  }
  return out;
}

}  // namespace fcc
