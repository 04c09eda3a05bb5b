#include "fcc/scheduler.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "fcc/error.hpp"

namespace fcc {
namespace {

std::vector<AgentId> ids(std::size_t m) {
  std::vector<AgentId> out(m);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

CrispScoreVector scores(std::int64_t U, std::vector<std::int64_t> values) {
  CrispScoreVector k;
  k.U = U;
  for (std::size_t i = 0; i < values.size(); ++i) k.entries[static_cast<AgentId>(i)] = values[i];
  return k;
}

std::int64_t total(const CrispScoreVector& k) {
  std::int64_t sum = 0;
  for (const auto& [id, v] : k.entries) sum += v;
  return sum;
}

TEST(Scheduler, ComputeU) {
  EXPECT_EQ(compute_U(1), 1);
  EXPECT_EQ(compute_U(2), 2);
  EXPECT_EQ(compute_U(3), 6);
  EXPECT_EQ(compute_U(4), 12);
  EXPECT_EQ(compute_U(10), 2520);
  EXPECT_THROW(compute_U(0), InvalidArgument);
  EXPECT_THROW(compute_U(200), InvalidArgument);
}

TEST(Scheduler, InitialScores) {
  auto agents = ids(3);
  CrispScoreVector k = CrispScoreVector::initial(agents);
  EXPECT_EQ(k, scores(6, {0, 0, 0}));
}

TEST(Scheduler, SelectCrispTakesLowestThenLowestId) {
  std::vector<AgentId> all{0, 1, 2};
  EXPECT_EQ(select_crisp(all, scores(6, {4, -2, -2})), 1u);
  std::vector<AgentId> some{0, 2};
  EXPECT_EQ(select_crisp(some, scores(6, {4, -2, -2})), 2u);
  EXPECT_EQ(select_crisp(all, scores(6, {0, 0, 0})), 0u);
  EXPECT_THROW(select_crisp(std::vector<AgentId>{}, scores(6, {0, 0, 0})), InvalidArgument);
}

TEST(Scheduler, UpdateCrisp) {
  std::vector<AgentId> all{0, 1, 2};
  EXPECT_EQ(update_crisp(scores(6, {0, 0, 0}), 0, all), scores(6, {4, -2, -2}));
  std::vector<AgentId> pair{0, 1};
  EXPECT_EQ(update_crisp(scores(6, {0, 0, 0}), 0, pair), scores(6, {3, -3, 0}));
  std::vector<AgentId> alone{2};
  EXPECT_EQ(update_crisp(scores(6, {4, -2, -2}), 2, alone), scores(6, {4, -2, -2}));
}

TEST(Scheduler, RemoveAgent) {
  CrispScoreVector k = remove_agent(scores(6, {4, -2, -2}), 1);
  EXPECT_EQ(k.entries.size(), 2u);
  EXPECT_EQ(k.entries.count(1), 0u);
  EXPECT_EQ(k.U, 6);
}

class SoftScores : public ::testing::Test {
 protected:
  SystemPtr sys = make_system(fuzzy_semiring(), {"a", "b"}, {"x"});
  SoftScoreVector k = [this] {
    std::vector<AgentId> agents{0, 1};
    SoftScoreVector v = SoftScoreVector::initial(sys, agents);
    v.entries.at(0) = SoftConstraint(sys, {0}, {Level::of(4, 5), Level::of(1, 2)});
    v.entries.at(1) = SoftConstraint(sys, {0}, {Level::of(3, 10), Level::of(1, 10)});
    return v;
  }();
};

TEST_F(SoftScores, SelectByPolarity) {
  std::vector<AgentId> both{0, 1};
  FairnessLedger ledger;
  EXPECT_EQ(select_soft(both, k, SoftPolicy::Min, ledger), 1u);
  EXPECT_EQ(select_soft(both, k, SoftPolicy::Max, ledger), 0u);
}

TEST_F(SoftScores, TiesGoToLeastExecuted) {
  std::vector<AgentId> both{0, 1};
  SoftScoreVector fresh = SoftScoreVector::initial(sys, both);
  FairnessLedger ledger;
  EXPECT_EQ(select_soft(both, fresh, SoftPolicy::Min, ledger), 0u);
  ledger.entries[0].executed = 3;
  EXPECT_EQ(select_soft(both, fresh, SoftPolicy::Min, ledger), 1u);
  EXPECT_EQ(select_soft(both, fresh, SoftPolicy::Max, ledger), 1u);
}

TEST_F(SoftScores, UpdateTouchesOnlyTheExecutedSection) {
  SoftConstraint told(sys, {0}, {Level::of(1, 5), Level::of(1)});
  SoftScoreVector next = update_soft(k, 0, told);
  EXPECT_EQ(next.entries.at(0), combine(k.entries.at(0), told));
  EXPECT_EQ(next.entries.at(1), k.entries.at(1));
  EXPECT_EQ(remove_agent(next, 0).entries.count(0), 0u);
}

TEST(Scheduler, Ledger) {
  FairnessLedger ledger;
  std::vector<AgentId> all{0, 1, 2};
  ledger = ledger_record(ledger, all, 0);
  std::vector<AgentId> pair{1, 2};
  ledger = ledger_record(ledger, pair, 2);
  EXPECT_EQ(ledger.executed(0), 1);
  EXPECT_EQ(ledger.executed(1), 0);
  EXPECT_EQ(ledger.executed(2), 1);
  EXPECT_EQ(ledger.entries.at(0).ideal, Rational(1, 3));
  EXPECT_EQ(ledger.entries.at(1).ideal, Rational(5, 6));
  EXPECT_EQ(ledger.entries.at(1).enabled_steps, 2);

  FairnessReport report = fairness_report(ledger);
  ASSERT_EQ(report.agents.size(), 3u);
  EXPECT_EQ(report.agents[0].deviation, Rational(2, 3));
  EXPECT_EQ(report.agents[1].deviation, Rational(5, 6));
  EXPECT_EQ(report.agents[2].deviation, Rational(1, 6));
  EXPECT_EQ(report.n_bound, Rational(5, 6));

  nlohmann::json j = to_json(report, false);
  EXPECT_EQ(j["agents"][1]["i"], "5/6");
  EXPECT_EQ(j["n_bound"], "5/6");
  EXPECT_FALSE(j.contains("score_history"));
}

TEST(Scheduler, SnapshotJson) {
  auto j = to_json(snapshot(scores(6, {4, -2, -2})));
  EXPECT_EQ(j.dump(), R"([{"agent":0,"score":4},{"agent":1,"score":-2},{"agent":2,"score":-2}])");
}

// Independent model of the carpool rule in rationals: the driver gains
// 1 - 1/n, every other enabled agent pays 1/n.
std::map<AgentId, Rational> oracle_update(std::map<AgentId, Rational> k, AgentId driver,
                                          const std::vector<AgentId>& enabled) {
  Rational n(static_cast<std::int64_t>(enabled.size()));
  for (AgentId a : enabled) k[a] += (a == driver ? Rational(1) : Rational(0)) - Rational(1) / n;
  return k;
}

std::vector<AgentId> random_enabled(std::size_t m, std::mt19937_64& rng) {
  std::vector<AgentId> out;
  while (out.empty()) {
    for (AgentId a = 0; a < m; ++a) {
      if (rng() % 2) out.push_back(a);
    }
  }
  return out;
}

TEST(SchedulerProperties, ZeroSumAndMatchesOracle) {
  std::mt19937_64 rng(41);
  for (std::size_t m = 1; m <= 6; ++m) {
    auto agents = ids(m);
    CrispScoreVector k = CrispScoreVector::initial(agents);
    std::map<AgentId, Rational> model;
    for (AgentId a : agents) model[a] = 0;
    for (int step = 0; step < 500; ++step) {
      auto enabled = random_enabled(m, rng);
      AgentId chosen = select_crisp(enabled, k);
      k = update_crisp(k, chosen, enabled);
      model = oracle_update(model, chosen, enabled);
      ASSERT_EQ(total(k), 0);
      for (AgentId a : agents) {
        ASSERT_EQ(Rational(k.entries.at(a), k.U), model.at(a));
      }
    }
  }
}

TEST(SchedulerProperties, SelectionIgnoresScaleOfU) {
  std::mt19937_64 rng(42);
  for (std::size_t m = 2; m <= 5; ++m) {
    auto agents = ids(m);
    CrispScoreVector k = CrispScoreVector::initial(agents);
    CrispScoreVector scaled = k;
    scaled.U *= 7;
    for (int step = 0; step < 300; ++step) {
      auto enabled = random_enabled(m, rng);
      AgentId chosen = select_crisp(enabled, k);
      ASSERT_EQ(select_crisp(enabled, scaled), chosen);
      k = update_crisp(k, chosen, enabled);
      scaled = update_crisp(scaled, chosen, enabled);
    }
  }
}

TEST(SchedulerProperties, RoundRobinWhenAllEnabled) {
  for (std::size_t m : {2u, 3u, 4u}) {
    auto agents = ids(m);
    CrispScoreVector k = CrispScoreVector::initial(agents);
    for (std::size_t step = 0; step < 5 * m; ++step) {
      AgentId chosen = select_crisp(agents, k);
      ASSERT_EQ(chosen, step % m) << "m=" << m;
      k = update_crisp(k, chosen, agents);
      if ((step + 1) % m == 0) ASSERT_EQ(k, CrispScoreVector::initial(agents));
    }
  }
}

TEST(SchedulerProperties, BoundedUnfairness) {
  std::mt19937_64 rng(43);
  for (std::size_t m : {2u, 3u, 4u, 5u}) {
    auto agents = ids(m);
    CrispScoreVector k = CrispScoreVector::initial(agents);
    FairnessLedger ledger;
    for (int step = 0; step < 3000; ++step) {
      auto enabled = random_enabled(m, rng);
      AgentId chosen = select_crisp(enabled, k);
      k = update_crisp(k, chosen, enabled);
      ledger = ledger_record(ledger, enabled, chosen);
      for (const auto& [a, v] : k.entries) {
        ASSERT_LE(std::abs(v), k.U * static_cast<std::int64_t>(m));
      }
    }
    FairnessReport report = fairness_report(ledger);
    EXPECT_LE(report.n_bound, Rational(static_cast<std::int64_t>(m)));
  }
}

}  // namespace
}  // namespace fcc
