#include "fcc/constraints.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fcc/error.hpp"
#include "support.hpp"

namespace fcc {
namespace {

Level q(std::int64_t num, std::int64_t den = 1) { return Level::of(num, den); }

class FuzzyXY : public ::testing::Test {
 protected:
  SystemPtr sys = make_system(fuzzy_semiring(), {"a", "b"}, {"x", "y"});
  // x: a -> 0.8, b -> 0.5
  SoftConstraint c1{sys, {0}, {q(4, 5), q(1, 2)}};
  // (x,y): aa -> 1, ab -> 0.4, ba -> 0.6, bb -> 1
  SoftConstraint c2{sys, {0, 1}, {q(1), q(2, 5), q(3, 5), q(1)}};
};

TEST_F(FuzzyXY, CombineMatchesEnumeration) {
  SoftConstraint c = combine(c1, c2);
  EXPECT_EQ(c.scope(), (std::vector<VarId>{0, 1}));
  // frozen from brute_force_solution over {x,y}
  EXPECT_EQ(c.table(), (std::vector<Level>{q(4, 5), q(2, 5), q(1, 2), q(1, 2)}));
  auto oracle = testing::brute_force_solution(sys, {c1, c2}, {0, 1});
  std::size_t i = 0;
  for (const auto& [tuple, level] : oracle) EXPECT_EQ(c.table()[i++], level);
}

TEST_F(FuzzyXY, CombineWithUnitIsIdentity) {
  EXPECT_EQ(combine(c2, SoftConstraint::all_one(sys)), c2);
  EXPECT_EQ(combine(SoftConstraint::all_one(sys), c1), c1);
}

TEST_F(FuzzyXY, ProjectFoldsWithMax) {
  SoftConstraint c = combine(c1, c2);
  std::vector<VarId> keep{0};
  SoftConstraint p = project(c, keep);
  EXPECT_EQ(p.scope(), (std::vector<VarId>{0}));
  EXPECT_EQ(p.table(), (std::vector<Level>{q(4, 5), q(1, 2)}));
}

TEST_F(FuzzyXY, ProjectOnOwnScopeIsIdentity) {
  EXPECT_EQ(project(c2, c2.scope()), c2);
  // variables outside the scope are ignored
  std::vector<VarId> wider{0, 1, 7};
  EXPECT_EQ(project(c1, wider), c1);
}

TEST_F(FuzzyXY, ProjectOnEmptyScopeIsSumOfEntries) {
  SoftConstraint p = project(c2, std::vector<VarId>{});
  EXPECT_TRUE(p.scope().empty());
  EXPECT_EQ(p.value().level(), q(1));
  EXPECT_EQ(blevel(c1).level(), q(4, 5));
}

TEST_F(FuzzyXY, SolutionAndBlevel) {
  Scsp single{sys, {c2}, {0, 1}};
  EXPECT_EQ(solution(single), c2);

  Scsp two{sys, {c1, c2}, {0}};
  SoftConstraint sol = solution(two);
  auto oracle = testing::brute_force_solution(sys, {c1, c2}, {0});
  ASSERT_EQ(sol.table().size(), oracle.size());
  std::size_t i = 0;
  for (const auto& [tuple, level] : oracle) EXPECT_EQ(sol.table()[i++], level);

  // max over assignments of min(c1, c2) = 0.8
  EXPECT_EQ(blevel(two).level(), q(4, 5));
  EXPECT_EQ(blevel(two).level(), testing::brute_force_blevel(sys, {c1, c2}));
}

TEST_F(FuzzyXY, BlevelEdgeCases) {
  EXPECT_EQ(blevel(Scsp{sys, {}, {}}).level(), q(1));
  SoftConstraint zeros{sys, {1}, {q(0), q(0)}};
  EXPECT_EQ(blevel(Scsp{sys, {c1, c2, zeros}, {}}).level(), q(0));
}

TEST(Constraints, BooleanCombineIsConjunction) {
  auto sys = make_system(boolean_semiring(), {"a", "b"}, {"x", "y"});
  SoftConstraint neq(sys, {0, 1}, {q(0), q(1), q(1), q(0)});
  SoftConstraint x_is_a(sys, {0}, {q(1), q(0)});
  SoftConstraint c = combine(neq, x_is_a);
  auto oracle = testing::brute_force_solution(sys, {neq, x_is_a}, {0, 1});
  std::size_t i = 0;
  for (const auto& [tuple, level] : oracle) EXPECT_EQ(c.table()[i++], level);
  EXPECT_EQ(c.table(), (std::vector<Level>{q(0), q(1), q(0), q(0)}));
  // x != y over {a,b} as an SCSP solution
  EXPECT_EQ(solution(Scsp{sys, {neq}, {0, 1}}).table(),
            (std::vector<Level>{q(0), q(1), q(1), q(0)}));
}

TEST_F(FuzzyXY, PointwiseOrder) {
  SoftConstraint lo{sys, {0}, {q(3, 10), q(1, 2)}};
  SoftConstraint hi{sys, {0}, {q(2, 5), q(1, 2)}};
  SoftConstraint zeros{sys, {0}, {q(0), q(0)}};
  EXPECT_TRUE(leq_constraint(lo, lo));
  EXPECT_TRUE(leq_constraint(lo, hi));
  EXPECT_FALSE(leq_constraint(hi, lo));
  EXPECT_TRUE(leq_constraint(zeros, hi));
  EXPECT_THROW(leq_constraint(lo, c2), ScopeMismatch);
}

TEST_F(FuzzyXY, Entailment) {
  Store empty(sys);
  EXPECT_TRUE(entails(empty, SoftConstraint::all_one(sys)));
  EXPECT_FALSE(entails(empty, c1));
  Store with_c1 = empty.tell(0, c1);
  EXPECT_TRUE(entails(with_c1, c1));
  EXPECT_TRUE(entails(with_c1.tell(1, c2), c1));
  // on y the store only knows its overall level 0.8
  SoftConstraint y_needs{sys, {1}, {q(7, 10), q(1)}};
  EXPECT_FALSE(entails(with_c1, y_needs));
  SoftConstraint y_loose{sys, {1}, {q(4, 5), q(4, 5)}};
  EXPECT_TRUE(entails(with_c1, y_loose));
}

TEST_F(FuzzyXY, StoreTell) {
  Store empty(sys);
  Store s1 = empty.tell(0, c1);
  EXPECT_EQ(s1.combination(), c1);
  EXPECT_EQ(empty.combination(), SoftConstraint::all_one(sys));  // value semantics
  Store s2 = s1.tell(1, c2);
  EXPECT_EQ(s2.combination(), combine(c1, c2));
  EXPECT_EQ(s2.recompute(), s2.combination());
  EXPECT_EQ(s2.sections().at(0), std::vector<SoftConstraint>{c1});
  EXPECT_EQ(s2.sections().at(1), std::vector<SoftConstraint>{c2});
  EXPECT_EQ(s2.tell(2, SoftConstraint::all_one(sys)).combination(), s2.combination());
}

TEST_F(FuzzyXY, StoreBlevel) {
  Store empty(sys);
  EXPECT_EQ(empty.blevel().level(), q(1));
  EXPECT_EQ(empty.tell(0, c1).tell(0, c2).blevel().level(),
            testing::brute_force_blevel(sys, {c1, c2}));
}

TEST(Constraints, InconsistentBooleanStore) {
  auto sys = make_system(boolean_semiring(), {"a", "b"}, {"x"});
  SoftConstraint is_a(sys, {0}, {q(1), q(0)});
  SoftConstraint is_b(sys, {0}, {q(0), q(1)});
  EXPECT_EQ(Store(sys).tell(0, is_a).tell(1, is_b).blevel().level(), q(0));
}

TEST(Constraints, ConstructionChecks) {
  auto sys = make_system(fuzzy_semiring(), {"a", "b"}, {"x", "y"});
  EXPECT_THROW(SoftConstraint(sys, {0}, {q(1)}), InvalidArgument);
  EXPECT_THROW(SoftConstraint(sys, {1, 0}, {q(1), q(1), q(1), q(1)}), InvalidArgument);
  EXPECT_THROW(SoftConstraint(sys, {0}, {q(1), q(2)}), InvalidArgument);
  EXPECT_THROW(make_system(fuzzy_semiring(), {}, {"x"}), InvalidArgument);
  EXPECT_THROW(make_system(fuzzy_semiring(), {"a"}, {"x", "x"}), InvalidArgument);
  auto other = make_system(fuzzy_semiring(), {"a", "b"}, {"x", "y"});
  EXPECT_THROW(combine(SoftConstraint::all_one(sys), SoftConstraint::all_one(other)),
               InstanceMismatch);
}

TEST(Constraints, TabulateReordersScope) {
  auto sys = make_system(fuzzy_semiring(), {"a", "b"}, {"x", "y"});
  // given in (y, x) order: value 1 iff y = a and x = b
  SoftConstraint c = SoftConstraint::tabulate(sys, {1, 0}, [](std::span<const std::size_t> t) {
    return Level::of(t[0] == 0 && t[1] == 1 ? 1 : 0);
  });
  EXPECT_EQ(c.scope(), (std::vector<VarId>{0, 1}));
  std::vector<std::size_t> xb_ya{1, 0};
  EXPECT_EQ(c.at(xb_ya), q(1));
  EXPECT_EQ(c.table(), (std::vector<Level>{q(0), q(0), q(1), q(0)}));
}

TEST(Constraints, RenameAndDiagonal) {
  auto sys = make_system(fuzzy_semiring(), {"a", "b"}, {"x", "y", "z"});
  SoftConstraint c(sys, {0, 1}, {q(1, 10), q(2, 10), q(3, 10), q(4, 10)});
  SoftConstraint moved = c.rename({{0, 2}});  // x -> z: scope becomes (y, z)
  EXPECT_EQ(moved.scope(), (std::vector<VarId>{1, 2}));
  // moved(y, z) = c(z, y)
  EXPECT_EQ(moved.table(), (std::vector<Level>{q(1, 10), q(3, 10), q(2, 10), q(4, 10)}));
  SoftConstraint diag = c.rename({{0, 1}});  // x -> y keeps c(y, y)
  EXPECT_EQ(diag.scope(), (std::vector<VarId>{1}));
  EXPECT_EQ(diag.table(), (std::vector<Level>{q(1, 10), q(4, 10)}));
}

TEST(ConstraintProperties, CombineCommutesAndAssociates) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const CSemiring* s = registered_semirings()[rng() % 3];
    auto sys = testing::random_system(*s, rng);
    auto a = testing::random_constraint(sys, rng);
    auto b = testing::random_constraint(sys, rng);
    auto c = testing::random_constraint(sys, rng);
    EXPECT_EQ(combine(a, b), combine(b, a));
    EXPECT_EQ(combine(combine(a, b), c), combine(a, combine(b, c)));
  }
}

TEST(ConstraintProperties, ProjectionComposes) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 300; ++i) {
    auto sys = testing::random_system(fuzzy_semiring(), rng);
    auto c = testing::random_constraint(sys, rng, 4);
    std::vector<VarId> I, J, both;
    for (VarId v = 0; v < sys->variables().size(); ++v) {
      bool in_i = rng() % 2, in_j = rng() % 2;
      if (in_i) I.push_back(v);
      if (in_j) J.push_back(v);
      if (in_i && in_j) both.push_back(v);
    }
    EXPECT_EQ(project(project(c, I), J), project(c, both));
  }
}

TEST(ConstraintProperties, TellIsMonotone) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const CSemiring* s = registered_semirings()[rng() % 3];
    auto sys = testing::random_system(*s, rng);
    Store store(sys);
    for (int k = 0; k < 4; ++k) {
      Store next = store.tell(static_cast<AgentId>(k % 2), testing::random_constraint(sys, rng));
      EXPECT_TRUE(below_on_scope(next.combination(), store.combination()));
      store = next;
    }
  }
}

TEST(ConstraintProperties, BooleanEntailmentIsImplication) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 300; ++i) {
    auto sys = testing::random_system(boolean_semiring(), rng, 3, 3);
    Store store(sys);
    std::vector<SoftConstraint> told;
    for (std::size_t k = 0; k < 1 + rng() % 3; ++k) {
      told.push_back(testing::random_constraint(sys, rng));
      store = store.tell(0, told.back());
    }
    SoftConstraint c = testing::random_constraint(sys, rng);
    // every complete assignment satisfying the store satisfies c
    std::vector<VarId> all;
    for (VarId v = 0; v < sys->variables().size(); ++v) all.push_back(v);
    auto models = testing::brute_force_solution(sys, told, all);
    bool implied = true;
    for (const auto& [assignment, value] : models) {
      if (value == Level::of(1) && testing::lookup(c, assignment) == Level::of(0)) {
        implied = false;
      }
    }
    EXPECT_EQ(entails(store, c), implied);
  }
}

}  // namespace
}  // namespace fcc
