#include "chipgame/solver.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace chipgame {
namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

TEST(Solve, ForkPersistenceReference) {
  const auto table = solve(GameVariant::jm1, 0.429056, 75, GameState{1, 2});
  EXPECT_LE(rel_err(table.value(), 4.050134694288943e-8), 1e-6);
  EXPECT_EQ(table.at({1, 2}, 75), table.value());
}

TEST(Solve, DeviantMiningReference) {
  const auto table = solve(GameVariant::jm2, 0.329393, 146, kOrigin, Retention::start_trace);
  EXPECT_LE(rel_err(table.value(), 4.4530581139179404e-8), 1e-6);
}

TEST(Solve, CorrectedDifficultyIsFairAtOrigin) {
  EXPECT_NEAR(solve(GameVariant::jm3, 0.4, 50, kOrigin).value(), 0.0, 1e-9);
}

TEST(Solve, RejectsBadParameters) {
  EXPECT_THROW(solve(GameVariant::jm2, 0.5, 10, kOrigin), std::domain_error);
  EXPECT_THROW(solve(GameVariant::jm2, -0.1, 10, kOrigin), std::domain_error);
  EXPECT_THROW(solve(GameVariant::jm2, 0.3, kMaxHorizon + 1, kOrigin, Retention::start_trace),
               std::invalid_argument);
  EXPECT_THROW(solve(GameVariant::jm2, 0.3, 2016, kOrigin, Retention::all_layers),
               std::invalid_argument);
}

TEST(Value, Examples) {
  EXPECT_EQ(value(GameVariant::jm1, 3, 1, 5, 0.3), 3.0);
  // One step of jm2 from (1,0): crush gives (0+1) - 0.3 + 0, toss gives 0.3*0 + 0.7*(0 - 0.3).
  const double crush = (0.0 + 1.0) - 0.3 + 0.0;
  const double toss = 0.3 * 0.0 + 0.7 * (0.0 - 0.3);
  EXPECT_DOUBLE_EQ(value(GameVariant::jm2, 1, 0, 1, 0.3), std::max(crush, toss));
  EXPECT_DOUBLE_EQ(value(GameVariant::jm2, 1, 0, 1, 0.3), 0.7);
  EXPECT_EQ(value(GameVariant::jm3, 0, 0, 0, 0.25), 0.0);
}

TEST(Value, RetentionModesAgree) {
  for (auto v : kAllVariants) {
    const auto full = solve(v, 0.37, 60, GameState{1, 2});
    const auto trace = solve(v, 0.37, 60, GameState{1, 2}, Retention::start_trace);
    for (Budget n = 0; n <= 60; ++n) EXPECT_EQ(full.at({1, 2}, n), trace.start_value(n));
    EXPECT_FALSE(trace.contains({1, 2}, 59));
    EXPECT_TRUE(trace.contains({1, 2}, 60));
    EXPECT_THROW(trace.at({0, 0}, 3), std::out_of_range);
  }
}

TEST(ValueTable, RegionFollowsReachability) {
  const auto table = solve(GameVariant::jm2, 0.3, 10, GameState{2, 1});
  EXPECT_EQ(table.bound(10), 3u);
  EXPECT_EQ(table.bound(0), 13u);
  EXPECT_TRUE(table.contains({13, 0}, 0));
  EXPECT_FALSE(table.contains({13, 1}, 0));
  EXPECT_FALSE(table.contains({3, 1}, 10));
}

// The indexed layer update must reproduce bellman_value bit for bit.
TEST(ValueTable, LayerUpdateMatchesBellmanBackup) {
  for (auto v : kAllVariants) {
    for (double q : {0.0, 0.17, 0.33, 0.49}) {
      const auto table = solve(v, q, 40, GameState{2, 3});
      for (Budget n = 1; n <= 40; ++n) {
        const auto& prev = table.layer(n - 1);
        auto lookup = [&](GameState s) { return prev[s]; };
        table.layer(n).for_each_state([&](GameState s) {
          ASSERT_EQ(table.at(s, n), bellman_value(v, q, s, n, lookup));
        });
      }
    }
  }
}

class TableInvariants : public ::testing::TestWithParam<std::tuple<GameVariant, double>> {};

TEST_P(TableInvariants, Hold) {
  const auto [v, q] = GetParam();
  const auto table = solve(v, q, 80, GameState{1, 2});
  table.for_each_entry([&](GameState s, Budget n, double val) {
    if (n == 0) {
      EXPECT_EQ(val, 0.0);
    }
    if (legal_actions(v, s, n).contains(Action::abandon)) {
      EXPECT_GE(val, 0.0);
    }
    if (n >= 1 && table.contains(s, n - 1)) {
      EXPECT_GE(val, table.at(s, n - 1));
    }
  });
}

INSTANTIATE_TEST_SUITE_P(AllGames, TableInvariants,
                         ::testing::Combine(::testing::ValuesIn(kAllVariants),
                                            ::testing::Values(0.0, 0.1, 0.3, 0.42, 0.45, 0.49)));

TEST(SolverProperties, Jm2DominatesJm3) {
  for (double q : {0.1, 0.25, 0.33, 0.45}) {
    const auto t2 = solve(GameVariant::jm2, q, 60, GameState{2, 2});
    const auto t3 = solve(GameVariant::jm3, q, 60, GameState{2, 2});
    t3.for_each_entry([&](GameState s, Budget n, double v3) {
      EXPECT_GE(t2.at(s, n), v3 - 1e-12);
    });
  }
}

TEST(SolverProperties, OriginIsNeverNegative) {
  for (auto v : kAllVariants) {
    for (double q : {0.0, 0.2, 0.35, 0.49}) {
      const auto t = solve(v, q, 120, kOrigin, Retention::start_trace);
      for (double x : t.start_trace()) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(SolverProperties, Jm1AheadStatesPayOut) {
  const auto t = solve(GameVariant::jm1, 0.3, 20, kOrigin);
  EXPECT_EQ(t.at({5, 2}, 3), 5.0);
  EXPECT_EQ(t.at({5, 2}, 0), 0.0);
}

TEST(ExtractPolicy, CrushWheneverItIsAtLeastAsGood) {
  for (double q : {0.1, 0.3, 0.45}) {
    const auto table = solve(GameVariant::jm2, q, 30, GameState{2, 1});
    const Policy pol = extract_policy(table);
    for (Budget n = 1; n <= 30; ++n) {
      const auto& prev = table.layer(n - 1);
      auto lookup = [&](GameState s) { return prev[s]; };
      const double crush = action_backup(GameVariant::jm2, q, {2, 1}, Action::crush, lookup);
      const double toss = action_backup(GameVariant::jm2, q, {2, 1}, Action::toss, lookup);
      if (crush >= toss) {
        EXPECT_EQ(pol.at({2, 1}, n), Action::crush);
      }
    }
  }
}

TEST(ExtractPolicy, HonestAtOriginUnderCorrectedDifficulty) {
  const Policy pol = extract_policy(solve(GameVariant::jm3, 0.4, 40, kOrigin));
  for (Budget n = 1; n <= 40; ++n) EXPECT_EQ(pol.at(kOrigin, n), Action::abandon);
}

TEST(ExtractPolicy, PersistsOnForkAboveThreshold) {
  const auto table = solve(GameVariant::jm1, 0.45, 75, GameState{1, 2});
  const auto& prev = table.layer(73);
  auto lookup = [&](GameState s) { return prev[s]; };
  const double toss = action_backup(GameVariant::jm1, 0.45, {1, 2}, Action::toss, lookup);
  const double abandon = action_backup(GameVariant::jm1, 0.45, {1, 2}, Action::abandon, lookup);
  ASSERT_GT(toss, abandon + kTieTolerance);
  EXPECT_EQ(extract_policy(table).at({1, 2}, 74), Action::toss);
}

TEST(ExtractPolicy, NeedsFullTable) {
  EXPECT_THROW(extract_policy(solve(GameVariant::jm2, 0.3, 10, kOrigin, Retention::start_trace)),
               std::invalid_argument);
}

TEST(ExtractPolicy, ChoicesAreLegalAndAttainTheValue) {
  for (auto v : kAllVariants) {
    for (double q : {0.05, 0.3, 0.44}) {
      const auto table = solve(v, q, 50, GameState{1, 1});
      const Policy pol = extract_policy(table);
      table.for_each_entry([&](GameState s, Budget n, double val) {
        const auto act = pol.find(s, n);
        const ActionSet legal = legal_actions(v, s, n);
        ASSERT_EQ(act.has_value(), !legal.empty());
        if (!act) return;
        EXPECT_TRUE(legal.contains(*act));
        const auto& prev = table.layer(n - 1);
        auto lookup = [&](GameState x) { return prev[x]; };
        EXPECT_NEAR(action_backup(v, q, s, *act, lookup), val, 1e-12);
      });
    }
  }
}

TEST(Policy, RejectsIllegalActions) {
  Policy pol(GameVariant::jm2, 0.3, 5, kOrigin);
  EXPECT_THROW(pol.set(kOrigin, 3, Action::crush), std::invalid_argument);
  EXPECT_THROW(pol.set({9, 0}, 3, Action::toss), std::out_of_range);
  EXPECT_THROW(pol.at(kOrigin, 3), MissingPolicyEntry);
}

TEST(EvaluatePolicy, AlwaysAbandonEarnsNothing) {
  for (auto v : kAllVariants) {
    for (double q : {0.0, 0.3, 0.49}) {
      const Policy pol = Policy::from_rule(v, q, 40, kOrigin, [](GameState, Budget, ActionSet legal) {
        return legal.contains(Action::abandon) ? Action::abandon : Action::crush;
      });
      EXPECT_EQ(evaluate_policy(v, pol, q, 40, kOrigin), 0.0);
    }
  }
}

TEST(EvaluatePolicy, OptimalPolicyReproducesValue) {
  const auto table = solve(GameVariant::jm2, 0.35, 100, kOrigin);
  const Policy pol = extract_policy(table);
  EXPECT_NEAR(evaluate_policy(GameVariant::jm2, pol, 0.35, 100, kOrigin), table.value(), 1e-12);
}

TEST(EvaluatePolicy, RandomPoliciesNeverBeatTheMaximum) {
  std::mt19937_64 gen(7);
  for (auto v : kAllVariants) {
    for (double q : {0.2, 0.4}) {
      const GameState start{1, 2};
      const auto table = solve(v, q, 30, start);
      for (int trial = 0; trial < 20; ++trial) {
        const Policy pol = Policy::from_rule(v, q, 30, start, [&](GameState, Budget, ActionSet legal) {
          std::vector<Action> acts;
          legal.for_each([&](Action a) { acts.push_back(a); });
          return acts[gen() % acts.size()];
        });
        EXPECT_LE(evaluate_policy(v, pol, q, 30, start), table.value() + 1e-12);
      }
    }
  }
}

TEST(EvaluatePolicy, MissingEntryIsReported) {
  const Policy small = extract_policy(solve(GameVariant::jm2, 0.35, 5, kOrigin));
  EXPECT_THROW(evaluate_policy(GameVariant::jm2, small, 0.35, 10, kOrigin), MissingPolicyEntry);
  EXPECT_THROW(evaluate_policy(GameVariant::jm3, small, 0.35, 5, kOrigin), std::invalid_argument);
}

TEST(EvaluatePolicy, SubPolicyAtSmallerBudget) {
  // Entries with fewer actions left are valid roots of their own.
  const auto table = solve(GameVariant::jm2, 0.4, 40, kOrigin);
  const Policy pol = extract_policy(table);
  EXPECT_NEAR(evaluate_policy(GameVariant::jm2, pol, 0.4, 25, {3, 1}), table.at({3, 1}, 25), 1e-12);
}

}  // namespace
}  // namespace chipgame
