#include "chipgame/oracles.hpp"

#include <random>

#include <gtest/gtest.h>

namespace chipgame {
namespace {

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("2/5"), Rational(2, 5));
  EXPECT_EQ(parse_rational("4/10"), Rational(2, 5));
  EXPECT_EQ(parse_rational("0.429056"), Rational(429056, 1000000));
  EXPECT_EQ(parse_rational(".25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-1/3"), Rational(-1, 3));
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("0.3x"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1e-3"), std::invalid_argument);
}

TEST(Rational, LowestTermsPositiveDenominator) {
  const Rational r = Rational(6) / Rational(-4);
  EXPECT_EQ(boost::multiprecision::numerator(r), -3);
  EXPECT_EQ(boost::multiprecision::denominator(r), 2);
}

TEST(Expectimax, AgreesWithSolverOnDeviantMining) {
  EXPECT_NEAR(expectimax_oracle(GameVariant::jm2, 0, 0, 12, 0.33),
              value(GameVariant::jm2, 0, 0, 12, 0.33), 1e-12);
}

TEST(Expectimax, ForkGameFairAtOrigin) {
  EXPECT_NEAR(expectimax_oracle(GameVariant::jm1, 0, 0, 10, 0.2), 0.0, 1e-12);
}

TEST(Expectimax, ZeroBudget) {
  for (auto v : kAllVariants) EXPECT_EQ(expectimax_oracle(v, 2, 1, 0, 0.3), 0.0);
}

TEST(Expectimax, Caps) {
  EXPECT_THROW(expectimax_oracle(GameVariant::jm2, 0, 0, 21, 0.3), std::invalid_argument);
  EXPECT_THROW(expectimax_oracle(GameVariant::jm2, 0, 0, 3, 0.5), std::domain_error);
}

TEST(Expectimax, EquivalentOnSmallGrid) {
  for (auto v : kAllVariants) {
    for (double q : {0.1, 0.25, 0.35, 0.45}) {
      for (Chips a = 0; a <= 2; ++a) {
        for (Chips h = 0; h <= 2; ++h) {
          for (Budget n = 0; n <= 9; ++n) {
            EXPECT_NEAR(expectimax_oracle(v, a, h, n, q), value(v, a, h, n, q), 1e-12)
                << to_string(v) << " (" << a << "," << h << "," << n << ") q=" << q;
          }
        }
      }
    }
  }
}

// The solver's backup formulas against expectations over game-core transitions.
TEST(Backups, MatchTransitionExpectations) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> val(-2.0, 5.0);
  for (auto v : kAllVariants) {
    for (double q : {0.0, 0.2, 0.41}) {
      const TossLaw law(q);
      for (Chips a = 0; a <= 6; ++a) {
        for (Chips h = 0; h <= 6; ++h) {
          const GameState s{a, h};
          TriangleLayer<double> prev(a + h + 1);
          prev.for_each_state([&](GameState x) { prev[x] = val(gen); });
          auto lookup = [&](GameState x) { return prev[x]; };
          auto cont = [&](const Transition& t) { return t.reward + (t.terminal ? 0.0 : prev[t.next]); };
          legal_actions(v, s, 1).for_each([&](Action act) {
            double expect = 0.0;
            if (act == Action::toss) {
              for (const auto& t : toss_transitions(v, s, law)) expect += t.probability * cont(t);
            } else if (act == Action::crush) {
              expect = cont(crush_transition(v, s, law));
            } else {
              expect = cont(abandon_transition(v, s));
            }
            EXPECT_NEAR(action_backup(v, q, s, act, lookup), expect, 1e-13);
          });
        }
      }
    }
  }
}

TEST(ExactValue, CorrectedDifficultyFairAtOrigin) {
  EXPECT_EQ(exact_value(GameVariant::jm3, 0, 0, 15, Rational(2, 5)), 0);
}

TEST(ExactValue, CorrectedDifficultyBound) {
  const Rational v = exact_value(GameVariant::jm3, 2, 0, 10, Rational(1, 4));
  EXPECT_LE(v, Rational(3, 4) * 2);
  EXPECT_GT(v, 0);
}

TEST(ExactValue, OneStepDeviantMining) {
  EXPECT_EQ(exact_value(GameVariant::jm2, 1, 0, 1, Rational(3, 10)), Rational(7, 10));
}

TEST(ExactValue, Caps) {
  EXPECT_THROW(exact_value(GameVariant::jm2, 0, 0, 26, Rational(1, 3)), std::invalid_argument);
  EXPECT_THROW(exact_value(GameVariant::jm2, 0, 0, 3, Rational(1, 2)), std::domain_error);
  EXPECT_THROW(exact_value(GameVariant::jm2, 0, 0, 3, Rational(-1, 10)), std::domain_error);
}

TEST(ExactValue, FloatAgreementOnRandomRationals) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 24; ++trial) {
    const int den = 2 + int(gen() % 99);
    const int num = int(gen() % ((den - 1) / 2 + 1));  // num/den < 1/2
    const Rational q(num, den);
    const double qd = double(num) / double(den);
    const auto v = kAllVariants[gen() % 3];
    const GameState s{Chips(gen() % 4), Chips(gen() % 4)};
    const auto exact = solve<Rational>(v, q, 20, s, Retention::start_trace);
    const auto fl = solve(v, qd, 20, s, Retention::start_trace);
    for (Budget n = 0; n <= 20; ++n) {
      EXPECT_NEAR(fl.start_value(n), exact.start_value(n).convert_to<double>(), 1e-10)
          << to_string(v) << " q=" << q << " n=" << n;
    }
  }
}

TEST(ExactValue, Jm3OriginExactlyZeroThroughHorizon20) {
  for (const char* q : {"1/10", "1/4", "2/5"}) {
    const auto t = solve<Rational>(GameVariant::jm3, parse_rational(q), 20, kOrigin,
                                   Retention::start_trace);
    for (const auto& x : t.start_trace()) EXPECT_EQ(x, 0) << q;
  }
}

}  // namespace
}  // namespace chipgame
