#pragma once

// Self-checks behind `chipgame verify`: reference numerics, fairness of the
// origin games, oracle agreement and simulation consistency.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chipgame/game.hpp"
#include "chipgame/montecarlo.hpp"
#include "chipgame/oracles.hpp"
#include "chipgame/solver.hpp"
#include "chipgame/threshold.hpp"

namespace chipgame {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class Suite { reference_numbers, fairness, oracles, montecarlo, all };

inline std::optional<Suite> parse_suite(std::string_view s) {
  if (s == "paper-numbers") return Suite::reference_numbers;
  if (s == "fairness") return Suite::fairness;
  if (s == "oracles") return Suite::oracles;
  if (s == "montecarlo") return Suite::montecarlo;
  if (s == "all") return Suite::all;
  return std::nullopt;
}

inline constexpr double kFairnessTolerance = 1e-9;
inline constexpr double kOracleTolerance = 1e-12;
inline constexpr double kExactTolerance = 1e-10;
inline constexpr double kRelativeTolerance = 1e-6;

// Reference values the checks reproduce.
inline constexpr double kJm1ReferenceQ = 0.429056;
inline constexpr double kJm1ReferenceValue = 4.050134694288943e-8;  // E1(1,2,75,0.429056)
inline constexpr double kJm2ReferenceQ = 0.329393;
inline constexpr double kJm2ReferenceValue = 4.4530581139179404e-8;  // E2(0,0,146,0.329393)

namespace detail {

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::vector<double> fairness_grid() {
  std::vector<double> qs;
  for (int k = 0; k <= 9; ++k) qs.push_back(0.05 * k);
  return qs;
}

inline CheckResult check_reference_value(std::string name, GameVariant v, GameState s, Budget n,
                                         double q, double expected) {
  const double got = value(v, s.a, s.h, n, q);
  const double rel = std::abs(got - expected) / std::abs(expected);
  return {std::move(name), rel <= kRelativeTolerance,
          "value=" + fmt_double(got) + " expected=" + fmt_double(expected) +
              " rel_err=" + fmt_double(rel)};
}

inline CheckResult check_bracket(std::string name, GameVariant v, GameState s, Budget n_max,
                                 double lo, double hi, double tol, double inside_lo,
                                 double inside_hi) {
  const auto br = critical_q(v, s, n_max, lo, hi, tol);
  if (!br) return {std::move(name), false, "no threshold found in range"};
  const bool ok = br->q_lo >= inside_lo && br->q_hi <= inside_hi;
  return {std::move(name), ok,
          "bracket=[" + fmt_double(br->q_lo) + ", " + fmt_double(br->q_hi) + "] within [" +
              fmt_double(inside_lo) + ", " + fmt_double(inside_hi) + "]"};
}

// value(v, 0, 0, n, q) == 0 for every n <= n_max and q on the grid.
inline CheckResult check_origin_fair(std::string name, GameVariant v, Budget n_max) {
  for (double q : fairness_grid()) {
    const auto table = solve(v, q, n_max, kOrigin, Retention::start_trace);
    for (Budget n = 0; n <= n_max; ++n) {
      const double got = table.start_value(n);
      if (std::abs(got) > kFairnessTolerance) {
        return {std::move(name), false,
                "counterexample n=" + std::to_string(n) + " q=" + fmt_double(q) +
                    " value=" + fmt_double(got)};
      }
    }
  }
  return {std::move(name), true, "n<=" + std::to_string(n_max) + ", q in {0,0.05,...,0.45}"};
}

inline CheckResult check_jm3_exact_fair() {
  for (const char* qtext : {"1/10", "1/4", "2/5"}) {
    const Rational q = parse_rational(qtext);
    const auto table = solve<Rational>(GameVariant::jm3, q, 20, kOrigin, Retention::start_trace);
    for (Budget n = 0; n <= 20; ++n) {
      if (table.start_value(n) != 0) {
        return {"jm3 origin fairness (exact)", false,
                "counterexample n=" + std::to_string(n) + " q=" + qtext +
                    " value=" + table.start_value(n).str()};
      }
    }
  }
  return {"jm3 origin fairness (exact)", true, "n<=20, q in {1/10,1/4,2/5}, exactly 0"};
}

inline CheckResult check_jm3_bound() {
  for (double q : {0.1, 0.3, 0.45}) {
    const auto table = solve(GameVariant::jm3, q, 100, kOrigin);
    std::optional<std::string> bad;
    table.for_each_entry([&](GameState s, Budget n, double v) {
      if (!bad && v > (1.0 - q) * s.a + kFairnessTolerance) {
        bad = "counterexample (" + std::to_string(s.a) + "," + std::to_string(s.h) + "," +
              std::to_string(n) + ") q=" + fmt_double(q) + " value=" + fmt_double(v);
      }
    });
    if (bad) return {"jm3 value <= (1-q)*a", false, *bad};
  }
  return {"jm3 value <= (1-q)*a", true, "all entries, n_max=100, q in {0.1,0.3,0.45}"};
}

inline const std::vector<const char*>& oracle_qs() {
  static const std::vector<const char*> qs = {"0.1", "0.25", "0.35", "0.45"};
  return qs;
}

inline CheckResult check_expectimax_agreement() {
  double worst = 0.0;
  for (auto v : kAllVariants) {
    for (const char* qtext : oracle_qs()) {
      const double q = std::stod(qtext);
      for (Chips a = 0; a <= 3; ++a) {
        for (Chips h = 0; h <= 3; ++h) {
          const auto table = solve(v, q, 12, GameState{a, h}, Retention::start_trace);
          for (Budget n = 0; n <= 12; ++n) {
            const double dp = table.start_value(n);
            const double ex = expectimax_oracle(v, a, h, n, q);
            worst = std::max(worst, std::abs(dp - ex));
            if (std::abs(dp - ex) > kOracleTolerance) {
              return {"dp == expectimax", false,
                      std::string(to_string(v)) + " (" + std::to_string(a) + "," +
                          std::to_string(h) + "," + std::to_string(n) + ") q=" + qtext +
                          " dp=" + fmt_double(dp) + " expectimax=" + fmt_double(ex)};
            }
          }
        }
      }
    }
  }
  return {"dp == expectimax", true, "a,h<=3, n<=12, max |diff|=" + fmt_double(worst)};
}

inline CheckResult check_exact_agreement() {
  double worst = 0.0;
  for (auto v : kAllVariants) {
    for (const char* qtext : oracle_qs()) {
      const double q = std::stod(qtext);
      const Rational qr = parse_rational(qtext);
      for (Chips a = 0; a <= 3; ++a) {
        for (Chips h = 0; h <= 3; ++h) {
          const GameState s{a, h};
          const auto fl = solve(v, q, 20, s, Retention::start_trace);
          const auto ex = solve<Rational>(v, qr, 20, s, Retention::start_trace);
          for (Budget n = 0; n <= 20; ++n) {
            const double diff = std::abs(fl.start_value(n) - ex.start_value(n).convert_to<double>());
            worst = std::max(worst, diff);
            if (diff > kExactTolerance) {
              return {"dp == exact rational", false,
                      std::string(to_string(v)) + " (" + std::to_string(a) + "," +
                          std::to_string(h) + "," + std::to_string(n) + ") q=" + qtext +
                          " dp=" + fmt_double(fl.start_value(n)) +
                          " exact=" + ex.start_value(n).str()};
            }
          }
        }
      }
    }
  }
  return {"dp == exact rational", true, "a,h<=3, n<=20, max |diff|=" + fmt_double(worst)};
}

inline CheckResult check_simulation(GameVariant v, double q, Budget n, GameState start,
                                    std::uint64_t trials, std::uint64_t seed) {
  const auto table = solve(v, q, n, start);
  const Policy pol = extract_policy(table);
  const double exact = evaluate_policy(v, pol, q, n, start);
  const SimStats st = simulate(v, pol, q, n, start, trials, seed);
  const bool identity = std::abs(exact - table.value()) <= kOracleTolerance;
  const bool agree = std::abs(st.mean - exact) <= 4.0 * st.std_error;
  return {std::string(to_string(v)) + " simulation vs policy value", identity && agree,
          "mean=" + fmt_double(st.mean) + " stderr=" + fmt_double(st.std_error) +
              " policy_value=" + fmt_double(exact) + " dp_value=" + fmt_double(table.value())};
}

}  // namespace detail

// Runs a suite, reporting each check through `report` as it completes.
inline std::vector<CheckResult> run_suite(Suite suite,
                                          const std::function<void(const CheckResult&)>& report = {}) {
  std::vector<CheckResult> out;
  auto add = [&](CheckResult r) {
    if (report) report(r);
    out.push_back(std::move(r));
  };
  const bool all = suite == Suite::all;
  if (all || suite == Suite::reference_numbers) {
    add(detail::check_reference_value("E1(1,2,75,0.429056)", GameVariant::jm1, {1, 2}, 75,
                                      kJm1ReferenceQ, kJm1ReferenceValue));
    add(detail::check_reference_value("E2(0,0,146,0.329393)", GameVariant::jm2, {0, 0}, 146,
                                      kJm2ReferenceQ, kJm2ReferenceValue));
    add(detail::check_bracket("jm1 threshold near 42.91%", GameVariant::jm1, {1, 2}, 300, 0.40,
                              0.45, 1e-5, 0.4290, 0.4292));
    add(detail::check_bracket("jm2 threshold near 32.94%", GameVariant::jm2, {0, 0}, 150, 0.30,
                              0.35, 1e-6, 0.329392, 0.329394));
  }
  if (all || suite == Suite::fairness) {
    add(detail::check_origin_fair("jm1 origin fairness", GameVariant::jm1, 100));
    add(detail::check_origin_fair("jm3 origin fairness", GameVariant::jm3, 150));
    add(detail::check_jm3_exact_fair());
    add(detail::check_jm3_bound());
  }
  if (all || suite == Suite::oracles) {
    add(detail::check_expectimax_agreement());
    add(detail::check_exact_agreement());
  }
  if (all || suite == Suite::montecarlo) {
    for (auto v : kAllVariants) {
      const GameState start = v == GameVariant::jm1 ? GameState{1, 2} : kOrigin;
      add(detail::check_simulation(v, 0.35, 100, start, 100000, 20240505));
    }
  }
  return out;
}

}  // namespace chipgame
