#pragma once

// Two independent checks on the solver.
//
// expectimax_oracle walks the full action/outcome tree built from the
// game-core transitions, with no memoization and no reachability pruning.
// exact_value replays the recurrences in exact rational arithmetic.

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "chipgame/game.hpp"
#include "chipgame/solver.hpp"

namespace chipgame {

// Always in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr Budget kExpectimaxHorizonCap = 20;
inline constexpr Budget kExactHorizonCap = 25;

// Parses "p/q", an integer, or a plain decimal such as "0.429056" (taken
// exactly, i.e. 429056/1000000).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  auto parse_int = [&](std::string_view digits) {
    if (digits.empty()) throw fail();
    for (char c : digits) {
      if (c < '0' || c > '9') throw fail();
    }
    return BigInt(std::string(digits));
  };
  if (text.empty()) throw fail();
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    r = Rational(parse_int(text.substr(0, slash)), den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    BigInt scale = boost::multiprecision::pow(BigInt(10), unsigned(frac.size()));
    BigInt num = (whole.empty() ? BigInt(0) : parse_int(whole)) * scale +
                 (frac.empty() ? BigInt(0) : parse_int(frac));
    r = Rational(num, scale);
  } else {
    r = Rational(parse_int(text));
  }
  return negative ? Rational(-r) : r;
}

inline std::string to_string(const Rational& r) { return r.str(); }

namespace detail {

inline double expectimax(GameVariant variant, GameState s, Budget n, const TossLaw& law) {
  if (auto tv = terminal_value(variant, s, n)) return *tv;
  auto continuation = [&](const Transition& t) {
    return t.reward + (t.terminal ? 0.0 : expectimax(variant, t.next, n - 1, law));
  };
  double best = -std::numeric_limits<double>::infinity();
  legal_actions(variant, s, n).for_each([&](Action act) {
    double v = 0.0;
    switch (act) {
      case Action::toss:
        for (const Transition& t : toss_transitions(variant, s, law)) {
          v += t.probability * continuation(t);
        }
        break;
      case Action::crush:
        v = continuation(crush_transition(variant, s, law));
        break;
      case Action::abandon:
        v = continuation(abandon_transition(variant, s));
        break;
    }
    best = std::max(best, v);
  });
  return best;
}

}  // namespace detail

inline double expectimax_oracle(GameVariant variant, Chips a, Chips h, Budget n, double q) {
  if (n > kExpectimaxHorizonCap) {
    throw std::invalid_argument("expectimax oracle horizon must not exceed " +
                                std::to_string(kExpectimaxHorizonCap) + ", got " +
                                std::to_string(n));
  }
  const TossLaw law(q);
  return detail::expectimax(variant, GameState{a, h}, n, law);
}

// Exact E(a, h, n) for rational q; denominators grow like den(q)^n.
inline Rational exact_value(GameVariant variant, Chips a, Chips h, Budget n, const Rational& q) {
  if (n > kExactHorizonCap) {
    throw std::invalid_argument("exact oracle horizon must not exceed " +
                                std::to_string(kExactHorizonCap) + ", got " + std::to_string(n));
  }
  return solve<Rational>(variant, q, n, GameState{a, h}, Retention::start_trace).value();
}

}  // namespace chipgame
