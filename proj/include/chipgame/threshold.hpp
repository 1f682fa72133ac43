#pragma once

// Critical hashrate search.
//
// A game is biased in the player's favour at q when some horizon gives a
// value above kBiasEpsilon. bias_witness reports the smallest such horizon;
// critical_q bisects on that predicate and then re-checks the result on a
// coarse grid, since monotonicity in q is observed rather than proven.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chipgame/game.hpp"
#include "chipgame/solver.hpp"

namespace chipgame {

// Separates real bias (signals around 4e-8) from rounding noise (~1e-13).
inline constexpr double kBiasEpsilon = 1e-9;
inline constexpr Budget kDefaultThresholdHorizon = 300;
inline constexpr double kGridResolution = 1e-3;

struct BiasWitness {
  Budget n_star = 0;
  double value = 0.0;
};

struct ThresholdBracket {
  double q_lo = 0.0;
  double q_hi = 0.0;
  BiasWitness witness_at_hi;
  Budget n_max = 0;
  double tol = 0.0;
};

class NonMonotoneThreshold : public std::runtime_error {
 public:
  NonMonotoneThreshold(double q, bool biased)
      : std::runtime_error("bias predicate is not monotone in q: grid point q=" +
                           std::to_string(q) + (biased ? " is biased" : " is not biased") +
                           " on the wrong side of the bisection bracket"),
        q(q),
        biased(biased) {}
  double q;
  bool biased;
};

// lo, lo + step, ... up to hi. A step wider than the range yields {lo}.
inline std::vector<double> q_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("empty q grid: need step > 0 and hi >= lo");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> qs;
  qs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) qs.push_back(std::min(lo + double(i) * step, hi));
  return qs;
}

inline std::optional<BiasWitness> bias_witness(GameVariant variant, GameState start, double q,
                                               Budget n_max) {
  if (n_max < 1 || n_max > kDefaultHorizonCap) {
    throw std::invalid_argument("bias search horizon must lie in [1, " +
                                std::to_string(kDefaultHorizonCap) + "], got " +
                                std::to_string(n_max));
  }
  const auto table = solve(variant, q, n_max, start, Retention::start_trace);
  const auto& trace = table.start_trace();
  for (Budget n = 1; n <= n_max; ++n) {
    if (trace[n] > kBiasEpsilon) return BiasWitness{n, trace[n]};
  }
  return std::nullopt;
}

struct Bisection {
  double lo;
  double hi;
};

// Shrinks [lo, hi] around the switch point of `biased` (false at lo, true at
// hi) to width <= tol, then checks every point of a grid with spacing
// max(tol, kGridResolution) against the bracket. `on_biased(q)` sees each
// biased probe that becomes the new upper end.
template <class Predicate, class OnBiased>
Bisection bisect_threshold(Predicate&& biased, double lo, double hi, double tol,
                           OnBiased&& on_biased) {
  const double range_lo = lo;
  const double range_hi = hi;
  while (hi - lo > tol) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (biased(mid)) {
      hi = mid;
      on_biased(mid);
    } else {
      lo = mid;
    }
  }
  for (double q : q_grid(range_lo, range_hi, std::max(tol, kGridResolution))) {
    if (q > lo && q < hi) continue;
    const bool b = biased(q);
    if (b != (q >= hi)) throw NonMonotoneThreshold(q, b);
  }
  return {lo, hi};
}

// Returns nullopt when q_hi itself shows no bias (no threshold in range).
inline std::optional<ThresholdBracket> critical_q(GameVariant variant, GameState start,
                                                  Budget n_max, double q_lo, double q_hi,
                                                  double tol) {
  if (!(q_lo >= 0.0 && q_lo < q_hi && q_hi < 0.5)) {
    throw std::invalid_argument("threshold range must satisfy 0 <= lo < hi < 0.5");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("threshold tolerance must be positive");

  auto witness_hi = bias_witness(variant, start, q_hi, n_max);
  if (!witness_hi) return std::nullopt;
  if (bias_witness(variant, start, q_lo, n_max)) {
    throw std::invalid_argument("lower end of the threshold range already shows bias (q=" +
                                std::to_string(q_lo) + ")");
  }

  std::optional<BiasWitness> last;
  const Bisection b = bisect_threshold(
      [&](double q) {
        last = bias_witness(variant, start, q, n_max);
        return last.has_value();
      },
      q_lo, q_hi, tol, [&](double) { witness_hi = last; });
  return ThresholdBracket{b.lo, b.hi, *witness_hi, n_max, tol};
}

}  // namespace chipgame
