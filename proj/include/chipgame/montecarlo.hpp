#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chipgame/game.hpp"
#include "chipgame/solver.hpp"

namespace chipgame {

// Counter-based generator: draw k of trial t is
//   splitmix64_mix(key(seed, t) + (k + 1) * 0x9e3779b97f4a7c15)
// with key(seed, t) = splitmix64_mix(seed ^ splitmix64_mix(t + 0x9e3779b97f4a7c15)).
// Each trial owns an independent stream, so any partition of the trials
// across workers replays the same games.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  CounterRng(std::uint64_t seed, std::uint64_t trial)
      : key_(mix(seed ^ mix(trial + kGamma))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct SimStats {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::uint64_t seed = 0;
};

// Net income of one game played under `policy`. All rewards come from the
// game-core transitions.
inline double play_once(GameVariant variant, const Policy& policy, const TossLaw& law, Budget n,
                        GameState start, CounterRng& rng) {
  GameState s = start;
  double total = 0.0;
  for (Budget k = n;; --k) {
    if (auto tv = terminal_value(variant, s, k)) return total + *tv;
    Transition t;
    switch (policy.at(s, k)) {
      case Action::toss: {
        const auto branches = toss_transitions(variant, s, law);
        t = rng.uniform() < law.q() ? branches[0] : branches[1];
        break;
      }
      case Action::crush:
        t = crush_transition(variant, s, law);
        break;
      case Action::abandon:
        t = abandon_transition(variant, s);
        break;
    }
    total += t.reward;
    if (t.terminal) return total;
    s = t.next;
  }
}

// Per-trial net incomes for trials [first, first + count).
inline std::vector<double> simulate_trials(GameVariant variant, const Policy& policy, double q,
                                           Budget n, GameState start, std::uint64_t first,
                                           std::uint64_t count, std::uint64_t seed) {
  if (policy.variant() != variant) {
    throw std::invalid_argument("policy was built for " + std::string(to_string(policy.variant())));
  }
  const TossLaw law(q);
  std::vector<double> out;
  out.reserve(count);
  for (std::uint64_t t = first; t < first + count; ++t) {
    CounterRng rng(seed, t);
    out.push_back(play_once(variant, policy, law, n, start, rng));
  }
  return out;
}

// Fixed-order pairwise summation.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline SimStats summarize(std::span<const double> totals, std::uint64_t seed) {
  if (totals.empty()) throw std::invalid_argument("no trials to summarize");
  SimStats st;
  st.trials = totals.size();
  st.seed = seed;
  const auto [lo, hi] = std::minmax_element(totals.begin(), totals.end());
  st.min = *lo;
  st.max = *hi;
  const double n = double(totals.size());
  st.mean = std::clamp(pairwise_sum(totals) / n, st.min, st.max);
  if (totals.size() > 1) {
    std::vector<double> sq(totals.size());
    std::transform(totals.begin(), totals.end(), sq.begin(),
                   [m = st.mean](double x) { return (x - m) * (x - m); });
    st.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return st;
}

inline SimStats simulate(GameVariant variant, const Policy& policy, double q, Budget n,
                         GameState start, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  const auto totals = simulate_trials(variant, policy, q, n, start, 0, trials, seed);
  return summarize(totals, seed);
}

}  // namespace chipgame
