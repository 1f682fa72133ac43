#pragma once

// Finite-horizon dynamic programming for the chip games.
//
// E(a, h, n) is the maximal expected net income with at most n actions left.
// Every action consumes one unit of budget, so layer n depends only on layer
// n-1 and the table is built bottom-up. Only states that can be reached from
// the start are kept: since Toss is the only action creating a chip, with n
// actions left we have a + h <= a0 + h0 + (n_max - n).
//
// Backups are written in the same order of operations as the recurrences
// they implement, so float results are reproducible bit for bit:
//
//   jm1, a <= h:  max{ 0, q*E(a+1,h) + (1-q)*E(a,h+1) - q }
//   jm1, a >  h:  a
//   jm2, a >  h:  max{ (h+1) - q + E(a-h-1,0), q*E(a+1,h) + (1-q)*(E(a,h+1) - q) }
//   jm2, a <= h:  max{ E(0,0),                 q*E(a+1,h) + (1-q)*(E(a,h+1) - q) }
//   jm3:          as jm2 with crush term (1-q)*(h+1) + E(a-h-1,0)
//
// with E evaluated at n-1 on the right-hand sides and E(., ., 0) = 0.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chipgame/game.hpp"
#include "chipgame/layers.hpp"

namespace chipgame {

inline constexpr Budget kMaxHorizon = 4096;
inline constexpr Budget kDefaultHorizonCap = 2016;
// Upper bound on cells held by a table that keeps every layer (1 GiB of doubles).
inline constexpr std::size_t kMaxStoredCells = std::size_t(1) << 27;
inline constexpr double kTieTolerance = 1e-12;

enum class Retention {
  all_layers,   // every (a, h, n) entry is kept; needed for policies
  start_trace,  // two rolling layers; only value(start, n) for all n survives
};

// Backup of a single action at a non-terminal state; `prev` maps a state to
// its value with one action less.
template <class Scalar, class Lookup>
Scalar action_backup(GameVariant variant, const Scalar& q, GameState s, Action act,
                     Lookup&& prev) {
  switch (act) {
    case Action::toss:
      if (variant == GameVariant::jm1) {
        return q * prev(GameState{s.a + 1, s.h}) + (Scalar(1) - q) * prev(GameState{s.a, s.h + 1}) - q;
      }
      return q * prev(GameState{s.a + 1, s.h}) +
             (Scalar(1) - q) * (prev(GameState{s.a, s.h + 1}) - q);
    case Action::crush: {
      const GameState rest{s.a - s.h - 1, 0};
      if (variant == GameVariant::jm2) return Scalar(s.h + 1) - q + prev(rest);
      return (Scalar(1) - q) * Scalar(s.h + 1) + prev(rest);
    }
    case Action::abandon:
      if (variant == GameVariant::jm1) return Scalar(0);
      return prev(kOrigin);
  }
  throw std::logic_error("unknown action");
}

// Bellman value of (s, n) given the layer n-1.
template <class Scalar, class Lookup>
Scalar bellman_value(GameVariant variant, const Scalar& q, GameState s, Budget n, Lookup&& prev) {
  if (auto tv = terminal_value<Scalar>(variant, s, n)) return std::move(*tv);
  const ActionSet legal = legal_actions(variant, s, n);
  std::optional<Scalar> best;
  legal.for_each([&](Action act) {
    Scalar b = action_backup(variant, q, s, act, prev);
    if (!best || b > *best) best = std::move(b);
  });
  return std::move(*best);
}

namespace detail {

// bellman_value over a whole layer (n >= 1) with direct indexing. Same
// expressions, same order of operations.
template <class Scalar>
void update_layer(GameVariant variant, const Scalar& q, const TriangleLayer<Scalar>& prev,
                  TriangleLayer<Scalar>& cur) {
  using Layer = TriangleLayer<Scalar>;
  const Scalar p = Scalar(1) - q;
  const auto& in = prev.cells();
  auto& out = cur.cells();
  const Scalar& origin = in[0];
  for (std::size_t sum = 0; sum <= cur.bound(); ++sum) {
    const std::size_t row = Layer::diagonal_start(sum);
    const std::size_t up = Layer::diagonal_start(sum + 1);
    for (std::size_t h = 0; h <= sum; ++h) {
      const std::size_t a = sum - h;
      const Scalar& tails = in[up + h];
      const Scalar& heads = in[up + h + 1];
      Scalar& dst = out[row + h];
      if (variant == GameVariant::jm1) {
        if (a > h) {
          dst = Scalar(a);
        } else {
          Scalar toss = q * tails + p * heads - q;
          dst = toss > Scalar(0) ? toss : Scalar(0);
        }
        continue;
      }
      Scalar toss = q * tails + p * (heads - q);
      if (a > h) {
        const Scalar& rest = in[Layer::diagonal_start(a - h - 1)];
        Scalar crush = variant == GameVariant::jm2 ? Scalar(Scalar(h + 1) - q + rest)
                                                   : Scalar(p * Scalar(h + 1) + rest);
        dst = toss > crush ? toss : crush;
      } else {
        dst = toss > origin ? toss : origin;
      }
    }
  }
}

}  // namespace detail

template <class Scalar>
class BasicValueTable {
 public:
  GameVariant variant() const { return variant_; }
  const Scalar& q() const { return q_; }
  Budget n_max() const { return n_max_; }
  GameState start() const { return start_; }
  Retention retention() const { return retention_; }

  // Largest a + h stored with n actions left.
  Chips bound(Budget n) const { return start_.total() + (n_max_ - n); }

  bool has_layer(Budget n) const { return n >= first_layer_ && n <= n_max_; }

  bool contains(GameState s, Budget n) const {
    return has_layer(n) && std::uint64_t(s.a) + s.h <= bound(n);
  }

  const Scalar& at(GameState s, Budget n) const {
    if (!contains(s, n)) {
      throw std::out_of_range("value table has no entry for (" + std::to_string(s.a) + "," +
                              std::to_string(s.h) + "," + std::to_string(n) + ")");
    }
    return layers_[n - first_layer_][s];
  }

  const TriangleLayer<Scalar>& layer(Budget n) const {
    if (!has_layer(n)) throw std::out_of_range("layer not retained");
    return layers_[n - first_layer_];
  }

  // E(start, n_max).
  const Scalar& value() const { return start_trace_.back(); }
  const Scalar& start_value(Budget n) const { return start_trace_.at(n); }
  const std::vector<Scalar>& start_trace() const { return start_trace_; }

  // fn(state, n, value) over every stored entry, ascending n.
  template <class Fn>
  void for_each_entry(Fn&& fn) const {
    for (Budget n = first_layer_; n <= n_max_; ++n) {
      const auto& lay = layers_[n - first_layer_];
      lay.for_each_state([&](GameState s) { fn(s, n, lay[s]); });
    }
  }

 private:
  template <class S>
  friend BasicValueTable<S> solve(GameVariant, S, Budget, GameState, Retention);

  GameVariant variant_ = GameVariant::jm1;
  Scalar q_{};
  Budget n_max_ = 0;
  GameState start_{};
  Retention retention_ = Retention::all_layers;
  Budget first_layer_ = 0;
  std::vector<TriangleLayer<Scalar>> layers_;
  std::vector<Scalar> start_trace_;
};

using ValueTable = BasicValueTable<double>;

inline std::size_t full_table_cells(GameState start, Budget n_max) {
  std::size_t cells = 0;
  for (Budget n = 0; n <= n_max; ++n) {
    cells += TriangleLayer<char>::cell_count(start.total() + (n_max - n));
  }
  return cells;
}

template <class Scalar>
BasicValueTable<Scalar> solve(GameVariant variant, Scalar q, Budget n_max, GameState start,
                              Retention retention = Retention::all_layers) {
  const BasicTossLaw<Scalar> law(q);
  if (n_max > kMaxHorizon) {
    throw std::invalid_argument("n_max must not exceed " + std::to_string(kMaxHorizon) +
                                ", got " + std::to_string(n_max));
  }
  if (std::uint64_t(start.a) + start.h > kMaxHorizon) {
    throw std::invalid_argument("start a + h must not exceed " + std::to_string(kMaxHorizon));
  }
  if (retention == Retention::all_layers && full_table_cells(start, n_max) > kMaxStoredCells) {
    throw std::invalid_argument("full value table for n_max=" + std::to_string(n_max) +
                                " exceeds the storage cap; use the start-trace retention");
  }

  BasicValueTable<Scalar> table;
  table.variant_ = variant;
  table.q_ = law.q();
  table.n_max_ = n_max;
  table.start_ = start;
  table.retention_ = retention;
  table.start_trace_.reserve(std::size_t(n_max) + 1);

  TriangleLayer<Scalar> prev(table.bound(0), Scalar(0));
  table.start_trace_.push_back(Scalar(0));
  if (retention == Retention::all_layers) table.layers_.push_back(prev);

  const Scalar& qv = law.q();
  for (Budget n = 1; n <= n_max; ++n) {
    TriangleLayer<Scalar> cur(table.bound(n), Scalar(0));
    detail::update_layer(variant, qv, prev, cur);
    table.start_trace_.push_back(cur[start]);
    if (retention == Retention::all_layers) {
      table.layers_.push_back(cur);
    }
    prev = std::move(cur);
  }
  if (retention == Retention::start_trace) {
    table.first_layer_ = n_max;
    table.layers_.push_back(std::move(prev));
  }
  return table;
}

inline double value(GameVariant variant, Chips a, Chips h, Budget n, double q) {
  return solve(variant, q, n, GameState{a, h}, Retention::start_trace).value();
}

class MissingPolicyEntry : public std::runtime_error {
 public:
  MissingPolicyEntry(GameState s, Budget n)
      : std::runtime_error("policy has no action for (" + std::to_string(s.a) + "," +
                           std::to_string(s.h) + "," + std::to_string(n) + ")"),
        state(s),
        budget(n) {}
  GameState state;
  Budget budget;
};

// Action chosen at each non-terminal (a, h, n), n >= 1, of a start-rooted
// region of the state space.
class Policy {
 public:
  Policy(GameVariant variant, double q, Budget n_max, GameState start)
      : variant_(variant), q_(q), n_max_(n_max), start_(start) {
    choice_.reserve(std::size_t(n_max) + 1);
    for (Budget n = 0; n <= n_max; ++n) choice_.emplace_back(bound(n), kNone);
  }

  // Builds a policy from rule(state, n, legal) -> Action.
  template <class Rule>
  static Policy from_rule(GameVariant variant, double q, Budget n_max, GameState start,
                          Rule&& rule) {
    Policy pol(variant, q, n_max, start);
    for (Budget n = 1; n <= n_max; ++n) {
      pol.choice_[n].for_each_state([&](GameState s) {
        const ActionSet legal = legal_actions(variant, s, n);
        if (!legal.empty()) pol.set(s, n, rule(s, n, legal));
      });
    }
    return pol;
  }

  GameVariant variant() const { return variant_; }
  double q() const { return q_; }
  Budget n_max() const { return n_max_; }
  GameState start() const { return start_; }
  Chips bound(Budget n) const { return start_.total() + (n_max_ - n); }

  void set(GameState s, Budget n, Action act) {
    if (n > n_max_ || !choice_[n].contains(s)) {
      throw std::out_of_range("policy state outside its region");
    }
    if (!legal_actions(variant_, s, n).contains(act)) {
      throw std::invalid_argument("policy action '" + std::string(to_string(act)) +
                                  "' is not legal at (" + std::to_string(s.a) + "," +
                                  std::to_string(s.h) + "," + std::to_string(n) + ")");
    }
    choice_[n][s] = static_cast<std::uint8_t>(act);
  }

  std::optional<Action> find(GameState s, Budget n) const {
    if (n > n_max_ || !choice_[n].contains(s)) return std::nullopt;
    const std::uint8_t c = choice_[n][s];
    if (c == kNone) return std::nullopt;
    return static_cast<Action>(c);
  }

  Action at(GameState s, Budget n) const {
    if (auto act = find(s, n)) return *act;
    throw MissingPolicyEntry(s, n);
  }

  // fn(state, n, action) for every defined entry, ascending n.
  template <class Fn>
  void for_each_choice(Fn&& fn) const {
    for (Budget n = 1; n <= n_max_; ++n) {
      choice_[n].for_each_state([&](GameState s) {
        if (choice_[n][s] != kNone) fn(s, n, static_cast<Action>(choice_[n][s]));
      });
    }
  }

 private:
  static constexpr std::uint8_t kNone = 0xff;

  GameVariant variant_;
  double q_;
  Budget n_max_;
  GameState start_;
  std::vector<TriangleLayer<std::uint8_t>> choice_;
};

// Argmax witness of a fully retained table. Backups within kTieTolerance of
// the best are ties, resolved as crush > abandon > toss.
inline Policy extract_policy(const ValueTable& table) {
  if (table.retention() != Retention::all_layers) {
    throw std::invalid_argument("extract_policy needs a table that keeps all layers");
  }
  const GameVariant variant = table.variant();
  const double q = table.q();
  Policy pol(variant, q, table.n_max(), table.start());
  for (Budget n = 1; n <= table.n_max(); ++n) {
    const auto& prev = table.layer(n - 1);
    auto lookup = [&prev](GameState s) -> const double& { return prev[s]; };
    table.layer(n).for_each_state([&](GameState s) {
      const ActionSet legal = legal_actions(variant, s, n);
      if (legal.empty()) return;
      double best = -std::numeric_limits<double>::infinity();
      legal.for_each([&](Action act) { best = std::max(best, action_backup(variant, q, s, act, lookup)); });
      std::optional<Action> chosen;
      legal.for_each([&](Action act) {
        if (!chosen && action_backup(variant, q, s, act, lookup) >= best - kTieTolerance) chosen = act;
      });
      pol.set(s, n, *chosen);
    });
  }
  return pol;
}

namespace detail {

inline std::uint64_t state_key(GameState s) { return (std::uint64_t(s.a) << 32) | s.h; }

inline GameState key_state(std::uint64_t k) {
  return GameState{Chips(k >> 32), Chips(k & 0xffffffffu)};
}

}  // namespace detail

// Expected net income of following `policy` from `start` with n actions:
// the same recursion as the solver with the max replaced by the chosen action.
inline double evaluate_policy(GameVariant variant, const Policy& policy, double q, Budget n,
                              GameState start) {
  if (policy.variant() != variant) {
    throw std::invalid_argument("policy was built for " + std::string(to_string(policy.variant())));
  }
  const TossLaw law(q);

  // Forward pass: states reachable under the policy, per remaining budget.
  std::vector<std::vector<std::uint64_t>> reach(std::size_t(n) + 1);
  reach[n].push_back(detail::state_key(start));
  for (Budget k = n; k >= 1; --k) {
    std::unordered_set<std::uint64_t> next;
    for (auto key : reach[k]) {
      const GameState s = detail::key_state(key);
      if (terminal_value(variant, s, k)) continue;
      switch (policy.at(s, k)) {
        case Action::toss:
          next.insert(detail::state_key({s.a + 1, s.h}));
          next.insert(detail::state_key({s.a, s.h + 1}));
          break;
        case Action::crush:
          next.insert(detail::state_key({s.a - s.h - 1, 0}));
          break;
        case Action::abandon:
          next.insert(detail::state_key(kOrigin));
          break;
      }
    }
    reach[k - 1].assign(next.begin(), next.end());
  }

  // Backward pass.
  std::unordered_map<std::uint64_t, double> prev;
  for (auto key : reach[0]) prev[key] = 0.0;
  for (Budget k = 1; k <= n; ++k) {
    std::unordered_map<std::uint64_t, double> cur;
    auto lookup = [&prev](GameState s) -> double {
      auto it = prev.find(detail::state_key(s));
      if (it == prev.end()) throw std::logic_error("evaluate_policy: successor not tracked");
      return it->second;
    };
    for (auto key : reach[k]) {
      const GameState s = detail::key_state(key);
      if (auto tv = terminal_value(variant, s, k)) {
        cur[key] = *tv;
      } else {
        cur[key] = action_backup(variant, law.q(), s, policy.at(s, k), lookup);
      }
    }
    prev = std::move(cur);
  }
  return prev.at(detail::state_key(start));
}

}  // namespace chipgame
