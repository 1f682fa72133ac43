#pragma once

// Rules of the three chip games played against the bank.
//
// A state (a, h) counts the player's chips (blocks on a secret fork) and the
// bank's chips (official blocks since the fork point). The player spends one
// unit of budget per action:
//
//   Toss     the rigged coin lands Tails with probability q (player +1 chip)
//            or Heads with probability 1-q (bank +1 chip).
//   Crush    only when a > h: the fork overrides the official chain; the bank
//            is cleared and the player keeps a-h-1 chips.
//   Abandon  both sides lose their chips; back to honest mining.
//
// jm1  fork persistence after an accidental fork. Every toss costs q. Reaching
//      a > h ends the game with payout a. Abandon ends the game.
// jm2  zero-connectivity deviant mining under the current difficulty rule.
//      Only Heads costs q. Crush pays (h+1)-q. Crush/Abandon do not end play.
// jm3  as jm2, but orphaned blocks count towards difficulty: Crush pays
//      (1-q)*(h+1).
//
// Everything here is a pure function of its arguments and is templated on the
// scalar so the exact rational oracle replays the same rules.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chipgame {

using Chips = std::uint32_t;
using Budget = std::uint32_t;

enum class GameVariant { jm1, jm2, jm3 };

inline constexpr std::array<GameVariant, 3> kAllVariants = {
    GameVariant::jm1, GameVariant::jm2, GameVariant::jm3};

constexpr std::string_view to_string(GameVariant v) {
  switch (v) {
    case GameVariant::jm1: return "jm1";
    case GameVariant::jm2: return "jm2";
    case GameVariant::jm3: return "jm3";
  }
  return "?";
}

inline std::optional<GameVariant> parse_variant(std::string_view s) {
  for (auto v : kAllVariants) {
    if (s == to_string(v)) return v;
  }
  if (s == "JM1") return GameVariant::jm1;
  if (s == "JM2") return GameVariant::jm2;
  if (s == "JM3") return GameVariant::jm3;
  return std::nullopt;
}

struct GameState {
  Chips a = 0;
  Chips h = 0;

  constexpr Chips total() const { return a + h; }
  constexpr bool player_ahead() const { return a > h; }
  friend constexpr bool operator==(const GameState&, const GameState&) = default;
};

inline constexpr GameState kOrigin{0, 0};

enum class Action { toss, crush, abandon };

constexpr std::string_view to_string(Action act) {
  switch (act) {
    case Action::toss: return "toss";
    case Action::crush: return "crush";
    case Action::abandon: return "abandon";
  }
  return "?";
}

// Small set of actions. Iteration follows the tie-break preference
// crush, abandon, toss.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<Action> acts) {
    for (auto act : acts) insert(act);
  }

  constexpr void insert(Action act) { bits_ |= bit(act); }
  constexpr bool contains(Action act) const { return (bits_ & bit(act)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const {
    return int(contains(Action::toss)) + int(contains(Action::crush)) +
           int(contains(Action::abandon));
  }

  template <class Fn>
  constexpr void for_each(Fn&& fn) const {
    for (auto act : kPreference) {
      if (contains(act)) fn(act);
    }
  }

  static constexpr std::array<Action, 3> kPreference = {
      Action::crush, Action::abandon, Action::toss};

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

 private:
  static constexpr unsigned bit(Action act) { return 1u << static_cast<unsigned>(act); }
  unsigned bits_ = 0;
};

// Coin law: Tails (player wins a chip) with probability q in [0, 1/2).
template <class Scalar>
class BasicTossLaw {
 public:
  explicit BasicTossLaw(Scalar q) : q_(std::move(q)) {
    if (!(q_ >= Scalar(0) && q_ < Scalar(1) / Scalar(2))) {
      throw std::domain_error("q must lie in [0, 0.5)");
    }
    p_ = Scalar(1) - q_;
  }

  const Scalar& q() const { return q_; }
  const Scalar& p() const { return p_; }

 private:
  Scalar q_;
  Scalar p_;
};

using TossLaw = BasicTossLaw<double>;

template <class Scalar>
struct BasicTransition {
  GameState next;
  Scalar reward{};
  Scalar probability{};
  bool terminal = false;
};

using Transition = BasicTransition<double>;

inline ActionSet legal_actions(GameVariant variant, GameState s, Budget n) {
  if (n == 0) return {};
  if (variant == GameVariant::jm1) {
    if (s.player_ahead()) return {};
    return {Action::toss, Action::abandon};
  }
  if (s.player_ahead()) return {Action::crush, Action::toss};
  return {Action::abandon, Action::toss};
}

// Value of states that are not expanded: zero budget everywhere, and the
// payout a when the player is ahead in jm1.
template <class Scalar = double>
std::optional<Scalar> terminal_value(GameVariant variant, GameState s, Budget n) {
  if (n == 0) return Scalar(0);
  if (variant == GameVariant::jm1 && s.player_ahead()) return Scalar(s.a);
  return std::nullopt;
}

// Returns {tails, heads}.
template <class Scalar>
std::array<BasicTransition<Scalar>, 2> toss_transitions(GameVariant variant, GameState s,
                                                        const BasicTossLaw<Scalar>& law) {
  if (variant == GameVariant::jm1 && s.player_ahead()) {
    throw std::invalid_argument("toss: jm1 state with a > h is terminal");
  }
  const Scalar& q = law.q();
  BasicTransition<Scalar> tails{{s.a + 1, s.h}, Scalar(0), q, false};
  BasicTransition<Scalar> heads{{s.a, s.h + 1}, -q, law.p(), false};
  if (variant == GameVariant::jm1) tails.reward = -q;
  return {tails, heads};
}

template <class Scalar>
BasicTransition<Scalar> crush_transition(GameVariant variant, GameState s,
                                         const BasicTossLaw<Scalar>& law) {
  if (variant == GameVariant::jm1) {
    throw std::invalid_argument("crush: not an action of jm1 (a > h is terminal there)");
  }
  if (!s.player_ahead()) throw std::invalid_argument("crush: requires a > h");
  const Scalar& q = law.q();
  const Scalar won = Scalar(s.h + 1);
  Scalar reward = variant == GameVariant::jm2 ? won - q : (Scalar(1) - q) * won;
  return {{s.a - s.h - 1, 0}, std::move(reward), Scalar(1), false};
}

template <class Scalar = double>
BasicTransition<Scalar> abandon_transition(GameVariant variant, GameState s) {
  if (s.player_ahead()) throw std::invalid_argument("abandon: not offered when a > h");
  return {kOrigin, Scalar(0), Scalar(1), variant == GameVariant::jm1};
}

}  // namespace chipgame
