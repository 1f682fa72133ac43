#pragma once

// JSON views of the solver results. Field names are part of the CLI
// contract and must stay stable.

#include <nlohmann/json.hpp>

#include "chipgame/game.hpp"
#include "chipgame/montecarlo.hpp"
#include "chipgame/solver.hpp"
#include "chipgame/threshold.hpp"

namespace chipgame {

inline nlohmann::json state_json(GameState s) { return nlohmann::json::array({s.a, s.h}); }

inline nlohmann::json value_json(GameVariant variant, GameState s, Budget n, double q,
                                 double value) {
  return {{"game", to_string(variant)}, {"a", s.a}, {"h", s.h},
          {"n", n}, {"q", q}, {"value", value}};
}

// Entries are [a, h, n, value] in ascending n, then storage order.
inline nlohmann::json to_json(const ValueTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  table.for_each_entry([&](GameState s, Budget n, double v) {
    entries.push_back(nlohmann::json::array({s.a, s.h, n, v}));
  });
  return {{"game", to_string(table.variant())},
          {"q", table.q()},
          {"n_max", table.n_max()},
          {"start", state_json(table.start())},
          {"value", table.value()},
          {"entries", std::move(entries)}};
}

// Choices are [a, h, n, action].
inline nlohmann::json to_json(const Policy& policy) {
  nlohmann::json choices = nlohmann::json::array();
  policy.for_each_choice([&](GameState s, Budget n, Action act) {
    choices.push_back(nlohmann::json::array({s.a, s.h, n, to_string(act)}));
  });
  return {{"game", to_string(policy.variant())},
          {"q", policy.q()},
          {"n_max", policy.n_max()},
          {"start", state_json(policy.start())},
          {"choices", std::move(choices)}};
}

inline nlohmann::json to_json(const SimStats& st) {
  return {{"trials", st.trials}, {"mean", st.mean}, {"stderr", st.std_error},
          {"min", st.min},       {"max", st.max},   {"seed", st.seed}};
}

inline nlohmann::json threshold_json(GameVariant variant, GameState start, Budget n_max,
                                     const std::optional<ThresholdBracket>& bracket) {
  nlohmann::json j = {{"game", to_string(variant)}, {"start", state_json(start)}, {"n_max", n_max}};
  if (!bracket) {
    j["bracket"] = nullptr;
    return j;
  }
  j["q_lo"] = bracket->q_lo;
  j["q_hi"] = bracket->q_hi;
  j["n_star"] = bracket->witness_at_hi.n_star;
  j["value"] = bracket->witness_at_hi.value;
  j["tol"] = bracket->tol;
  return j;
}

}  // namespace chipgame
