#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chipgame/game.hpp"

namespace chipgame {

// Dense storage for every state with a + h <= bound, laid out by diagonal
// (s = a + h), then by h.
template <class T>
class TriangleLayer {
 public:
  TriangleLayer() = default;
  explicit TriangleLayer(Chips bound, const T& fill = T{})
      : bound_(bound), cells_(cell_count(bound), fill) {}

  static constexpr std::size_t cell_count(Chips bound) {
    const std::size_t b = bound;
    return (b + 1) * (b + 2) / 2;
  }

  Chips bound() const { return bound_; }
  bool contains(GameState s) const { return std::size_t(s.a) + s.h <= bound_; }

  T& operator[](GameState s) { return cells_[index(s)]; }
  const T& operator[](GameState s) const { return cells_[index(s)]; }

  std::vector<T>& cells() { return cells_; }
  const std::vector<T>& cells() const { return cells_; }

  const T& at(GameState s) const {
    if (!contains(s)) throw std::out_of_range("state outside stored layer");
    return cells_[index(s)];
  }

  // Visits states in storage order.
  template <class Fn>
  void for_each_state(Fn&& fn) const {
    for (Chips sum = 0; sum <= bound_; ++sum) {
      for (Chips h = 0; h <= sum; ++h) fn(GameState{sum - h, h});
    }
  }

  // Offset of the first state with a + h == sum.
  static constexpr std::size_t diagonal_start(std::size_t sum) { return sum * (sum + 1) / 2; }

 private:
  static std::size_t index(GameState s) {
    return diagonal_start(std::size_t(s.a) + s.h) + s.h;
  }

  Chips bound_ = 0;
  std::vector<T> cells_;
};

}  // namespace chipgame
