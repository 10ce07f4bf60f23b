#ifndef PFLOW_GRID_H_
#define PFLOW_GRID_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pflow/errors.h"

namespace pflow {

// Grid coordinates: row 0 is the top row, "up" decreases the row index.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) {
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr > dc ? dr : dc;
}

// The nine-action alphabet. Directional actions 1..8 go clockwise from "up".
enum class Action : std::uint8_t {
  kStill = 0,
  kUp,
  kUpRight,
  kRight,
  kDownRight,
  kDown,
  kDownLeft,
  kLeft,
  kUpLeft,
};

inline constexpr int kNumActions = 9;

struct Displacement {
  int dy;
  int dx;
};

inline constexpr std::array<Displacement, kNumActions> kActionDisplacement = {{
    {0, 0}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

inline constexpr int index_of(Action a) { return static_cast<int>(a); }
inline constexpr Action action_from_index(int i) { return static_cast<Action>(i); }
inline constexpr Displacement displacement(Action a) {
  return kActionDisplacement[static_cast<std::size_t>(a)];
}
const char* action_name(Action a);
// Parses the names produced by action_name(); throws ParameterError.
Action parse_action(std::string_view name);

// Position of a 3x3 stencil entry for displacement (dy, dx), row-major.
inline constexpr int stencil_slot(int dy, int dx) { return (dy + 1) * 3 + (dx + 1); }
inline constexpr Displacement slot_displacement(int slot) {
  return {slot / 3 - 1, slot % 3 - 1};
}

class GridMap {
 public:
  GridMap() = default;
  // All-free map.
  GridMap(int rows, int cols);
  // mask is row-major, 1 = obstacle. Throws ParameterError on bad shape/values.
  GridMap(int rows, int cols, std::vector<std::uint8_t> mask);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return mask_.size(); }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  // Out-of-bounds cells count as blocked.
  bool blocked(Cell c) const { return !in_bounds(c) || mask_[index(c)] != 0; }
  bool free(Cell c) const { return !blocked(c); }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell(std::size_t index) const {
    return {static_cast<int>(index / static_cast<std::size_t>(cols_)),
            static_cast<int>(index % static_cast<std::size_t>(cols_))};
  }

  void set_obstacle(Cell c, bool obstacle = true);
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::size_t free_count() const;

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> mask_;
};

// 3x3 next-state distribution around the current cell, indexed by stencil_slot().
struct StencilMask {
  std::array<double, 9> weights{};

  double at(int dy, int dx) const { return weights[static_cast<std::size_t>(stencil_slot(dy, dx))]; }
  double& at(int dy, int dx) { return weights[static_cast<std::size_t>(stencil_slot(dy, dx))]; }
  double sum() const;
};

using MaskSet = std::array<StencilMask, kNumActions>;

inline constexpr double kDefaultSharpness = 0.8;

// Directional masks: sharpness on the intended cell, the two flanking neighbours
// share (1 - k - s) / 2, the current cell keeps s = 0.05 (1 - k). "still" is
// deterministic.
MaskSet default_masks(double sharpness = kDefaultSharpness);

// Row-stochastic action transition matrix p(a_t | a_{t-1}).
class ActionMatrix {
 public:
  // stiffness * I + (1 - stiffness) * uniform. Throws ParameterError outside [0, 1].
  explicit ActionMatrix(double stiffness = 0.0);

  double stiffness() const { return stiffness_; }
  double operator()(int from, int to) const {
    return entries_[static_cast<std::size_t>(from * kNumActions + to)];
  }
  std::span<const double, kNumActions> row(int from) const {
    return std::span<const double, kNumActions>(entries_.data() + from * kNumActions, kNumActions);
  }

 private:
  double stiffness_;
  std::array<double, kNumActions * kNumActions> entries_{};
};

inline ActionMatrix action_matrix(double stiffness = 0.0) { return ActionMatrix(stiffness); }

// Obstacle-censored transition model p(s_t | s_{t-1}, a_{t-1}) for one map.
//
// Storage is plane-major: weight(a, slot, source_cell) is contiguous over
// source cells so the flow kernels can stream whole rows.
class TransitionKernel {
 public:
  TransitionKernel() = default;

  const GridMap& map() const { return map_; }
  int rows() const { return map_.rows(); }
  int cols() const { return map_.cols(); }
  std::size_t cells() const { return map_.size(); }

  StencilMask stencil(Cell source, Action a) const;
  double weight(int action, int slot, std::size_t source) const {
    return weights_[offset(action, slot) + source];
  }
  // Contiguous weights over all source cells for one (action, slot).
  std::span<const double> plane(int action, int slot) const {
    return {weights_.data() + offset(action, slot), cells()};
  }
  // Transition probability from source to target under action a.
  double probability(Cell source, Action a, Cell target) const;

 private:
  friend TransitionKernel build_kernel(const GridMap&, const MaskSet&);

  std::size_t offset(int action, int slot) const {
    return (static_cast<std::size_t>(action) * 9 + static_cast<std::size_t>(slot)) * cells();
  }

  GridMap map_;
  std::vector<double> weights_;
};

// Zeroes stencil entries that land on obstacles or outside the grid and
// renormalises the rest. Throws KernelDegenerate when a free cell loses all mass.
TransitionKernel build_kernel(const GridMap& map, const MaskSet& masks);

}  // namespace pflow

#endif  // PFLOW_GRID_H_
