#include "pflow/grid.h"

#include <cmath>
#include <string>

namespace pflow {

namespace {

constexpr std::array<const char*, kNumActions> kActionNames = {
    "still", "up", "up-right", "right", "down-right", "down", "down-left", "left", "up-left",
};

void check_mask(const StencilMask& m, int action) {
  double total = 0.0;
  for (double w : m.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("stencil mask for action " + std::to_string(action) +
                           " has a negative or non-finite weight");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParameterError("stencil mask for action " + std::to_string(action) +
                         " does not sum to 1");
  }
}

}  // namespace

const char* action_name(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action parse_action(std::string_view name) {
  for (int i = 0; i < kNumActions; ++i) {
    if (name == kActionNames[static_cast<std::size_t>(i)]) return action_from_index(i);
  }
  throw ParameterError("unknown action '" + std::string(name) + "'");
}

GridMap::GridMap(int rows, int cols)
    : GridMap(rows, cols,
              std::vector<std::uint8_t>(rows > 0 && cols > 0
                                            ? static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)
                                            : 0,
                                        0)) {}

GridMap::GridMap(int rows, int cols, std::vector<std::uint8_t> mask)
    : rows_(rows), cols_(cols), mask_(std::move(mask)) {
  if (rows <= 0 || cols <= 0) throw ParameterError("grid dimensions must be positive");
  if (mask_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ParameterError("obstacle mask size does not match grid dimensions");
  }
  for (std::uint8_t v : mask_) {
    if (v > 1) throw ParameterError("obstacle mask entries must be 0 or 1");
  }
}

void GridMap::set_obstacle(Cell c, bool obstacle) {
  if (!in_bounds(c)) throw ParameterError("cell outside the grid");
  mask_[index(c)] = obstacle ? 1 : 0;
}

std::size_t GridMap::free_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : mask_) n += v == 0 ? 1 : 0;
  return n;
}

double StencilMask::sum() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

MaskSet default_masks(double sharpness) {
  if (!(sharpness > 0.0 && sharpness <= 1.0)) {
    throw ParameterError("mask sharpness must lie in (0, 1]");
  }
  const double stay = 0.05 * (1.0 - sharpness);
  const double side = (1.0 - sharpness - stay) / 2.0;

  MaskSet masks{};
  masks[0].at(0, 0) = 1.0;
  for (int a = 1; a < kNumActions; ++a) {
    // Flanking directions are the ring neighbours in the 1..8 clockwise order.
    const int left = a == 1 ? 8 : a - 1;
    const int right = a == 8 ? 1 : a + 1;
    const Displacement d = kActionDisplacement[static_cast<std::size_t>(a)];
    const Displacement dl = kActionDisplacement[static_cast<std::size_t>(left)];
    const Displacement dr = kActionDisplacement[static_cast<std::size_t>(right)];
    StencilMask& m = masks[static_cast<std::size_t>(a)];
    m.at(d.dy, d.dx) = sharpness;
    m.at(dl.dy, dl.dx) = side;
    m.at(dr.dy, dr.dx) = side;
    m.at(0, 0) = stay;
  }
  return masks;
}

ActionMatrix::ActionMatrix(double stiffness) : stiffness_(stiffness) {
  if (!(stiffness >= 0.0 && stiffness <= 1.0)) {
    throw ParameterError("motion stiffness must lie in [0, 1]");
  }
  const double off = (1.0 - stiffness) / kNumActions;
  for (int i = 0; i < kNumActions; ++i) {
    for (int j = 0; j < kNumActions; ++j) {
      entries_[static_cast<std::size_t>(i * kNumActions + j)] = (i == j ? stiffness : 0.0) + off;
    }
  }
}

StencilMask TransitionKernel::stencil(Cell source, Action a) const {
  StencilMask m;
  if (!map_.in_bounds(source)) return m;
  const std::size_t s = map_.index(source);
  for (int slot = 0; slot < 9; ++slot) {
    m.weights[static_cast<std::size_t>(slot)] = weight(index_of(a), slot, s);
  }
  return m;
}

double TransitionKernel::probability(Cell source, Action a, Cell target) const {
  if (!map_.in_bounds(source) || !map_.in_bounds(target)) return 0.0;
  const int dy = target.row - source.row;
  const int dx = target.col - source.col;
  if (dy < -1 || dy > 1 || dx < -1 || dx > 1) return 0.0;
  return weight(index_of(a), stencil_slot(dy, dx), map_.index(source));
}

TransitionKernel build_kernel(const GridMap& map, const MaskSet& masks) {
  for (int a = 0; a < kNumActions; ++a) check_mask(masks[static_cast<std::size_t>(a)], a);

  TransitionKernel k;
  k.map_ = map;
  k.weights_.assign(static_cast<std::size_t>(kNumActions) * 9 * map.size(), 0.0);

  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Cell src{r, c};
      if (map.blocked(src)) continue;
      const std::size_t s = map.index(src);
      for (int a = 0; a < kNumActions; ++a) {
        StencilMask m = masks[static_cast<std::size_t>(a)];
        bool censored = false;
        for (int slot = 0; slot < 9; ++slot) {
          const Displacement d = slot_displacement(slot);
          double& w = m.weights[static_cast<std::size_t>(slot)];
          if (w != 0.0 && map.blocked({r + d.dy, c + d.dx})) {
            w = 0.0;
            censored = true;
          }
        }
        if (censored) {
          const double total = m.sum();
          if (total <= 0.0) {
            throw KernelDegenerate("censored stencil at (" + std::to_string(r) + ", " +
                                   std::to_string(c) + ") for action " + action_name(action_from_index(a)) +
                                   " has no mass left");
          }
          for (double& w : m.weights) w /= total;
        }
        for (int slot = 0; slot < 9; ++slot) {
          k.weights_[k.offset(a, slot) + s] = m.weights[static_cast<std::size_t>(slot)];
        }
      }
    }
  }
  return k;
}

}  // namespace pflow
