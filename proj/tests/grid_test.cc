#include <doctest.h>

#include <cmath>
#include <random>

#include "pflow/grid.h"
#include "test_util.h"

namespace pflow {
namespace {

TEST_CASE("default masks with sharpness 0.8") {
  const MaskSet masks = default_masks(0.8);
  const StencilMask& up = masks[index_of(Action::kUp)];
  CHECK(up.at(-1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(up.at(-1, -1) == doctest::Approx(0.095).epsilon(1e-15));
  CHECK(up.at(-1, 1) == doctest::Approx(0.095).epsilon(1e-15));
  CHECK(up.at(0, 0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(up.at(0, -1) == 0.0);
  CHECK(up.at(0, 1) == 0.0);
  CHECK(up.at(1, -1) == 0.0);
  CHECK(up.at(1, 0) == 0.0);
  CHECK(up.at(1, 1) == 0.0);

  // Down-right flanks are right and down.
  const StencilMask& dr = masks[index_of(Action::kDownRight)];
  CHECK(dr.at(1, 1) == doctest::Approx(0.8));
  CHECK(dr.at(0, 1) == doctest::Approx(0.095));
  CHECK(dr.at(1, 0) == doctest::Approx(0.095));

  for (const StencilMask& m : masks) CHECK(std::abs(m.sum() - 1.0) <= 1e-12);
}

TEST_CASE("still mask is deterministic for any sharpness") {
  for (double k : {0.1, 0.5, 0.8, 1.0}) {
    const StencilMask& still = default_masks(k)[0];
    CHECK(still.at(0, 0) == 1.0);
    CHECK(still.sum() == 1.0);
  }
}

TEST_CASE("sharpness 1 gives deterministic moves") {
  const StencilMask& right = default_masks(1.0)[index_of(Action::kRight)];
  CHECK(right.at(0, 1) == 1.0);
  CHECK(right.sum() == 1.0);
}

TEST_CASE("sharpness outside (0, 1] is rejected") {
  CHECK_THROWS_AS(default_masks(0.0), ParameterError);
  CHECK_THROWS_AS(default_masks(1.2), ParameterError);
  CHECK_THROWS_AS(default_masks(-0.5), ParameterError);
}

TEST_CASE("action matrix") {
  SUBCASE("uniform") {
    const ActionMatrix pa(0.0);
    for (int i = 0; i < kNumActions; ++i)
      for (int j = 0; j < kNumActions; ++j) CHECK(pa(i, j) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  }
  SUBCASE("identity") {
    const ActionMatrix pa(1.0);
    for (int i = 0; i < kNumActions; ++i)
      for (int j = 0; j < kNumActions; ++j) CHECK(pa(i, j) == (i == j ? 1.0 : 0.0));
  }
  SUBCASE("half stiffness") {
    const ActionMatrix pa(0.5);
    CHECK(pa(3, 3) == doctest::Approx(0.5 + 1.0 / 18.0).epsilon(1e-15));
    CHECK(pa(3, 4) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
    for (int i = 0; i < kNumActions; ++i) {
      double row = 0.0;
      for (double v : pa.row(i)) row += v;
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(ActionMatrix(-0.1), ParameterError);
  CHECK_THROWS_AS(ActionMatrix(1.5), ParameterError);
}

TEST_CASE("censoring next to two obstacles renormalises the rest") {
  // Obstacles at the up-left and up neighbours of (1, 1).
  GridMap map(3, 3);
  map.set_obstacle({0, 0});
  map.set_obstacle({0, 1});

  MaskSet masks = default_masks();
  StencilMask custom;
  for (int slot = 0; slot < 9; ++slot) custom.weights[static_cast<std::size_t>(slot)] = (slot + 1) / 45.0;
  masks[index_of(Action::kUp)] = custom;

  const TransitionKernel k = build_kernel(map, masks);
  const StencilMask out = k.stencil({1, 1}, Action::kUp);
  const double p_ul = custom.at(-1, -1);
  const double p_u = custom.at(-1, 0);
  CHECK(out.at(-1, -1) == 0.0);
  CHECK(out.at(-1, 0) == 0.0);
  for (int slot = 0; slot < 9; ++slot) {
    const Displacement d = slot_displacement(slot);
    if ((d.dy == -1 && d.dx == -1) || (d.dy == -1 && d.dx == 0)) continue;
    CHECK(out.weights[static_cast<std::size_t>(slot)] ==
          doctest::Approx(custom.weights[static_cast<std::size_t>(slot)] / (1.0 - p_ul - p_u)).epsilon(1e-14));
  }
}

TEST_CASE("interior cell away from obstacles keeps the mask unchanged") {
  const GridMap map(5, 5);
  const MaskSet masks = default_masks();
  const TransitionKernel k = build_kernel(map, masks);
  for (int a = 0; a < kNumActions; ++a) {
    CHECK(k.stencil({2, 2}, action_from_index(a)).weights == masks[static_cast<std::size_t>(a)].weights);
  }
}

TEST_CASE("corner cell moving up-left keeps only the current cell") {
  const TransitionKernel k = build_kernel(GridMap(4, 4), default_masks(0.8));
  const StencilMask m = k.stencil({0, 0}, Action::kUpLeft);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.sum() == 1.0);
}

TEST_CASE("obstacle cells have all-zero stencils") {
  GridMap map(3, 3);
  map.set_obstacle({1, 1});
  const TransitionKernel k = build_kernel(map, default_masks());
  for (int a = 0; a < kNumActions; ++a) CHECK(k.stencil({1, 1}, action_from_index(a)).sum() == 0.0);
}

TEST_CASE("masks with no weight on reachable cells are degenerate") {
  GridMap map(3, 3);
  map.set_obstacle({0, 1});
  MaskSet masks = default_masks();
  StencilMask only_up;
  only_up.at(-1, 0) = 1.0;
  masks[index_of(Action::kUp)] = only_up;
  CHECK_THROWS_AS(build_kernel(map, masks), KernelDegenerate);
}

TEST_CASE("invalid masks are rejected") {
  MaskSet masks = default_masks();
  masks[2].at(0, 0) += 0.1;
  CHECK_THROWS_AS(build_kernel(GridMap(3, 3), masks), ParameterError);
  masks = default_masks();
  masks[2].at(0, 0) = -0.01;
  masks[2].at(-1, 1) += 0.02;
  CHECK_THROWS_AS(build_kernel(GridMap(3, 3), masks), ParameterError);
}

TEST_CASE("grid map validation") {
  CHECK_THROWS_AS(GridMap(0, 3), ParameterError);
  CHECK_THROWS_AS(GridMap(2, 2, {0, 0, 0}), ParameterError);
  CHECK_THROWS_AS(GridMap(1, 2, {0, 2}), ParameterError);
  const GridMap m(2, 3, {0, 1, 0, 0, 0, 0});
  CHECK(m.blocked({0, 1}));
  CHECK(m.blocked({-1, 0}));
  CHECK(m.blocked({0, 3}));
  CHECK(m.free({1, 2}));
  CHECK(m.free_count() == 5);
}

TEST_CASE("kernel properties on random maps") {
  std::mt19937_64 rng(11);
  const MaskSet masks = default_masks();
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = std::uniform_int_distribution<int>(1, 9)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 9)(rng);
    const GridMap map = testing::random_map(rows, cols, 0.3, rng);
    const TransitionKernel k = build_kernel(map, masks);

    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (int a = 0; a < kNumActions; ++a) {
          const StencilMask m = k.stencil({r, c}, action_from_index(a));
          if (map.blocked({r, c})) {
            CHECK(m.sum() == 0.0);
            continue;
          }
          // Row-stochastic.
          CHECK(std::abs(m.sum() - 1.0) <= 1e-12);
          for (int slot = 0; slot < 9; ++slot) {
            const Displacement d = slot_displacement(slot);
            // Bitwise zero on blocked targets.
            if (map.blocked({r + d.dy, c + d.dx})) CHECK(m.weights[static_cast<std::size_t>(slot)] == 0.0);
            CHECK(m.weights[static_cast<std::size_t>(slot)] >= 0.0);
          }
        }
      }
    }

    // Adding an obstacle never adds nonzero stencil entries.
    const Cell extra = {std::uniform_int_distribution<int>(0, rows - 1)(rng),
                        std::uniform_int_distribution<int>(0, cols - 1)(rng)};
    GridMap denser = map;
    denser.set_obstacle(extra);
    const TransitionKernel k2 = build_kernel(denser, masks);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (int a = 0; a < kNumActions; ++a) {
          const StencilMask before = k.stencil({r, c}, action_from_index(a));
          const StencilMask after = k2.stencil({r, c}, action_from_index(a));
          int nz_before = 0, nz_after = 0;
          for (int slot = 0; slot < 9; ++slot) {
            nz_before += before.weights[static_cast<std::size_t>(slot)] != 0.0;
            nz_after += after.weights[static_cast<std::size_t>(slot)] != 0.0;
          }
          CHECK(nz_after <= nz_before);
        }
      }
    }
  }
}

TEST_CASE("action names round trip") {
  for (int a = 0; a < kNumActions; ++a) CHECK(parse_action(action_name(action_from_index(a))) == action_from_index(a));
  CHECK_THROWS_AS(parse_action("sideways"), ParameterError);
}

}  // namespace
}  // namespace pflow
