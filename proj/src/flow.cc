#include "pflow/flow.h"

#include <algorithm>
#include <cstdint>
#include <string>

namespace pflow {

namespace {

using simd::KernelTable;

// Scales x to unit mass. Returns false (leaving x untouched) when x has none.
bool normalize(std::span<double> x, const KernelTable& kt) {
  const double total = kt.sum(x);
  if (!(total > 0.0)) return false;
  kt.scale(x, 1.0 / total);
  return true;
}

void require_shape(const MessageTensor& m, const TransitionKernel& kernel, const char* what) {
  if (m.rows() != kernel.rows() || m.cols() != kernel.cols()) {
    throw ParameterError(std::string(what) + ": tensor shape does not match the kernel's map");
  }
}

// out[a][target] += p(target | source, a) in[a][source] over every stencil slot.
void scatter_planes(std::span<const double> in, std::span<double> out, const TransitionKernel& kernel,
                    const KernelTable& kt) {
  const int rows = kernel.rows();
  const int cols = kernel.cols();
  const std::size_t cells = kernel.cells();
  for (int a = 0; a < kNumActions; ++a) {
    const std::size_t base = static_cast<std::size_t>(a) * cells;
    for (int slot = 0; slot < 9; ++slot) {
      const Displacement d = slot_displacement(slot);
      const std::span<const double> w = kernel.plane(a, slot);
      const int r0 = std::max(0, d.dy), r1 = std::min(rows, rows + d.dy);
      const int c0 = std::max(0, d.dx), c1 = std::min(cols, cols + d.dx);
      if (c1 <= c0) continue;
      const auto n = static_cast<std::size_t>(c1 - c0);
      for (int r = r0; r < r1; ++r) {
        const auto target = static_cast<std::size_t>(r * cols + c0);
        const auto source = static_cast<std::size_t>((r - d.dy) * cols + (c0 - d.dx));
        kt.fma_rows(out.subspan(base + target, n), w.subspan(source, n), in.subspan(base + source, n));
      }
    }
  }
}

// out[a][source] += sum_slot p(source + slot | source, a) in[a][source + slot].
void gather_planes(std::span<const double> in, std::span<double> out, const TransitionKernel& kernel,
                   const KernelTable& kt) {
  const int rows = kernel.rows();
  const int cols = kernel.cols();
  const std::size_t cells = kernel.cells();
  for (int a = 0; a < kNumActions; ++a) {
    const std::size_t base = static_cast<std::size_t>(a) * cells;
    for (int slot = 0; slot < 9; ++slot) {
      const Displacement d = slot_displacement(slot);
      const std::span<const double> w = kernel.plane(a, slot);
      const int r0 = std::max(0, -d.dy), r1 = std::min(rows, rows - d.dy);
      const int c0 = std::max(0, -d.dx), c1 = std::min(cols, cols - d.dx);
      if (c1 <= c0) continue;
      const auto n = static_cast<std::size_t>(c1 - c0);
      for (int r = r0; r < r1; ++r) {
        const auto source = static_cast<std::size_t>(r * cols + c0);
        const auto target = static_cast<std::size_t>((r + d.dy) * cols + (c0 + d.dx));
        kt.fma_rows(out.subspan(base + source, n), w.subspan(source, n), in.subspan(base + target, n));
      }
    }
  }
}

// Same as gather_planes with one shared input plane (a state marginal).
void gather_marginal(std::span<const double> goal, std::span<double> out, const TransitionKernel& kernel,
                     const KernelTable& kt) {
  const int rows = kernel.rows();
  const int cols = kernel.cols();
  const std::size_t cells = kernel.cells();
  for (int a = 0; a < kNumActions; ++a) {
    const std::size_t base = static_cast<std::size_t>(a) * cells;
    for (int slot = 0; slot < 9; ++slot) {
      const Displacement d = slot_displacement(slot);
      const std::span<const double> w = kernel.plane(a, slot);
      const int r0 = std::max(0, -d.dy), r1 = std::min(rows, rows - d.dy);
      const int c0 = std::max(0, -d.dx), c1 = std::min(cols, cols - d.dx);
      if (c1 <= c0) continue;
      const auto n = static_cast<std::size_t>(c1 - c0);
      for (int r = r0; r < r1; ++r) {
        const auto source = static_cast<std::size_t>(r * cols + c0);
        const auto target = static_cast<std::size_t>((r + d.dy) * cols + (c0 + d.dx));
        kt.fma_rows(out.subspan(base + source, n), w.subspan(source, n), goal.subspan(target, n));
      }
    }
  }
}

// out[to] = sum_from coeff(from, to) in[from], one plane per action.
template <typename Coeff>
void mix_actions(std::span<const double> in, std::span<double> out, std::size_t cells, Coeff coeff,
                 const KernelTable& kt) {
  for (int to = 0; to < kNumActions; ++to) {
    std::span<double> dst = out.subspan(static_cast<std::size_t>(to) * cells, cells);
    for (int from = 0; from < kNumActions; ++from) {
      const double c = coeff(from, to);
      if (c == 0.0) continue;
      kt.axpy(dst, c, in.subspan(static_cast<std::size_t>(from) * cells, cells));
    }
  }
}

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace

double MessageTensor::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

std::vector<double> MessageTensor::state_marginal() const {
  std::vector<double> out(cells(), 0.0);
  for (int a = 0; a < kNumActions; ++a) {
    const std::span<const double> p = plane(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  }
  return out;
}

std::array<double, kNumActions> MessageTensor::action_distribution(std::size_t cell) const {
  std::array<double, kNumActions> out{};
  for (int a = 0; a < kNumActions; ++a) out[static_cast<std::size_t>(a)] = at(cell, a);
  return out;
}

double StateMarginal::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

StartState StartState::with_action(Cell c, Action a) {
  StartState s{c, {}};
  s.action_prior[static_cast<std::size_t>(index_of(a))] = 1.0;
  return s;
}

StartState StartState::uniform(Cell c) {
  StartState s{c, {}};
  s.action_prior.fill(1.0 / kNumActions);
  return s;
}

MessageTensor start_message(const StartState& start, const TransitionKernel& kernel) {
  if (kernel.map().blocked(start.cell)) throw ParameterError("start cell is blocked");
  double total = 0.0;
  for (double p : start.action_prior) {
    if (!(p >= 0.0)) throw ParameterError("start action prior has a negative entry");
    total += p;
  }
  if (!(total > 0.0)) throw ParameterError("start action prior has no mass");
  MessageTensor f(kernel.rows(), kernel.cols(), MessageKind::kForward);
  const std::size_t s = kernel.map().index(start.cell);
  for (int a = 0; a < kNumActions; ++a) f.at(s, a) = start.action_prior[static_cast<std::size_t>(a)] / total;
  return f;
}

void check_goal(const StateMarginal& goal, const GridMap& map) {
  if (goal.rows != map.rows() || goal.cols != map.cols() || goal.values.size() != map.size()) {
    throw InvalidGoal("goal marginal shape does not match the map");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < goal.values.size(); ++i) {
    const double v = goal.values[i];
    if (!(v >= 0.0)) throw InvalidGoal("goal marginal has a negative entry");
    if (v > 0.0 && map.mask()[i] != 0) {
      const Cell c = map.cell(i);
      throw InvalidGoal("goal mass on obstacle cell (" + std::to_string(c.row) + ", " +
                        std::to_string(c.col) + ")");
    }
    total += v;
  }
  if (!(total > 0.0)) throw InvalidGoal("goal marginal has no mass");
}

MessageTensor forward_step(const MessageTensor& f_prev, const TransitionKernel& kernel, const ActionMatrix& pa,
                           simd::Isa isa) {
  require_shape(f_prev, kernel, "forward_step");
  if (f_prev.dead() || all_zero(f_prev.values())) throw DeadFlow("forward message has no mass");
  const KernelTable& kt = simd::kernels(isa);

  MessageTensor moved(kernel.rows(), kernel.cols(), MessageKind::kForward);
  scatter_planes(f_prev.values(), moved.values(), kernel, kt);

  MessageTensor out(kernel.rows(), kernel.cols(), MessageKind::kForward);
  mix_actions(moved.values(), out.values(), kernel.cells(), [&](int from, int to) { return pa(from, to); }, kt);
  if (!normalize(out.values(), kt)) throw DeadFlow("forward message lost all mass");
  return out;
}

StateMarginal forward_final(const MessageTensor& f_prev, const TransitionKernel& kernel, simd::Isa isa) {
  require_shape(f_prev, kernel, "forward_final");
  if (f_prev.dead() || all_zero(f_prev.values())) throw DeadFlow("forward message has no mass");
  const KernelTable& kt = simd::kernels(isa);

  MessageTensor moved(kernel.rows(), kernel.cols(), MessageKind::kForward);
  scatter_planes(f_prev.values(), moved.values(), kernel, kt);

  StateMarginal out(kernel.rows(), kernel.cols());
  for (int a = 0; a < kNumActions; ++a) kt.axpy(out.values, 1.0, moved.plane(a));
  if (!normalize(out.values, kt)) throw DeadFlow("final forward marginal lost all mass");
  return out;
}

MessageTensor backward_step(const MessageTensor& b_next, const TransitionKernel& kernel, const ActionMatrix& pa,
                            simd::Isa isa) {
  require_shape(b_next, kernel, "backward_step");
  MessageTensor out(kernel.rows(), kernel.cols(), MessageKind::kBackward);
  if (b_next.dead() || all_zero(b_next.values())) {
    out.set_dead(true);
    return out;
  }
  const KernelTable& kt = simd::kernels(isa);

  // Mix first: h(s, a') = sum_a P_A(a', a) b(s, a), then gather over the stencil of a'.
  MessageTensor mixed(kernel.rows(), kernel.cols(), MessageKind::kBackward);
  mix_actions(b_next.values(), mixed.values(), kernel.cells(), [&](int from, int to) { return pa(to, from); }, kt);
  gather_planes(mixed.values(), out.values(), kernel, kt);
  if (!normalize(out.values(), kt)) out.set_dead(true);
  return out;
}

MessageTensor backward_terminal(const StateMarginal& goal, const TransitionKernel& kernel, simd::Isa isa) {
  check_goal(goal, kernel.map());
  const KernelTable& kt = simd::kernels(isa);
  MessageTensor out(kernel.rows(), kernel.cols(), MessageKind::kBackward);
  gather_marginal(goal.values, out.values(), kernel, kt);
  if (!normalize(out.values(), kt)) out.set_dead(true);
  return out;
}

MessageTensor posterior(const MessageTensor& f, const MessageTensor& b, simd::Isa isa) {
  if (f.rows() != b.rows() || f.cols() != b.cols()) {
    throw ParameterError("posterior: forward and backward shapes differ");
  }
  MessageTensor out(f.rows(), f.cols(), MessageKind::kPosterior);
  if (f.dead() || b.dead()) {
    out.set_dead(true);
    return out;
  }
  const KernelTable& kt = simd::kernels(isa);
  kt.mul(out.values(), f.values(), b.values());
  if (!normalize(out.values(), kt)) out.set_dead(true);
  return out;
}

StateMarginal posterior(const StateMarginal& f, const StateMarginal& b) {
  if (f.rows != b.rows || f.cols != b.cols) throw ParameterError("posterior: marginal shapes differ");
  StateMarginal out(f.rows, f.cols);
  if (f.dead || b.dead) {
    out.dead = true;
    return out;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = f.values[i] * b.values[i];
    total += out.values[i];
  }
  if (total > 0.0) {
    for (double& v : out.values) v /= total;
  } else {
    out.dead = true;
  }
  return out;
}

std::vector<MessageTensor> backward_flow(const StateMarginal& goal, const TransitionKernel& kernel,
                                         const ActionMatrix& pa, int horizon, simd::Isa isa) {
  if (horizon < 2) throw ParameterError("horizon must be at least 2");
  std::vector<MessageTensor> backward(static_cast<std::size_t>(horizon - 1));
  backward.back() = backward_terminal(goal, kernel, isa);
  for (int t = horizon - 2; t >= 1; --t) {
    backward[static_cast<std::size_t>(t - 1)] = backward_step(backward[static_cast<std::size_t>(t)], kernel, pa, isa);
  }
  return backward;
}

FlowSet run_flows(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
                  const StateMarginal& goal, int horizon, simd::Isa isa) {
  if (horizon < 2) throw ParameterError("horizon must be at least 2");
  FlowSet flows;
  flows.horizon = horizon;
  flows.goal = goal;
  flows.backward = backward_flow(goal, kernel, pa, horizon, isa);

  const auto slices = static_cast<std::size_t>(horizon - 1);
  flows.forward.reserve(slices);
  flows.forward.push_back(start_message(start, kernel));
  for (std::size_t t = 1; t < slices; ++t) flows.forward.push_back(forward_step(flows.forward.back(), kernel, pa, isa));
  flows.forward_final = forward_final(flows.forward.back(), kernel, isa);

  flows.posterior.reserve(slices);
  for (std::size_t t = 0; t < slices; ++t) flows.posterior.push_back(posterior(flows.forward[t], flows.backward[t], isa));
  flows.posterior_final = posterior(flows.forward_final, flows.goal);
  return flows;
}

int min_time(const TransitionKernel& kernel, const ActionMatrix& pa, Cell start_cell, const StateMarginal& goal,
             int max_horizon) {
  const GridMap& map = kernel.map();
  if (map.blocked(start_cell)) throw ParameterError("start cell is blocked");
  check_goal(goal, map);

  const std::size_t cells = kernel.cells();
  const std::size_t start = map.index(start_cell);
  if (goal.values[start] > 0.0) return 1;

  const int rows = kernel.rows();
  const int cols = kernel.cols();
  // Boolean image of the backward recursion: reach[a * cells + s] is true iff
  // the backward message at (s, a) is nonzero.
  std::vector<std::uint8_t> reach(cells * kNumActions, 0);
  std::vector<std::uint8_t> next(cells * kNumActions, 0);
  std::vector<std::uint8_t> mixed(cells * kNumActions, 0);

  auto gather = [&](auto source_flag) {
    std::fill(next.begin(), next.end(), std::uint8_t{0});
    for (int a = 0; a < kNumActions; ++a) {
      for (int slot = 0; slot < 9; ++slot) {
        const Displacement d = slot_displacement(slot);
        const std::span<const double> w = kernel.plane(a, slot);
        for (int r = std::max(0, -d.dy); r < std::min(rows, rows - d.dy); ++r) {
          for (int c = std::max(0, -d.dx); c < std::min(cols, cols - d.dx); ++c) {
            const auto s = static_cast<std::size_t>(r * cols + c);
            const auto target = static_cast<std::size_t>((r + d.dy) * cols + (c + d.dx));
            if (w[s] > 0.0 && source_flag(a, target)) next[static_cast<std::size_t>(a) * cells + s] = 1;
          }
        }
      }
    }
  };
  auto start_reached = [&] {
    for (int a = 0; a < kNumActions; ++a) {
      if (next[static_cast<std::size_t>(a) * cells + start]) return true;
    }
    return false;
  };

  gather([&](int, std::size_t target) { return goal.values[target] > 0.0; });
  for (int horizon = 2; horizon <= max_horizon; ++horizon) {
    if (start_reached()) return horizon;
    if (next == reach) break;  // fixed point: support will never change again
    reach.swap(next);
    std::fill(mixed.begin(), mixed.end(), std::uint8_t{0});
    for (int from = 0; from < kNumActions; ++from) {
      for (int to = 0; to < kNumActions; ++to) {
        if (pa(from, to) <= 0.0) continue;
        const std::uint8_t* src = reach.data() + static_cast<std::size_t>(to) * cells;
        std::uint8_t* dst = mixed.data() + static_cast<std::size_t>(from) * cells;
        for (std::size_t s = 0; s < cells; ++s) dst[s] |= src[s];
      }
    }
    gather([&](int a, std::size_t target) { return mixed[static_cast<std::size_t>(a) * cells + target] != 0; });
  }
  throw Unreachable("goal not reachable from (" + std::to_string(start_cell.row) + ", " +
                    std::to_string(start_cell.col) + ") within " + std::to_string(max_horizon) + " time slices");
}

}  // namespace pflow
