#include "pflow/oracle.h"

#include <cmath>
#include <deque>
#include <string>

namespace pflow::oracle {

namespace {

double normalize(std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  if (total > 0.0) {
    for (double& x : v) x /= total;
  }
  return total;
}

}  // namespace

DenseChain::DenseChain(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
                       const StateMarginal& goal)
    : cells_(kernel.cells()), dim_(kernel.cells() * kNumActions) {
  if (dim_ > kMaxDenseDim) {
    throw ParameterError("dense oracle refuses joint dimension " + std::to_string(dim_));
  }
  const GridMap& map = kernel.map();
  transition_.assign(dim_ * dim_, 0.0);
  terminal_.assign(dim_ * cells_, 0.0);
  for (std::size_t s = 0; s < cells_; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      const std::size_t from = s * kNumActions + static_cast<std::size_t>(a);
      for (std::size_t s2 = 0; s2 < cells_; ++s2) {
        const double p = kernel.probability(map.cell(s), action_from_index(a), map.cell(s2));
        terminal_[from * cells_ + s2] = p;
        for (int a2 = 0; a2 < kNumActions; ++a2) {
          transition_[from * dim_ + s2 * kNumActions + static_cast<std::size_t>(a2)] = p * pa(a, a2);
        }
      }
    }
  }

  prior_.assign(dim_, 0.0);
  double prior_total = 0.0;
  for (double p : start.action_prior) prior_total += p;
  const std::size_t s0 = map.index(start.cell);
  for (int a = 0; a < kNumActions; ++a) {
    prior_[s0 * kNumActions + static_cast<std::size_t>(a)] = start.action_prior[static_cast<std::size_t>(a)] / prior_total;
  }
  goal_ = goal.values;
}

DenseFlow dense_messages(const DenseChain& chain, int horizon) {
  if (horizon < 2) throw ParameterError("dense oracle needs a horizon of at least 2");
  const std::size_t dim = chain.dim();
  const std::size_t cells = chain.cells();
  const auto slices = static_cast<std::size_t>(horizon - 1);

  DenseFlow out;
  out.horizon = horizon;

  out.forward.push_back(chain.prior());
  for (std::size_t t = 1; t < slices; ++t) {
    const std::vector<double>& prev = out.forward.back();
    std::vector<double> next(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (prev[i] == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) next[j] += prev[i] * chain.transition(i, j);
    }
    normalize(next);
    out.forward.push_back(std::move(next));
  }
  out.forward_final.assign(cells, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t s = 0; s < cells; ++s) out.forward_final[s] += out.forward.back()[i] * chain.terminal(i, s);
  }
  normalize(out.forward_final);

  out.backward.assign(slices, std::vector<double>(dim, 0.0));
  out.backward_dead.assign(slices, false);
  {
    std::vector<double>& b = out.backward.back();
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t s = 0; s < cells; ++s) b[i] += chain.terminal(i, s) * chain.goal()[s];
    }
    const double z = normalize(b);
    if (z > 0.0) {
      out.log_backward_scale += std::log(z);
    } else {
      out.backward_dead.back() = true;
    }
  }
  for (std::size_t t = slices - 1; t-- > 0;) {
    const std::vector<double>& next = out.backward[t + 1];
    std::vector<double>& b = out.backward[t];
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < dim; ++j) acc += chain.transition(i, j) * next[j];
      b[i] = acc;
    }
    const double z = normalize(b);
    if (z > 0.0) {
      out.log_backward_scale += std::log(z);
    } else {
      out.backward_dead[t] = true;
    }
  }

  out.posterior.assign(slices, std::vector<double>(dim, 0.0));
  out.posterior_dead.assign(slices, false);
  for (std::size_t t = 0; t < slices; ++t) {
    for (std::size_t i = 0; i < dim; ++i) out.posterior[t][i] = out.forward[t][i] * out.backward[t][i];
    out.posterior_dead[t] = !(normalize(out.posterior[t]) > 0.0);
  }
  out.posterior_final.assign(cells, 0.0);
  for (std::size_t s = 0; s < cells; ++s) out.posterior_final[s] = out.forward_final[s] * chain.goal()[s];
  out.posterior_final_dead = !(normalize(out.posterior_final) > 0.0);

  double dot = 0.0;
  for (std::size_t i = 0; i < dim; ++i) dot += chain.prior()[i] * out.backward.front()[i];
  out.evidence = out.backward_dead.front() ? 0.0 : dot * std::exp(out.log_backward_scale);
  return out;
}

std::vector<Trajectory> enumerate_paths(const TransitionKernel& kernel, const ActionMatrix& pa,
                                        const StartState& start, std::span<const Cell> goal_cells, int horizon) {
  const GridMap& map = kernel.map();
  if (map.size() > kMaxEnumerationCells || horizon > kMaxEnumerationHorizon) {
    throw ParameterError("enumeration oracle is limited to 9 cells and T <= 4");
  }
  if (horizon < 2) throw ParameterError("enumeration needs a horizon of at least 2");
  double prior_total = 0.0;
  for (double p : start.action_prior) prior_total += p;

  std::vector<Trajectory> out;
  Trajectory current;
  current.cells.push_back(start.cell);

  auto is_goal = [&](Cell c) {
    for (Cell g : goal_cells) {
      if (g == c) return true;
    }
    return false;
  };

  // Depth-first over (a_{t}, s_{t+1}) extensions with positive probability.
  auto extend = [&](auto&& self, double lik) -> void {
    const int t = static_cast<int>(current.cells.size());  // slices so far
    const Cell here = current.cells.back();
    if (t == horizon) {
      if (is_goal(here)) {
        current.likelihood = lik;
        out.push_back(current);
      }
      return;
    }
    for (int a = 0; a < kNumActions; ++a) {
      double factor;
      if (t == 1) {
        factor = start.action_prior[static_cast<std::size_t>(a)] / prior_total;
      } else {
        factor = pa(index_of(current.actions.back()), a);
      }
      if (factor == 0.0) continue;
      for (std::size_t s = 0; s < map.size(); ++s) {
        const double p = kernel.probability(here, action_from_index(a), map.cell(s));
        if (p == 0.0) continue;
        current.actions.push_back(action_from_index(a));
        current.cells.push_back(map.cell(s));
        self(self, lik * factor * p);
        current.cells.pop_back();
        current.actions.pop_back();
      }
    }
  };
  extend(extend, 1.0);
  return out;
}

std::vector<double> enumeration_posterior(std::span<const Trajectory> trajectories, const StateMarginal& goal,
                                          const GridMap& map, int t) {
  std::vector<double> out(map.size() * kNumActions, 0.0);
  for (const Trajectory& tr : trajectories) {
    const double w = tr.likelihood * goal.values[map.index(tr.cells.back())];
    const std::size_t i = static_cast<std::size_t>(t - 1);
    out[map.index(tr.cells[i]) * kNumActions + static_cast<std::size_t>(index_of(tr.actions[i]))] += w;
  }
  normalize(out);
  return out;
}

std::optional<int> bfs_distance(const GridMap& map, Cell start, std::span<const Cell> goal_cells) {
  if (map.blocked(start)) return std::nullopt;
  std::vector<std::uint8_t> is_goal(map.size(), 0);
  for (Cell g : goal_cells) {
    if (map.free(g)) is_goal[map.index(g)] = 1;
  }
  std::vector<int> dist(map.size(), -1);
  std::deque<Cell> queue;
  dist[map.index(start)] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[map.index(c)];
    if (is_goal[map.index(c)]) return d;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell n{c.row + dy, c.col + dx};
        if (map.blocked(n) || dist[map.index(n)] >= 0) continue;
        dist[map.index(n)] = d + 1;
        queue.push_back(n);
      }
    }
  }
  return std::nullopt;
}

}  // namespace pflow::oracle
