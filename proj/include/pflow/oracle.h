#ifndef PFLOW_ORACLE_H_
#define PFLOW_ORACLE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pflow/flow.h"
#include "pflow/grid.h"

// Reference implementations for verification only. Nothing here shares
// message-passing code with flow.cc: the chain is rebuilt as dense matrices
// from TransitionKernel::probability() and the action matrix entries.
namespace pflow::oracle {

inline constexpr std::size_t kMaxDenseDim = 2500;

// Joint state-action chain with index j = cell * n_A + action.
class DenseChain {
 public:
  // Throws ParameterError when N * M * n_A exceeds kMaxDenseDim.
  DenseChain(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
             const StateMarginal& goal);

  std::size_t dim() const { return dim_; }
  std::size_t cells() const { return cells_; }
  // p((s, a) -> (s', a')) = p(s' | s, a) P_A(a, a').
  double transition(std::size_t from, std::size_t to) const { return transition_[from * dim_ + to]; }
  // p(s' | s, a).
  double terminal(std::size_t from, std::size_t cell) const { return terminal_[from * cells_ + cell]; }
  const std::vector<double>& prior() const { return prior_; }
  const std::vector<double>& goal() const { return goal_; }

 private:
  std::size_t cells_;
  std::size_t dim_;
  std::vector<double> transition_;
  std::vector<double> terminal_;
  std::vector<double> prior_;
  std::vector<double> goal_;
};

struct DenseFlow {
  int horizon = 0;
  // Index t - 1 for t = 1..T-1, each of length dim(); *_final have length cells().
  std::vector<std::vector<double>> forward, backward, posterior;
  std::vector<double> forward_final, posterior_final;
  std::vector<bool> backward_dead, posterior_dead;
  bool posterior_final_dead = false;
  // Sum of log normalisers divided out of the backward chain; the
  // unnormalised evidence p(s_T in goal) is exp(log_backward_scale) * <prior, b_1>.
  double log_backward_scale = 0.0;
  double evidence = 0.0;

  double forward_at(int t, std::size_t cell, int action) const {
    return forward[static_cast<std::size_t>(t - 1)][cell * kNumActions + static_cast<std::size_t>(action)];
  }
  double backward_at(int t, std::size_t cell, int action) const {
    return backward[static_cast<std::size_t>(t - 1)][cell * kNumActions + static_cast<std::size_t>(action)];
  }
  double posterior_at(int t, std::size_t cell, int action) const {
    return posterior[static_cast<std::size_t>(t - 1)][cell * kNumActions + static_cast<std::size_t>(action)];
  }
};

// Repeated vector-matrix (forward) and matrix-vector (backward) products with
// every message renormalised to unit mass.
DenseFlow dense_messages(const DenseChain& chain, int horizon);

struct Trajectory {
  std::vector<Cell> cells;       // s_1..s_T
  std::vector<Action> actions;   // a_1..a_{T-1}
  double likelihood = 0.0;       // product form, goal weight not included
};

inline constexpr std::size_t kMaxEnumerationCells = 9;
inline constexpr int kMaxEnumerationHorizon = 4;

// Every positive-likelihood trajectory of length T starting at start.cell and
// ending on one of goal_cells. Throws ParameterError beyond 9 cells or T > 4.
std::vector<Trajectory> enumerate_paths(const TransitionKernel& kernel, const ActionMatrix& pa,
                                        const StartState& start, std::span<const Cell> goal_cells, int horizon);

// Normalised (cell * n_A + action) posterior at slice t (1..T-1) from an
// enumeration, each trajectory weighted by goal(s_T).
std::vector<double> enumeration_posterior(std::span<const Trajectory> trajectories, const StateMarginal& goal,
                                          const GridMap& map, int t);

// 8-connected breadth-first search over free cells; minimum number of moves
// to any of goal_cells, or nullopt.
std::optional<int> bfs_distance(const GridMap& map, Cell start, std::span<const Cell> goal_cells);

}  // namespace pflow::oracle

#endif  // PFLOW_ORACLE_H_
