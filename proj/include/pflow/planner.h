#ifndef PFLOW_PLANNER_H_
#define PFLOW_PLANNER_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pflow/flow.h"
#include "pflow/grid.h"

namespace pflow {

// What the planner does when the posterior at some step has no support.
enum class NullPosteriorPolicy {
  kAbort,          // throw NoFeasiblePath
  kWait,           // stay on the current cell with action still
  kSampleForward,  // draw the next state-action pair from the forward message
};

const char* policy_name(NullPosteriorPolicy p);
NullPosteriorPolicy parse_policy(std::string_view name);

struct Goal {
  Cell cell;
  double weight = 1.0;

  friend bool operator==(const Goal&, const Goal&) = default;
};

inline constexpr int kDefaultMaxHorizon = 1000;

struct Horizon {
  enum class Kind { kFixed, kAutoMin };
  Kind kind = Kind::kAutoMin;
  int value = kDefaultMaxHorizon;  // T for kFixed, the search bound for kAutoMin

  static Horizon fixed(int t) { return {Kind::kFixed, t}; }
  static Horizon auto_min(int max_t = kDefaultMaxHorizon) { return {Kind::kAutoMin, max_t}; }
  friend bool operator==(const Horizon&, const Horizon&) = default;
};

struct Scenario {
  GridMap map;
  Cell start;
  // Unset: the start action is chosen from the t = 1 posterior under a uniform prior.
  std::optional<Action> start_action;
  std::vector<Goal> goals;
  Horizon horizon;
  double sharpness = kDefaultSharpness;
  double stiffness = 0.0;
  std::uint64_t seed = 0;
  NullPosteriorPolicy policy = NullPosteriorPolicy::kAbort;
  // Stop as soon as the chosen cell is a goal cell.
  bool goal_stop = true;

  // Throws ParameterError / InvalidGoal if the start or a goal is blocked, or a weight is not positive.
  void validate() const;
  StartState start_state() const;
};

struct PathStep {
  int t = 0;
  Cell cell;
  Action action = Action::kStill;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct Path {
  std::vector<PathStep> steps;
  bool reached_goal = false;
  int horizon = 0;  // T the path was planned with

  int transitions() const { return steps.empty() ? 0 : static_cast<int>(steps.size()) - 1; }
  // Consecutive cells within Chebyshev distance 1, all cells free, t = 1, 2, ...
  bool valid_on(const GridMap& map) const;

  friend bool operator==(const Path&, const Path&) = default;
};

// Goal weights normalised to sum 1, placed on their cells. Throws InvalidGoal.
StateMarginal goal_marginal(const GridMap& map, std::span<const Goal> goals);

// T for the scenario: the fixed value, or min_time over all goals.
int resolve_horizon(const Scenario& scenario, const TransitionKernel& kernel, const ActionMatrix& pa);

// Greedy argmax path extraction over the precomputed backward flow. Ties go
// to the lowest (row, col, action) index.
Path greedy_plan(const Scenario& scenario);
Path greedy_plan(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
                 const StateMarginal& goal, int horizon,
                 NullPosteriorPolicy policy = NullPosteriorPolicy::kAbort, bool goal_stop = true,
                 std::uint64_t seed = 0);

// Same loop, drawing each state-action pair from the posterior instead.
Path sample_path(const Scenario& scenario);
Path sample_path(const Scenario& scenario, std::uint64_t seed);

// One greedy decision from start: the action to take now and the cell it
// leads to. Empty when the posterior has no support at t = 1 or t = 2.
struct GreedyStep {
  Action action;
  Cell next;
};
std::optional<GreedyStep> greedy_step(const TransitionKernel& kernel, const ActionMatrix& pa,
                                      const StartState& start, const StateMarginal& goal, int horizon);

// log of pi(s1, a1) prod_t P_A(a_t | a_{t-1}) p(s_t | s_{t-1}, a_{t-1}); the
// last step contributes only its state transition. -inf for impossible paths.
double path_likelihood(const Path& path, const Scenario& scenario);
double path_likelihood(const Path& path, const TransitionKernel& kernel, const ActionMatrix& pa,
                       const StartState& start);

}  // namespace pflow

#endif  // PFLOW_PLANNER_H_
