#ifndef PFLOW_MULTI_AGENT_H_
#define PFLOW_MULTI_AGENT_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pflow/grid.h"
#include "pflow/planner.h"

namespace pflow {

enum class ScheduleMode { kFixedOrder, kRandomPermutation };

const char* schedule_name(ScheduleMode m);
ScheduleMode parse_schedule(std::string_view name);

struct AgentSpec {
  int id = 0;
  Cell start;
  std::vector<Goal> goals;
  double sharpness = kDefaultSharpness;
  double stiffness = 0.0;
  // kWait and kAbort both hold position; kSampleForward takes a random move.
  NullPosteriorPolicy policy = NullPosteriorPolicy::kWait;
  // Ids of agents to chase: their free 8-neighbours are added as goals.
  std::vector<int> chase;
};

enum class AgentStatus { kActive, kArrived };

struct AgentState {
  Cell cell;
  Action last_action = Action::kStill;  // action that led to this cell
  AgentStatus status = AgentStatus::kActive;
  bool moved = false;                   // false until the first move
  bool waited = false;                  // this slice was a forced wait

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct WorldState {
  GridMap static_map;
  std::vector<AgentState> agents;  // same order as the AgentSpec list
  int t = 1;
  ScheduleMode schedule = ScheduleMode::kFixedOrder;
  std::uint64_t seed = 0;
  bool arrived_block = true;  // arrived agents stay on the map as obstacles

  bool all_arrived() const;
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Throws ParameterError on blocked or shared start cells, or InvalidGoal.
WorldState initial_world(const GridMap& static_map, std::span<const AgentSpec> agents,
                         ScheduleMode schedule = ScheduleMode::kFixedOrder, std::uint64_t seed = 0,
                         bool arrived_block = true);

// The static map with every other agent's current cell marked as an obstacle.
GridMap dynamic_map(const WorldState& world, std::size_t agent);

// Goal marginal for one agent on its dynamic map; goals covered by other
// agents are dropped. Has no mass when every goal is covered.
StateMarginal agent_goal(const WorldState& world, std::span<const AgentSpec> agents, std::size_t agent,
                         const GridMap& dynamic);

// Order in which agents act at world.t.
std::vector<std::size_t> schedule_order(const WorldState& world);

// Advances every active agent by one greedy step in schedule order. Each agent
// replans on its dynamic map with horizon min_time(...) capped at
// max_horizon - t + 1 and waits when no plan exists.
WorldState step_world(const WorldState& world, std::span<const AgentSpec> agents, int max_horizon);

struct SimulationResult {
  std::vector<WorldState> trace;
  std::vector<Path> paths;  // per agent, truncated at arrival
  bool timed_out = false;
};

SimulationResult simulate(std::span<const AgentSpec> agents, const GridMap& static_map, int max_horizon,
                          ScheduleMode schedule = ScheduleMode::kFixedOrder, std::uint64_t seed = 0,
                          bool arrived_block = true);

}  // namespace pflow

#endif  // PFLOW_MULTI_AGENT_H_
