#include "pflow/multi_agent.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "pflow/flow.h"

namespace pflow {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Vanished agents no longer occupy their cell.
bool on_map(const WorldState& world, std::size_t i) {
  return world.arrived_block || world.agents[i].status != AgentStatus::kArrived;
}

void check_safety(const WorldState& world) {
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    if (world.static_map.blocked(world.agents[i].cell)) {
      throw std::logic_error("agent " + std::to_string(i) + " on a static obstacle");
    }
    for (std::size_t j = i + 1; j < world.agents.size(); ++j) {
      if (!on_map(world, i) || !on_map(world, j)) continue;
      if (world.agents[i].cell == world.agents[j].cell) {
        throw std::logic_error("agents " + std::to_string(i) + " and " + std::to_string(j) + " share a cell");
      }
    }
  }
}

bool on_goal(const StateMarginal& goal, const GridMap& map, Cell c) {
  return goal.values[map.index(c)] > 0.0;
}

// A random move drawn from the one-step forward distribution of start.
AgentState random_move(const AgentState& state, const TransitionKernel& kernel, const StartState& start,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick_action(start.action_prior.begin(), start.action_prior.end());
  const int a = pick_action(rng);
  const StencilMask m = kernel.stencil(state.cell, action_from_index(a));
  std::discrete_distribution<int> pick_slot(m.weights.begin(), m.weights.end());
  const Displacement d = slot_displacement(pick_slot(rng));
  AgentState next = state;
  next.cell = {state.cell.row + d.dy, state.cell.col + d.dx};
  next.last_action = action_from_index(a);
  next.moved = true;
  next.waited = false;
  return next;
}

}  // namespace

const char* schedule_name(ScheduleMode m) {
  return m == ScheduleMode::kFixedOrder ? "fixed" : "random";
}

ScheduleMode parse_schedule(std::string_view name) {
  if (name == "fixed") return ScheduleMode::kFixedOrder;
  if (name == "random") return ScheduleMode::kRandomPermutation;
  throw ParameterError("unknown schedule mode '" + std::string(name) + "'");
}

bool WorldState::all_arrived() const {
  return std::all_of(agents.begin(), agents.end(),
                     [](const AgentState& a) { return a.status == AgentStatus::kArrived; });
}

WorldState initial_world(const GridMap& static_map, std::span<const AgentSpec> agents, ScheduleMode schedule,
                         std::uint64_t seed, bool arrived_block) {
  WorldState world;
  world.static_map = static_map;
  world.schedule = schedule;
  world.seed = seed;
  world.arrived_block = arrived_block;
  for (const AgentSpec& spec : agents) {
    if (static_map.blocked(spec.start)) {
      throw ParameterError("agent " + std::to_string(spec.id) + " starts on a blocked cell");
    }
    for (const AgentState& other : world.agents) {
      if (other.cell == spec.start) throw ParameterError("two agents share a start cell");
    }
    for (const Goal& g : spec.goals) {
      if (static_map.blocked(g.cell)) throw InvalidGoal("goal on obstacle");
      if (!(g.weight > 0.0)) throw InvalidGoal("goal weights must be positive");
    }
    if (spec.goals.empty() && spec.chase.empty()) {
      throw InvalidGoal("agent " + std::to_string(spec.id) + " has no goals");
    }
    world.agents.push_back({spec.start, Action::kStill, AgentStatus::kActive, false, false});
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const GridMap dyn = dynamic_map(world, i);
    const StateMarginal goal = agent_goal(world, agents, i, dyn);
    if (goal.total() > 0.0 && on_goal(goal, dyn, world.agents[i].cell)) world.agents[i].status = AgentStatus::kArrived;
  }
  return world;
}

GridMap dynamic_map(const WorldState& world, std::size_t agent) {
  GridMap map = world.static_map;
  for (std::size_t j = 0; j < world.agents.size(); ++j) {
    if (j == agent) continue;
    if (!world.arrived_block && world.agents[j].status == AgentStatus::kArrived) continue;
    map.set_obstacle(world.agents[j].cell);
  }
  return map;
}

StateMarginal agent_goal(const WorldState& world, std::span<const AgentSpec> agents, std::size_t agent,
                         const GridMap& dynamic) {
  const AgentSpec& spec = agents[agent];
  StateMarginal goal(dynamic.rows(), dynamic.cols());
  std::vector<Goal> live;
  for (const Goal& g : spec.goals) {
    if (dynamic.free(g.cell)) live.push_back(g);
  }
  for (int target : spec.chase) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (agents[j].id != target || j == agent) continue;
      const Cell c = world.agents[j].cell;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{c.row + dy, c.col + dx};
          if ((dy != 0 || dx != 0) && dynamic.free(n)) live.push_back({n, 1.0});
        }
      }
    }
  }
  if (live.empty()) return goal;
  return goal_marginal(dynamic, live);
}

std::vector<std::size_t> schedule_order(const WorldState& world) {
  std::vector<std::size_t> order(world.agents.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (world.schedule == ScheduleMode::kRandomPermutation) {
    std::mt19937_64 rng(mix_seed(world.seed, static_cast<std::uint64_t>(world.t), 0));
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

WorldState step_world(const WorldState& world, std::span<const AgentSpec> agents, int max_horizon) {
  if (agents.size() != world.agents.size()) throw ParameterError("agent list does not match the world");
  if (world.t >= max_horizon) throw ParameterError("world is already at the horizon cap");

  WorldState next = world;
  next.t = world.t + 1;
  for (AgentState& a : next.agents) a.waited = false;
  const int remaining = max_horizon - world.t + 1;

  for (std::size_t i : schedule_order(world)) {
    AgentState& me = next.agents[i];
    if (me.status == AgentStatus::kArrived) {
      me.last_action = Action::kStill;
      continue;
    }
    const AgentSpec& spec = agents[i];
    const GridMap dyn = dynamic_map(next, i);
    const StateMarginal goal = agent_goal(next, agents, i, dyn);

    auto wait = [&] {
      me.last_action = Action::kStill;
      me.waited = true;
    };

    if (goal.total() <= 0.0) {
      wait();
      continue;
    }
    const TransitionKernel kernel = build_kernel(dyn, default_masks(spec.sharpness));
    const ActionMatrix pa(spec.stiffness);
    StartState start = StartState::uniform(me.cell);
    if (me.moved) {
      const auto row = pa.row(index_of(me.last_action));
      std::copy(row.begin(), row.end(), start.action_prior.begin());
    }

    int horizon = 0;
    try {
      horizon = min_time(kernel, pa, me.cell, goal, remaining);
    } catch (const Unreachable&) {
      horizon = 0;
    }
    std::optional<GreedyStep> step;
    if (horizon >= 2) step = greedy_step(kernel, pa, start, goal, horizon);

    if (horizon == 1) {
      me.status = AgentStatus::kArrived;
      me.last_action = Action::kStill;
    } else if (step) {
      if (dyn.blocked(step->next)) throw std::logic_error("planner stepped onto a blocked cell");
      me.cell = step->next;
      me.last_action = step->action;
      me.moved = true;
      if (on_goal(goal, dyn, me.cell)) me.status = AgentStatus::kArrived;
    } else if (spec.policy == NullPosteriorPolicy::kSampleForward) {
      const std::uint64_t s = mix_seed(world.seed, static_cast<std::uint64_t>(world.t), i + 1);
      me = random_move(me, kernel, start, s);
      if (on_goal(goal, dyn, me.cell)) me.status = AgentStatus::kArrived;
    } else {
      wait();
    }
    check_safety(next);
  }
  return next;
}

SimulationResult simulate(std::span<const AgentSpec> agents, const GridMap& static_map, int max_horizon,
                          ScheduleMode schedule, std::uint64_t seed, bool arrived_block) {
  SimulationResult result;
  result.trace.push_back(initial_world(static_map, agents, schedule, seed, arrived_block));
  while (!result.trace.back().all_arrived() && result.trace.back().t < max_horizon) {
    result.trace.push_back(step_world(result.trace.back(), agents, max_horizon));
  }
  result.timed_out = !result.trace.back().all_arrived();

  result.paths.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Path& path = result.paths[i];
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
      const AgentState& here = result.trace[k].agents[i];
      const bool last = k + 1 == result.trace.size();
      const Action action = last ? Action::kStill : result.trace[k + 1].agents[i].last_action;
      path.steps.push_back({static_cast<int>(k) + 1, here.cell, here.status == AgentStatus::kArrived ? Action::kStill : action});
      if (here.status == AgentStatus::kArrived) {
        path.reached_goal = true;
        break;
      }
    }
    path.horizon = static_cast<int>(result.trace.size());
  }
  return result;
}

}  // namespace pflow
