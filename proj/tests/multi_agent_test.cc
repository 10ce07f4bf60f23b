#include <doctest.h>

#include <random>
#include <set>
#include <variant>

#include "pflow/multi_agent.h"
#include "pflow/oracle.h"
#include "pflow/scenario_io.h"
#include "test_util.h"

namespace pflow {
namespace {

WorldSpec load_world(const std::string& name) {
  return to_world(parse_scenario_file(testing::read_fixture(name)));
}

bool collision_free(const SimulationResult& r, const GridMap& map) {
  for (const WorldState& w : r.trace) {
    std::set<Cell> seen;
    for (const AgentState& a : w.agents) {
      if (map.blocked(a.cell)) return false;
      if (!seen.insert(a.cell).second) return false;
    }
  }
  return true;
}

int total_waits(const SimulationResult& r) {
  int n = 0;
  for (const WorldState& w : r.trace)
    for (const AgentState& a : w.agents) n += a.waited ? 1 : 0;
  return n;
}

TEST_CASE("dynamic map hides other agents") {
  const GridMap map(3, 3);
  std::vector<AgentSpec> agents(2);
  agents[0] = {1, {0, 0}, {{{2, 2}, 1.0}}};
  agents[1] = {2, {1, 1}, {{{0, 2}, 1.0}}};
  const WorldState w = initial_world(map, agents);
  const GridMap d0 = dynamic_map(w, 0);
  CHECK(d0.blocked({1, 1}));
  CHECK(d0.free({0, 0}));
  const GridMap d1 = dynamic_map(w, 1);
  CHECK(d1.blocked({0, 0}));
  CHECK(d1.free({1, 1}));
}

TEST_CASE("initial world validation") {
  GridMap map(3, 3);
  map.set_obstacle({2, 2});
  std::vector<AgentSpec> agents(2);
  agents[0] = {1, {0, 0}, {{{1, 2}, 1.0}}};
  agents[1] = {2, {0, 0}, {{{2, 0}, 1.0}}};
  CHECK_THROWS_AS(initial_world(map, agents), ParameterError);
  agents[1].start = {2, 2};
  CHECK_THROWS_AS(initial_world(map, agents), ParameterError);
  agents[1].start = {1, 1};
  agents[1].goals = {{{2, 2}, 1.0}};
  CHECK_THROWS_AS(initial_world(map, agents), InvalidGoal);
}

TEST_CASE("agents starting on their goals finish immediately") {
  const GridMap map(4, 4);
  std::vector<AgentSpec> agents(2);
  agents[0] = {1, {0, 0}, {{{0, 0}, 1.0}}};
  agents[1] = {2, {3, 3}, {{{3, 3}, 1.0}}};
  const SimulationResult r = simulate(agents, map, 20);
  CHECK(r.trace.size() == 1);
  CHECK(r.trace.front().all_arrived());
  CHECK_FALSE(r.timed_out);
}

TEST_CASE("narrow passage: both arrive, one waits, no collisions") {
  const WorldSpec spec = load_world("corridor2.scn");
  REQUIRE(spec.agents.size() == 2);
  int bfs_sum = 0;
  for (const AgentSpec& a : spec.agents) {
    const std::vector<Cell> goals{a.goals.front().cell};
    bfs_sum += *oracle::bfs_distance(spec.map, a.start, goals);
  }
  const SimulationResult r = simulate(spec.agents, spec.map, 4 * bfs_sum, spec.schedule, spec.seed);
  CHECK_FALSE(r.timed_out);
  CHECK(r.trace.back().all_arrived());
  CHECK(total_waits(r) >= 1);
  CHECK(collision_free(r, spec.map));
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    CHECK(r.paths[i].reached_goal);
    CHECK(r.paths[i].valid_on(spec.map));
  }
}

TEST_CASE("simulation is deterministic") {
  const WorldSpec spec = load_world("five_agents.scn");
  const SimulationResult a = simulate(spec.agents, spec.map, spec.max_horizon, spec.schedule, spec.seed);
  const SimulationResult b = simulate(spec.agents, spec.map, spec.max_horizon, spec.schedule, spec.seed);
  CHECK(a.trace == b.trace);
  CHECK(a.paths == b.paths);
  CHECK(collision_free(a, spec.map));
  CHECK_FALSE(a.timed_out);
}

TEST_CASE("schedule order changes who waits in the corridor") {
  WorldSpec spec = load_world("corridor2.scn");
  const SimulationResult forward = simulate(spec.agents, spec.map, spec.max_horizon);
  std::swap(spec.agents[0], spec.agents[1]);
  const SimulationResult swapped = simulate(spec.agents, spec.map, spec.max_horizon);
  CHECK_FALSE(swapped.timed_out);
  CHECK(collision_free(swapped, spec.map));

  // Compare per agent id, not per slot.
  auto waits_of = [](const SimulationResult& r, std::size_t slot) {
    int n = 0;
    for (const WorldState& w : r.trace) n += w.agents[slot].waited ? 1 : 0;
    return n;
  };
  const bool same = waits_of(forward, 0) == waits_of(swapped, 1) && waits_of(forward, 1) == waits_of(swapped, 0) &&
                    forward.paths[0] == swapped.paths[1] && forward.paths[1] == swapped.paths[0];
  CHECK_FALSE(same);
}

TEST_CASE("random schedules are seeded") {
  const WorldSpec spec = load_world("five_agents.scn");
  WorldState w = initial_world(spec.map, spec.agents, ScheduleMode::kRandomPermutation, 42);
  const auto order = schedule_order(w);
  CHECK(order == schedule_order(w));
  std::set<std::size_t> ids(order.begin(), order.end());
  CHECK(ids.size() == spec.agents.size());
  const SimulationResult r = simulate(spec.agents, spec.map, 40, ScheduleMode::kRandomPermutation, 42);
  CHECK(r.trace == simulate(spec.agents, spec.map, 40, ScheduleMode::kRandomPermutation, 42).trace);
  CHECK(collision_free(r, spec.map));
}

TEST_CASE("a lone agent follows the greedy plan") {
  std::mt19937_64 rng(4);
  int compared = 0;
  for (int trial = 0; trial < 20 && compared < 8; ++trial) {
    const GridMap map = testing::random_map(10, 10, 0.2, rng);
    if (map.free_count() < 2) continue;
    Scenario sc;
    sc.map = map;
    sc.start = testing::random_free_cell(map, rng);
    sc.goals = {{testing::random_free_cell(map, rng), 1.0}};
    sc.stiffness = trial % 2 ? 0.3 : 0.0;
    Path single;
    try {
      single = greedy_plan(sc);
    } catch (const Unreachable&) {
      continue;
    }
    AgentSpec agent{1, sc.start, sc.goals, sc.sharpness, sc.stiffness};
    const std::vector<AgentSpec> agents{agent};
    const SimulationResult r = simulate(agents, map, 200);
    std::vector<Cell> a, b;
    for (const PathStep& s : single.steps) a.push_back(s.cell);
    for (const PathStep& s : r.paths[0].steps) b.push_back(s.cell);
    CAPTURE(trial);
    CHECK(a == b);
    ++compared;
  }
  CHECK(compared >= 5);
}

TEST_CASE("arrived agents can vanish") {
  // Agent 1 parks on the only gap; agent 2 needs to pass through it.
  GridMap map(3, 5);
  for (int r : {0, 2}) map.set_obstacle({r, 2});
  std::vector<AgentSpec> agents(2);
  agents[0] = {1, {1, 1}, {{{1, 2}, 1.0}}};
  agents[1] = {2, {1, 0}, {{{1, 4}, 1.0}}};
  const SimulationResult stay = simulate(agents, map, 20, ScheduleMode::kFixedOrder, 0, true);
  CHECK(stay.timed_out);
  CHECK_FALSE(stay.paths[1].reached_goal);
  const SimulationResult vanish = simulate(agents, map, 20, ScheduleMode::kFixedOrder, 0, false);
  CHECK_FALSE(vanish.timed_out);
  CHECK(vanish.paths[1].reached_goal);
}

TEST_CASE("schedule names") {
  CHECK(parse_schedule("fixed") == ScheduleMode::kFixedOrder);
  CHECK(parse_schedule("random") == ScheduleMode::kRandomPermutation);
  CHECK_THROWS_AS(parse_schedule("round-robin"), ParameterError);
}

}  // namespace
}  // namespace pflow
