#ifndef PFLOW_SCENARIO_IO_H_
#define PFLOW_SCENARIO_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pflow/multi_agent.h"
#include "pflow/planner.h"

namespace pflow {

// Scenario text format:
//
//   horizon = auto          (integer T, "auto", or "auto:<max T>")
//   kappa = 0.8
//   ---
//   #########
//   #S.....G#
//   #########
//
// Header lines are "key = value" before the "---" separator; blank header
// lines and lines starting with '#' are ignored. Grid glyphs: '#' obstacle,
// '.' free, 'S' start, 'G' goal, '1'-'9' agent starts and 'a'-'i' the
// matching agent goals.
struct ScenarioSettings {
  Horizon horizon;
  double kappa = kDefaultSharpness;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::optional<NullPosteriorPolicy> policy;  // default: abort (single agent), wait (agents)
  ScheduleMode schedule = ScheduleMode::kFixedOrder;
  std::vector<double> weights;                // one per 'G', row-major; empty = uniform
  std::vector<Goal> extra_goals;              // "goals = r,c[:w] ..." entries
  std::optional<Action> start_action;
  bool goal_stop = true;
  bool arrived_block = true;

  friend bool operator==(const ScenarioSettings&, const ScenarioSettings&) = default;
};

struct ScenarioFile {
  ScenarioSettings settings;
  std::vector<std::string> grid;

  bool multi_agent() const;
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

// Throws ParseError naming the offending line (1-based, whole file) and column.
ScenarioFile parse_scenario_file(std::string_view text);
// Canonical text: every header key in a fixed order, then the grid.
std::string serialize_scenario(const ScenarioFile& file);

struct WorldSpec {
  GridMap map;
  std::vector<AgentSpec> agents;  // ordered by agent digit
  int max_horizon = 0;
  ScheduleMode schedule = ScheduleMode::kFixedOrder;
  std::uint64_t seed = 0;
  bool arrived_block = true;
};

inline constexpr int kDefaultWorldHorizon = 200;

Scenario to_scenario(const ScenarioFile& file);
WorldSpec to_world(const ScenarioFile& file);

std::variant<Scenario, WorldSpec> parse_scenario(std::string_view text);

// "t,row,col,action" with a header line.
std::string path_csv(const Path& path);
// Inverse of path_csv. Throws ParseError.
Path parse_path_csv(std::string_view text);

}  // namespace pflow

#endif  // PFLOW_SCENARIO_IO_H_
