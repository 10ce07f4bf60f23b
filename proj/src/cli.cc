#include "pflow/cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "pflow/flow.h"
#include "pflow/multi_agent.h"
#include "pflow/planner.h"
#include "pflow/render.h"
#include "pflow/scenario_io.h"

namespace pflow {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string file;
  std::optional<int> horizon;
  std::optional<std::string> policy;
  std::string format = "ascii";
  std::string out_dir;
  int samples = 1;
  std::optional<std::uint64_t> seed;
};

// Raised for bad input files or flags; maps to the usage exit code.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << contents;
}

fs::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out-dir is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create '" + dir + "': " + ec.message());
  return fs::path(dir);
}

std::string frame_name(const char* kind, int t, FrameFormat format) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_t%03d.%s", kind, t, format_extension(format));
  return buf;
}

ScenarioFile load(const Options& opt) {
  ScenarioFile file = parse_scenario_file(read_file(opt.file));
  if (opt.horizon) {
    if (*opt.horizon < 1) throw UsageError("--horizon must be positive");
    file.settings.horizon = Horizon::fixed(*opt.horizon);
  }
  if (opt.policy) {
    try {
      file.settings.policy = parse_policy(*opt.policy);
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
  }
  if (opt.seed) file.settings.seed = *opt.seed;
  return file;
}

Scenario load_single(const Options& opt) {
  const ScenarioFile file = load(opt);
  if (file.multi_agent()) throw UsageError("this subcommand needs a single-agent scenario (S/G)");
  return to_scenario(file);
}

int cmd_plan(const Options& opt, std::ostream& out) {
  out << path_csv(greedy_plan(load_single(opt)));
  return kExitOk;
}

int cmd_mintime(const Options& opt, std::ostream& out) {
  Scenario sc = load_single(opt);
  const TransitionKernel kernel = build_kernel(sc.map, default_masks(sc.sharpness));
  const ActionMatrix pa(sc.stiffness);
  const int bound = sc.horizon.value;
  out << min_time(kernel, pa, sc.start, goal_marginal(sc.map, sc.goals), bound) << "\n";
  return kExitOk;
}

int cmd_flows(const Options& opt, std::ostream& out) {
  const Scenario sc = load_single(opt);
  const FrameFormat format = parse_format(opt.format);
  const fs::path dir = prepare_dir(opt.out_dir);
  const TransitionKernel kernel = build_kernel(sc.map, default_masks(sc.sharpness));
  const ActionMatrix pa(sc.stiffness);
  const int horizon = resolve_horizon(sc, kernel, pa);
  if (horizon < 2) throw UsageError("flows need a horizon of at least 2");
  const FlowSet flows = run_flows(kernel, pa, sc.start_state(), goal_marginal(sc.map, sc.goals), horizon);

  int files = 0;
  for (int t = 1; t < horizon; ++t) {
    write_file(dir / frame_name("forward", t, format), render_frame(flows.forward_at(t), sc.map, format));
    write_file(dir / frame_name("backward", t, format), render_frame(flows.backward_at(t), sc.map, format));
    write_file(dir / frame_name("posterior", t, format), render_frame(flows.posterior_at(t), sc.map, format));
    files += 3;
  }
  write_file(dir / frame_name("forward", horizon, format), render_frame(flows.forward_final, sc.map, format));
  write_file(dir / frame_name("backward", horizon, format), render_frame(flows.goal, sc.map, format));
  write_file(dir / frame_name("posterior", horizon, format), render_frame(flows.posterior_final, sc.map, format));
  files += 3;
  out << "horizon " << horizon << ", wrote " << files << " frames to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sample(const Options& opt, std::ostream& out) {
  const Scenario sc = load_single(opt);
  if (opt.samples < 1) throw UsageError("--n must be positive");
  out << "sample,t,row,col,action\n";
  for (int k = 0; k < opt.samples; ++k) {
    const Path p = sample_path(sc, sc.seed + static_cast<std::uint64_t>(k));
    for (const PathStep& s : p.steps) {
      out << k << "," << s.t << "," << s.cell.row << "," << s.cell.col << "," << action_name(s.action) << "\n";
    }
  }
  return kExitOk;
}

std::string world_frame(const WorldState& w, const WorldSpec& spec) {
  std::vector<std::string> rows(static_cast<std::size_t>(w.static_map.rows()));
  for (int r = 0; r < w.static_map.rows(); ++r) {
    for (int c = 0; c < w.static_map.cols(); ++c) rows[static_cast<std::size_t>(r)] += w.static_map.blocked({r, c}) ? '#' : '.';
  }
  for (const AgentSpec& a : spec.agents) {
    for (const Goal& g : a.goals) {
      rows[static_cast<std::size_t>(g.cell.row)][static_cast<std::size_t>(g.cell.col)] = static_cast<char>('a' + a.id - 1);
    }
  }
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    if (!w.arrived_block && w.agents[i].status == AgentStatus::kArrived) continue;  // vanished
    const Cell c = w.agents[i].cell;
    rows[static_cast<std::size_t>(c.row)][static_cast<std::size_t>(c.col)] = static_cast<char>('0' + spec.agents[i].id);
  }
  std::string out;
  for (const std::string& r : rows) out += r + "\n";
  return out;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const ScenarioFile file = load(opt);
  if (!file.multi_agent()) throw UsageError("simulate needs a multi-agent scenario (digits and letters)");
  const WorldSpec spec = to_world(file);
  const fs::path dir = prepare_dir(opt.out_dir);
  const SimulationResult result =
      simulate(spec.agents, spec.map, spec.max_horizon, spec.schedule, spec.seed, spec.arrived_block);

  std::string trace = "t,agent,row,col,action,status,waited\n";
  for (const WorldState& w : result.trace) {
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
      const AgentState& a = w.agents[i];
      trace += std::to_string(w.t) + "," + std::to_string(spec.agents[i].id) + "," + std::to_string(a.cell.row) +
               "," + std::to_string(a.cell.col) + "," + action_name(a.last_action) + "," +
               (a.status == AgentStatus::kArrived ? "arrived" : "active") + "," + (a.waited ? "1" : "0") + "\n";
    }
    write_file(dir / frame_name("world", w.t, FrameFormat::kAscii), world_frame(w, spec));
  }
  write_file(dir / "trace.csv", trace);
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    write_file(dir / ("agent_" + std::to_string(spec.agents[i].id) + ".csv"), path_csv(result.paths[i]));
  }

  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    int waits = 0;
    for (const WorldState& w : result.trace) waits += w.agents[i].waited ? 1 : 0;
    const Path& p = result.paths[i];
    out << "agent " << spec.agents[i].id << ": "
        << (p.reached_goal ? "arrived at t=" + std::to_string(p.steps.back().t) : std::string("did not arrive"))
        << ", waits=" << waits << "\n";
  }
  if (result.timed_out) {
    err << "timed out: not every agent arrived within " << spec.max_horizon << " time slices\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid path planning with forward/backward probability flows", "pflow"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "Scenario file")->required();
    sub->add_option("--horizon", opt.horizon, "Override the header horizon with a fixed T");
    sub->add_option("--policy", opt.policy, "Null-posterior policy: abort, wait or sample");
    sub->add_option("--format", opt.format, "Frame format: ascii or pixmap");
  };

  CLI::App* plan = app.add_subcommand("plan", "Greedy path as CSV on stdout");
  add_common(plan);
  CLI::App* mintime = app.add_subcommand("mintime", "Print the minimum horizon");
  add_common(mintime);
  CLI::App* flows = app.add_subcommand("flows", "Write forward/backward/posterior frames");
  add_common(flows);
  flows->add_option("--out-dir", opt.out_dir, "Output directory")->required();
  CLI::App* sample = app.add_subcommand("sample", "Sample paths from the posterior");
  add_common(sample);
  sample->add_option("--n", opt.samples, "Number of paths");
  sample->add_option("--seed", opt.seed, "Base seed (path k uses seed + k)");
  CLI::App* sim = app.add_subcommand("simulate", "Run the multi-agent simulation");
  add_common(sim);
  sim->add_option("--out-dir", opt.out_dir, "Output directory")->required();
  sim->add_option("--seed", opt.seed, "Seed for random schedules");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return cmd_plan(opt, out);
    if (mintime->parsed()) return cmd_mintime(opt, out);
    if (flows->parsed()) return cmd_flows(opt, out);
    if (sample->parsed()) return cmd_sample(opt, out);
    if (sim->parsed()) return cmd_simulate(opt, out, err);
  } catch (const NoFeasiblePath& e) {
    err << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Unreachable& e) {
    err << "unreachable: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const DeadFlow& e) {
    err << "no feasible path: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pflow
