#include "pflow/scenario_io.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <sstream>

namespace pflow {

namespace {

constexpr std::string_view kSeparator = "---";
constexpr std::array<std::string_view, 11> kKeys = {
    "horizon", "kappa", "lambda", "seed", "policy", "schedule",
    "weights", "goals", "start_action", "goal_stop", "arrived",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  // A trailing newline leaves one empty element.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

bool is_agent_digit(char c) { return c >= '1' && c <= '9'; }
bool is_agent_letter(char c) { return c >= 'a' && c <= 'i'; }

struct HeaderLines {
  std::map<std::string, int, std::less<>> line_of;
  int separator = 0;
  int first_grid = 0;
};

Horizon parse_horizon(std::string_view v, int line) {
  if (v == "auto") return Horizon::auto_min();
  if (v.starts_with("auto:")) {
    const auto n = parse_number<int>(v.substr(5));
    if (!n || *n < 1) throw ParseError("bad horizon bound '" + std::string(v) + "'", line);
    return Horizon::auto_min(*n);
  }
  const auto n = parse_number<int>(v);
  if (!n || *n < 1) throw ParseError("bad horizon '" + std::string(v) + "'", line);
  return Horizon::fixed(*n);
}

std::string format_horizon(const Horizon& h) {
  if (h.kind == Horizon::Kind::kFixed) return std::to_string(h.value);
  if (h.value == kDefaultMaxHorizon) return "auto";
  return "auto:" + std::to_string(h.value);
}

bool parse_bool(std::string_view v, int line, std::string_view key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError(std::string(key) + " must be true or false", line);
}

void apply_setting(ScenarioSettings& s, std::string_view key, std::string_view value, int line) {
  const std::string k(key);
  if (key == "horizon") {
    s.horizon = parse_horizon(value, line);
  } else if (key == "kappa") {
    const auto v = parse_number<double>(value);
    if (!v || !(*v > 0.0 && *v <= 1.0)) throw ParseError("kappa must be a number in (0, 1]", line);
    s.kappa = *v;
  } else if (key == "lambda") {
    const auto v = parse_number<double>(value);
    if (!v || !(*v >= 0.0 && *v <= 1.0)) throw ParseError("lambda must be a number in [0, 1]", line);
    s.lambda = *v;
  } else if (key == "seed") {
    const auto v = parse_number<std::uint64_t>(value);
    if (!v) throw ParseError("seed must be an unsigned integer", line);
    s.seed = *v;
  } else if (key == "policy") {
    try {
      s.policy = parse_policy(value);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line);
    }
  } else if (key == "schedule") {
    try {
      s.schedule = parse_schedule(value);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line);
    }
  } else if (key == "weights") {
    s.weights.clear();
    for (std::string_view item : split(value, ',')) {
      const auto w = parse_number<double>(item);
      if (!w || !(*w > 0.0)) throw ParseError("goal weights must be positive numbers", line);
      s.weights.push_back(*w);
    }
  } else if (key == "goals") {
    s.extra_goals.clear();
    std::istringstream in{std::string(value)};
    std::string item;
    while (in >> item) {
      std::string_view spec = item;
      double weight = 1.0;
      if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
        const auto w = parse_number<double>(spec.substr(colon + 1));
        if (!w || !(*w > 0.0)) throw ParseError("bad goal weight in '" + item + "'", line);
        weight = *w;
        spec = spec.substr(0, colon);
      }
      const auto parts = split(spec, ',');
      const auto r = parts.size() == 2 ? parse_number<int>(parts[0]) : std::nullopt;
      const auto c = parts.size() == 2 ? parse_number<int>(parts[1]) : std::nullopt;
      if (!r || !c) throw ParseError("goal entries must look like row,col[:weight]", line);
      s.extra_goals.push_back({{*r, *c}, weight});
    }
  } else if (key == "start_action") {
    try {
      s.start_action = parse_action(value);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line);
    }
  } else if (key == "goal_stop") {
    s.goal_stop = parse_bool(value, line, key);
  } else if (key == "arrived") {
    if (value == "stay") {
      s.arrived_block = true;
    } else if (value == "vanish") {
      s.arrived_block = false;
    } else {
      throw ParseError("arrived must be stay or vanish", line);
    }
  } else {
    throw ParseError("unknown key '" + k + "'", line);
  }
}

// Cross-checks between header and grid.
void validate_file(const ScenarioFile& file, const HeaderLines& lines) {
  const auto& grid = file.grid;
  const int first = lines.first_grid;
  std::optional<Cell> start;
  std::size_t goal_glyphs = 0;
  std::array<std::optional<Cell>, 10> agent_start{};
  std::array<std::optional<Cell>, 10> agent_goal{};
  bool single = false;
  bool multi = false;

  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      const char ch = grid[r][c];
      const int line = first + static_cast<int>(r);
      const int col = static_cast<int>(c) + 1;
      const Cell cell{static_cast<int>(r), static_cast<int>(c)};
      if (ch == 'S') {
        if (start) throw ParseError("duplicate start 'S'", line, col);
        start = cell;
        single = true;
      } else if (ch == 'G') {
        ++goal_glyphs;
        single = true;
      } else if (is_agent_digit(ch)) {
        const auto id = static_cast<std::size_t>(ch - '0');
        if (agent_start[id]) throw ParseError(std::string("duplicate agent start '") + ch + "'", line, col);
        agent_start[id] = cell;
        multi = true;
      } else if (is_agent_letter(ch)) {
        const auto id = static_cast<std::size_t>(ch - 'a' + 1);
        if (!agent_goal[id]) agent_goal[id] = cell;
        multi = true;
      }
      if (single && multi) throw ParseError("single-agent and multi-agent glyphs are mixed", line, col);
    }
  }

  const int rows = static_cast<int>(grid.size());
  const int cols = static_cast<int>(grid.front().size());
  auto header_line = [&](std::string_view key) {
    const auto it = lines.line_of.find(key);
    return it == lines.line_of.end() ? lines.separator : it->second;
  };

  for (const Goal& g : file.settings.extra_goals) {
    if (g.cell.row < 0 || g.cell.row >= rows || g.cell.col < 0 || g.cell.col >= cols) {
      throw ParseError("goal outside the grid", header_line("goals"));
    }
    if (grid[static_cast<std::size_t>(g.cell.row)][static_cast<std::size_t>(g.cell.col)] == '#') {
      throw ParseError("goal on obstacle", header_line("goals"), g.cell.col + 1);
    }
  }

  if (multi) {
    if (!file.settings.extra_goals.empty()) {
      throw ParseError("goals key is only valid for single-agent files", header_line("goals"));
    }
    for (std::size_t id = 1; id <= 9; ++id) {
      if (agent_start[id] && !agent_goal[id]) {
        const Cell c = *agent_start[id];
        throw ParseError("agent " + std::to_string(id) + " has no goal letter", first + c.row, c.col + 1);
      }
      if (agent_goal[id] && !agent_start[id]) {
        const Cell c = *agent_goal[id];
        throw ParseError("goal letter without agent digit", first + c.row, c.col + 1);
      }
    }
    return;
  }
  if (!start) throw ParseError("grid has no start 'S'", lines.separator);
  if (goal_glyphs == 0 && file.settings.extra_goals.empty()) {
    throw ParseError("grid has no goal 'G'", lines.separator);
  }
  if (!file.settings.weights.empty() && file.settings.weights.size() != goal_glyphs) {
    throw ParseError("weights count does not match the number of 'G' cells", header_line("weights"));
  }
}

GridMap grid_to_map(const std::vector<std::string>& grid) {
  const int rows = static_cast<int>(grid.size());
  const int cols = static_cast<int>(grid.front().size());
  std::vector<std::uint8_t> mask;
  mask.reserve(static_cast<std::size_t>(rows * cols));
  for (const std::string& row : grid) {
    for (char ch : row) mask.push_back(ch == '#' ? 1 : 0);
  }
  return GridMap(rows, cols, std::move(mask));
}

}  // namespace

bool ScenarioFile::multi_agent() const {
  for (const std::string& row : grid) {
    for (char ch : row) {
      if (is_agent_digit(ch)) return true;
    }
  }
  return false;
}

ScenarioFile parse_scenario_file(std::string_view text) {
  const std::vector<std::string_view> lines = split_lines(text);
  ScenarioFile file;
  HeaderLines where;

  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const std::string_view l = trim(lines[i]);
    if (l == kSeparator) {
      where.separator = line;
      break;
    }
    if (l.empty() || l.front() == '#') continue;  // blank or comment
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string_view key = trim(l.substr(0, eq));
    const std::string_view value = trim(l.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ParseError("unknown key '" + std::string(key) + "'", line);
    }
    if (where.line_of.contains(key)) throw ParseError("duplicate key '" + std::string(key) + "'", line);
    where.line_of.emplace(std::string(key), line);
    apply_setting(file.settings, key, value, line);
  }
  if (where.separator == 0) {
    throw ParseError("missing '---' separator", static_cast<int>(lines.size()) + 1);
  }

  std::size_t end = lines.size();
  while (end > i + 1 && trim(lines[end - 1]).empty()) --end;
  where.first_grid = static_cast<int>(i) + 2;
  for (std::size_t k = i + 1; k < end; ++k) {
    const int line = static_cast<int>(k) + 1;
    const std::string_view row = lines[k];
    for (std::size_t c = 0; c < row.size(); ++c) {
      const char ch = row[c];
      if (ch != '#' && ch != '.' && ch != 'S' && ch != 'G' && !is_agent_digit(ch) && !is_agent_letter(ch)) {
        throw ParseError(std::string("unexpected grid character '") + ch + "'", line, static_cast<int>(c) + 1);
      }
    }
    if (!file.grid.empty() && row.size() != file.grid.front().size()) {
      throw ParseError("ragged grid: expected " + std::to_string(file.grid.front().size()) + " columns, got " +
                           std::to_string(row.size()),
                       line, static_cast<int>(std::min(row.size(), file.grid.front().size())) + 1);
    }
    if (row.empty()) throw ParseError("empty grid row", line);
    file.grid.emplace_back(row);
  }
  if (file.grid.empty()) throw ParseError("grid is empty", where.separator);

  validate_file(file, where);
  return file;
}

std::string serialize_scenario(const ScenarioFile& file) {
  const ScenarioSettings& s = file.settings;
  std::string out;
  out += "horizon = " + format_horizon(s.horizon) + "\n";
  out += "kappa = " + format_double(s.kappa) + "\n";
  out += "lambda = " + format_double(s.lambda) + "\n";
  out += "seed = " + std::to_string(s.seed) + "\n";
  if (s.policy) out += std::string("policy = ") + policy_name(*s.policy) + "\n";
  out += std::string("schedule = ") + schedule_name(s.schedule) + "\n";
  if (!s.weights.empty()) {
    out += "weights = ";
    for (std::size_t k = 0; k < s.weights.size(); ++k) out += (k ? "," : "") + format_double(s.weights[k]);
    out += "\n";
  }
  if (!s.extra_goals.empty()) {
    out += "goals =";
    for (const Goal& g : s.extra_goals) {
      out += " " + std::to_string(g.cell.row) + "," + std::to_string(g.cell.col) + ":" + format_double(g.weight);
    }
    out += "\n";
  }
  if (s.start_action) out += std::string("start_action = ") + action_name(*s.start_action) + "\n";
  out += std::string("goal_stop = ") + (s.goal_stop ? "true" : "false") + "\n";
  out += std::string("arrived = ") + (s.arrived_block ? "stay" : "vanish") + "\n";
  out += "---\n";
  for (const std::string& row : file.grid) out += row + "\n";
  return out;
}

Scenario to_scenario(const ScenarioFile& file) {
  if (file.multi_agent()) throw ParameterError("file describes multiple agents");
  const ScenarioSettings& s = file.settings;
  Scenario sc;
  sc.map = grid_to_map(file.grid);
  std::size_t goal_index = 0;
  for (std::size_t r = 0; r < file.grid.size(); ++r) {
    for (std::size_t c = 0; c < file.grid[r].size(); ++c) {
      const Cell cell{static_cast<int>(r), static_cast<int>(c)};
      if (file.grid[r][c] == 'S') sc.start = cell;
      if (file.grid[r][c] == 'G') {
        const double w = s.weights.empty() ? 1.0 : s.weights[goal_index];
        sc.goals.push_back({cell, w});
        ++goal_index;
      }
    }
  }
  for (const Goal& g : s.extra_goals) sc.goals.push_back(g);
  sc.start_action = s.start_action;
  sc.horizon = s.horizon;
  sc.sharpness = s.kappa;
  sc.stiffness = s.lambda;
  sc.seed = s.seed;
  sc.policy = s.policy.value_or(NullPosteriorPolicy::kAbort);
  sc.goal_stop = s.goal_stop;
  sc.validate();
  return sc;
}

WorldSpec to_world(const ScenarioFile& file) {
  if (!file.multi_agent()) throw ParameterError("file does not describe multiple agents");
  const ScenarioSettings& s = file.settings;
  WorldSpec w;
  w.map = grid_to_map(file.grid);
  if (s.horizon.kind == Horizon::Kind::kFixed || s.horizon.value != kDefaultMaxHorizon) {
    w.max_horizon = s.horizon.value;
  } else {
    w.max_horizon = kDefaultWorldHorizon;
  }
  w.schedule = s.schedule;
  w.seed = s.seed;
  w.arrived_block = s.arrived_block;

  std::array<std::optional<AgentSpec>, 10> agents{};
  for (std::size_t r = 0; r < file.grid.size(); ++r) {
    for (std::size_t c = 0; c < file.grid[r].size(); ++c) {
      const char ch = file.grid[r][c];
      const Cell cell{static_cast<int>(r), static_cast<int>(c)};
      std::size_t id = 0;
      if (is_agent_digit(ch)) id = static_cast<std::size_t>(ch - '0');
      if (is_agent_letter(ch)) id = static_cast<std::size_t>(ch - 'a' + 1);
      if (id == 0) continue;
      if (!agents[id]) {
        agents[id] = AgentSpec{};
        agents[id]->id = static_cast<int>(id);
        agents[id]->sharpness = s.kappa;
        agents[id]->stiffness = s.lambda;
        agents[id]->policy = s.policy.value_or(NullPosteriorPolicy::kWait);
      }
      if (is_agent_digit(ch)) agents[id]->start = cell;
      if (is_agent_letter(ch)) agents[id]->goals.push_back({cell, 1.0});
    }
  }
  for (auto& a : agents) {
    if (a) w.agents.push_back(std::move(*a));
  }
  return w;
}

std::variant<Scenario, WorldSpec> parse_scenario(std::string_view text) {
  const ScenarioFile file = parse_scenario_file(text);
  if (file.multi_agent()) return to_world(file);
  return to_scenario(file);
}

std::string path_csv(const Path& path) {
  std::string out = "t,row,col,action\n";
  for (const PathStep& s : path.steps) {
    out += std::to_string(s.t) + "," + std::to_string(s.cell.row) + "," + std::to_string(s.cell.col) + "," +
           action_name(s.action) + "\n";
  }
  return out;
}

Path parse_path_csv(std::string_view text) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != "t,row,col,action") {
    throw ParseError("expected header 't,row,col,action'", 1);
  }
  Path path;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 4) throw ParseError("expected 4 fields", line);
    const auto t = parse_number<int>(fields[0]);
    const auto r = parse_number<int>(fields[1]);
    const auto c = parse_number<int>(fields[2]);
    if (!t || !r || !c) throw ParseError("bad number", line);
    Action a;
    try {
      a = parse_action(fields[3]);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line);
    }
    path.steps.push_back({*t, {*r, *c}, a});
  }
  path.horizon = static_cast<int>(path.steps.size());
  return path;
}

}  // namespace pflow
