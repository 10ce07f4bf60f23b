#include "pflow/planner.h"

#include <cmath>
#include <limits>
#include <string>

namespace pflow {

namespace {

// A chosen state-action pair.
struct Choice {
  std::size_t cell;
  int action;
};

// Picks a pair from a nonnegative tensor in (row, col, action) order.
class Chooser {
 public:
  // Greedy chooser.
  Chooser() = default;
  // Sampling chooser.
  explicit Chooser(std::uint64_t seed) : sampling_(true), rng_(seed) {}

  Choice pick(const MessageTensor& m) {
    if (!sampling_) return argmax(m);
    return draw(m);
  }
  std::size_t pick(const StateMarginal& m) { return sampling_ ? draw(m) : argmax(m); }

  // Draw used by the sample-forward null policy, regardless of mode.
  Choice draw(const MessageTensor& m) {
    double total = 0.0;
    for (double v : m.values()) total += v;
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng_);
    double acc = 0.0;
    Choice last{0, 0};
    for (std::size_t s = 0; s < m.cells(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        const double v = m.at(s, a);
        if (v <= 0.0) continue;
        acc += v;
        last = {s, a};
        if (acc > target) return last;
      }
    }
    return last;  // rounding left target at the very top: take the last supported pair
  }

  std::size_t draw(const StateMarginal& m) {
    const double total = m.total();
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng_);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t s = 0; s < m.values.size(); ++s) {
      if (m.values[s] <= 0.0) continue;
      acc += m.values[s];
      last = s;
      if (acc > target) return s;
    }
    return last;
  }

  static Choice argmax(const MessageTensor& m) {
    Choice best{0, 0};
    double best_value = -1.0;
    for (std::size_t s = 0; s < m.cells(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        const double v = m.at(s, a);
        if (v > best_value) {
          best_value = v;
          best = {s, a};
        }
      }
    }
    return best;
  }

  static std::size_t argmax(const StateMarginal& m) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < m.values.size(); ++s) {
      if (m.values[s] > m.values[best]) best = s;
    }
    return best;
  }

 private:
  bool sampling_ = false;
  std::mt19937_64 rng_{0};
};

MessageTensor delta(const TransitionKernel& kernel, std::size_t cell, int action) {
  MessageTensor f(kernel.rows(), kernel.cols(), MessageKind::kForward);
  f.at(cell, action) = 1.0;
  return f;
}

bool is_goal(const StateMarginal& goal, std::size_t cell) { return goal.values[cell] > 0.0; }

[[noreturn]] void no_path(int t) {
  throw NoFeasiblePath("no feasible path: posterior has no support at t = " + std::to_string(t));
}

// G-algorithm loop shared by greedy and sampled extraction.
Path extract(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
             const StateMarginal& goal, int horizon, NullPosteriorPolicy policy, bool goal_stop,
             Chooser& chooser, Chooser& fallback) {
  const GridMap& map = kernel.map();
  check_goal(goal, map);
  if (map.blocked(start.cell)) throw ParameterError("start cell is blocked");
  if (horizon < 1) throw ParameterError("horizon must be at least 1");

  Path path;
  path.horizon = horizon;
  const std::size_t s1 = map.index(start.cell);

  if (horizon == 1 || (goal_stop && is_goal(goal, s1))) {
    if (!is_goal(goal, s1) && policy == NullPosteriorPolicy::kAbort) no_path(1);
    path.steps.push_back({1, start.cell, Action::kStill});
    path.reached_goal = is_goal(goal, s1);
    return path;
  }

  const std::vector<MessageTensor> backward = backward_flow(goal, kernel, pa, horizon);

  // Steps (c), (e), (f) at t = 1: instantiate the start with the most
  // supported action under the start prior.
  const MessageTensor f1 = start_message(start, kernel);
  Choice current;
  {
    const MessageTensor p1 = posterior(f1, backward.front());
    if (!p1.dead()) {
      current = chooser.pick(p1);
    } else if (policy == NullPosteriorPolicy::kAbort) {
      no_path(1);
    } else if (policy == NullPosteriorPolicy::kWait) {
      current = {s1, index_of(Action::kStill)};
    } else {
      current = fallback.draw(f1);
    }
  }
  path.steps.push_back({1, map.cell(current.cell), action_from_index(current.action)});

  // Steps (d)-(h).
  for (int t = 2; t < horizon; ++t) {
    const MessageTensor f = forward_step(delta(kernel, current.cell, current.action), kernel, pa);
    const MessageTensor p = posterior(f, backward[static_cast<std::size_t>(t - 1)]);
    if (!p.dead()) {
      current = chooser.pick(p);
    } else if (policy == NullPosteriorPolicy::kAbort) {
      no_path(t);
    } else if (policy == NullPosteriorPolicy::kWait) {
      current = {current.cell, index_of(Action::kStill)};
    } else {
      current = fallback.draw(f);
    }
    if (goal_stop && is_goal(goal, current.cell)) {
      path.steps.push_back({t, map.cell(current.cell), Action::kStill});
      path.reached_goal = true;
      return path;
    }
    path.steps.push_back({t, map.cell(current.cell), action_from_index(current.action)});
  }

  // Final slice: states only.
  const StateMarginal f_final = forward_final(delta(kernel, current.cell, current.action), kernel);
  const StateMarginal p_final = posterior(f_final, goal);
  std::size_t last;
  if (!p_final.dead) {
    last = chooser.pick(p_final);
  } else if (policy == NullPosteriorPolicy::kAbort) {
    no_path(horizon);
  } else if (policy == NullPosteriorPolicy::kWait) {
    last = current.cell;
  } else {
    last = fallback.draw(f_final);
  }
  path.steps.push_back({horizon, map.cell(last), Action::kStill});
  path.reached_goal = is_goal(goal, last);
  return path;
}

}  // namespace

const char* policy_name(NullPosteriorPolicy p) {
  switch (p) {
    case NullPosteriorPolicy::kAbort:
      return "abort";
    case NullPosteriorPolicy::kWait:
      return "wait";
    case NullPosteriorPolicy::kSampleForward:
      return "sample";
  }
  return "abort";
}

NullPosteriorPolicy parse_policy(std::string_view name) {
  if (name == "abort") return NullPosteriorPolicy::kAbort;
  if (name == "wait") return NullPosteriorPolicy::kWait;
  if (name == "sample") return NullPosteriorPolicy::kSampleForward;
  throw ParameterError("unknown null-posterior policy '" + std::string(name) + "'");
}

void Scenario::validate() const {
  if (map.blocked(start)) throw ParameterError("start cell is blocked");
  if (goals.empty()) throw InvalidGoal("scenario has no goals");
  for (const Goal& g : goals) {
    if (map.blocked(g.cell)) throw InvalidGoal("goal on obstacle");
    if (!(g.weight > 0.0)) throw InvalidGoal("goal weights must be positive");
  }
  if (horizon.value < 1) throw ParameterError("horizon must be at least 1");
}

StartState Scenario::start_state() const {
  return start_action ? StartState::with_action(start, *start_action) : StartState::uniform(start);
}

bool Path::valid_on(const GridMap& map) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].t != static_cast<int>(i) + 1) return false;
    if (map.blocked(steps[i].cell)) return false;
    if (i > 0 && chebyshev(steps[i - 1].cell, steps[i].cell) > 1) return false;
  }
  return true;
}

StateMarginal goal_marginal(const GridMap& map, std::span<const Goal> goals) {
  if (goals.empty()) throw InvalidGoal("no goals given");
  StateMarginal m(map.rows(), map.cols());
  double total = 0.0;
  for (const Goal& g : goals) {
    if (map.blocked(g.cell)) throw InvalidGoal("goal on obstacle");
    if (!(g.weight > 0.0)) throw InvalidGoal("goal weights must be positive");
    total += g.weight;
  }
  for (const Goal& g : goals) m.values[map.index(g.cell)] += g.weight / total;
  return m;
}

int resolve_horizon(const Scenario& scenario, const TransitionKernel& kernel, const ActionMatrix& pa) {
  if (scenario.horizon.kind == Horizon::Kind::kFixed) return scenario.horizon.value;
  return min_time(kernel, pa, scenario.start, goal_marginal(scenario.map, scenario.goals),
                  scenario.horizon.value);
}

Path greedy_plan(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
                 const StateMarginal& goal, int horizon, NullPosteriorPolicy policy, bool goal_stop,
                 std::uint64_t seed) {
  Chooser greedy;
  Chooser fallback(seed);
  return extract(kernel, pa, start, goal, horizon, policy, goal_stop, greedy, fallback);
}

Path greedy_plan(const Scenario& scenario) {
  scenario.validate();
  const TransitionKernel kernel = build_kernel(scenario.map, default_masks(scenario.sharpness));
  const ActionMatrix pa(scenario.stiffness);
  const int horizon = resolve_horizon(scenario, kernel, pa);
  return greedy_plan(kernel, pa, scenario.start_state(), goal_marginal(scenario.map, scenario.goals), horizon,
                     scenario.policy, scenario.goal_stop, scenario.seed);
}

Path sample_path(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const TransitionKernel kernel = build_kernel(scenario.map, default_masks(scenario.sharpness));
  const ActionMatrix pa(scenario.stiffness);
  const int horizon = resolve_horizon(scenario, kernel, pa);
  // The sampling stream and the null-policy stream must not share state.
  Chooser sampler(seed);
  Chooser fallback(seed ^ 0x9e3779b97f4a7c15ULL);
  return extract(kernel, pa, scenario.start_state(), goal_marginal(scenario.map, scenario.goals), horizon,
                 scenario.policy, scenario.goal_stop, sampler, fallback);
}

Path sample_path(const Scenario& scenario) { return sample_path(scenario, scenario.seed); }

std::optional<GreedyStep> greedy_step(const TransitionKernel& kernel, const ActionMatrix& pa,
                                      const StartState& start, const StateMarginal& goal, int horizon) {
  if (horizon < 2) throw ParameterError("greedy_step needs a horizon of at least 2");
  const std::vector<MessageTensor> backward = backward_flow(goal, kernel, pa, horizon);
  const MessageTensor p1 = posterior(start_message(start, kernel), backward.front());
  if (p1.dead()) return std::nullopt;
  const Choice first = Chooser::argmax(p1);
  const MessageTensor current = delta(kernel, first.cell, first.action);

  std::size_t next;
  if (horizon == 2) {
    const StateMarginal p = posterior(forward_final(current, kernel), goal);
    if (p.dead) return std::nullopt;
    next = Chooser::argmax(p);
  } else {
    const MessageTensor p = posterior(forward_step(current, kernel, pa), backward[1]);
    if (p.dead()) return std::nullopt;
    next = Chooser::argmax(p).cell;
  }
  return GreedyStep{action_from_index(first.action), kernel.map().cell(next)};
}

double path_likelihood(const Path& path, const TransitionKernel& kernel, const ActionMatrix& pa,
                       const StartState& start) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto& steps = path.steps;
  if (steps.empty()) return kNegInf;
  for (const PathStep& s : steps) {
    if (kernel.map().blocked(s.cell)) return kNegInf;
  }
  if (steps.front().cell != start.cell) return kNegInf;
  if (steps.size() == 1) return 0.0;

  double prior_total = 0.0;
  for (double p : start.action_prior) prior_total += p;
  double log_lik =
      std::log(start.action_prior[static_cast<std::size_t>(index_of(steps.front().action))] / prior_total);
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const PathStep& prev = steps[i - 1];
    const PathStep& cur = steps[i];
    log_lik += std::log(kernel.probability(prev.cell, prev.action, cur.cell));
    if (i + 1 < steps.size()) log_lik += std::log(pa(index_of(prev.action), index_of(cur.action)));
  }
  return std::isnan(log_lik) ? kNegInf : log_lik;
}

double path_likelihood(const Path& path, const Scenario& scenario) {
  const TransitionKernel kernel = build_kernel(scenario.map, default_masks(scenario.sharpness));
  return path_likelihood(path, kernel, ActionMatrix(scenario.stiffness), scenario.start_state());
}

}  // namespace pflow
