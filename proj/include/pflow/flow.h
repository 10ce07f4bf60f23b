#ifndef PFLOW_FLOW_H_
#define PFLOW_FLOW_H_

#include <array>
#include <vector>

#include "pflow/grid.h"
#include "pflow/simd.h"
#include "pflow/tensor.h"

namespace pflow {

// Sum-product recursions over joint state-action tensors.
//
// Every returned message is renormalised to total mass 1. Backward messages
// and posteriors with no support come back as dead all-zero tensors instead
// of throwing, so callers (the planners and the multi-agent loop) can decide
// what infeasibility means for them. The trailing isa argument selects the
// kernel implementation; it defaults to the one picked at startup.

// f(s_t, a_t) = sum_a' P_A(a', a_t) sum_s' p(s_t | s', a') f(s', a').
// Throws DeadFlow if f_prev carries no mass.
MessageTensor forward_step(const MessageTensor& f_prev, const TransitionKernel& kernel,
                           const ActionMatrix& pa, simd::Isa isa = simd::active_isa());

// f(s_T) = sum_a' sum_s' p(s_T | s', a') f(s', a'). Throws DeadFlow.
StateMarginal forward_final(const MessageTensor& f_prev, const TransitionKernel& kernel,
                            simd::Isa isa = simd::active_isa());

// b(s', a') ∝ sum_a P_A(a', a) sum_s p(s | s', a') b(s, a).
MessageTensor backward_step(const MessageTensor& b_next, const TransitionKernel& kernel,
                            const ActionMatrix& pa, simd::Isa isa = simd::active_isa());

// b(s_{T-1}, a_{T-1}) ∝ sum_s p(s | s_{T-1}, a_{T-1}) goal(s).
// Throws InvalidGoal if goal has no mass or puts mass on a blocked cell.
MessageTensor backward_terminal(const StateMarginal& goal, const TransitionKernel& kernel,
                                simd::Isa isa = simd::active_isa());

MessageTensor posterior(const MessageTensor& f, const MessageTensor& b,
                        simd::Isa isa = simd::active_isa());
StateMarginal posterior(const StateMarginal& f, const StateMarginal& b);

// Initial forward message: delta at the start cell times an action prior.
struct StartState {
  Cell cell;
  std::array<double, kNumActions> action_prior{};

  static StartState with_action(Cell c, Action a);
  static StartState uniform(Cell c);
};

MessageTensor start_message(const StartState& start, const TransitionKernel& kernel);

// Backward messages for t = 1..T-1 from b(s_T) = goal. Entries may be dead.
std::vector<MessageTensor> backward_flow(const StateMarginal& goal, const TransitionKernel& kernel,
                                         const ActionMatrix& pa, int horizon,
                                         simd::Isa isa = simd::active_isa());

// Full forward, backward and posterior flow for horizon T >= 2.
FlowSet run_flows(const TransitionKernel& kernel, const ActionMatrix& pa, const StartState& start,
                  const StateMarginal& goal, int horizon, simd::Isa isa = simd::active_isa());

// Smallest horizon (time slices, start at t = 1) at which the backward flow
// from goal has support at start_cell. Support is tracked with a boolean
// reachability mask, so long horizons cannot underflow to a false negative.
// start on a goal cell gives 1. Throws Unreachable when no horizon <= max_horizon works.
int min_time(const TransitionKernel& kernel, const ActionMatrix& pa, Cell start_cell,
             const StateMarginal& goal, int max_horizon);

// Validates goal against the kernel's map. Throws InvalidGoal.
void check_goal(const StateMarginal& goal, const GridMap& map);

}  // namespace pflow

#endif  // PFLOW_FLOW_H_
