#ifndef PFLOW_TENSOR_H_
#define PFLOW_TENSOR_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pflow/grid.h"

namespace pflow {

enum class MessageKind { kForward, kBackward, kPosterior };

// Nonnegative N x M x n_A message at one time step.
//
// Values are stored plane-major, values[a * cells + cell], so each action
// plane is a contiguous row-major image of the grid. A dead tensor is
// all-zero and marks a time step with no support.
class MessageTensor {
 public:
  MessageTensor() = default;
  MessageTensor(int rows, int cols, MessageKind kind)
      : rows_(rows),
        cols_(cols),
        kind_(kind),
        values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * kNumActions, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cells() const { return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_); }
  MessageKind kind() const { return kind_; }
  void set_kind(MessageKind k) { kind_ = k; }
  bool dead() const { return dead_; }
  void set_dead(bool d) { dead_ = d; }

  double& at(std::size_t cell, int action) { return values_[static_cast<std::size_t>(action) * cells() + cell]; }
  double at(std::size_t cell, int action) const {
    return values_[static_cast<std::size_t>(action) * cells() + cell];
  }

  std::span<double> plane(int action) {
    return {values_.data() + static_cast<std::size_t>(action) * cells(), cells()};
  }
  std::span<const double> plane(int action) const {
    return {values_.data() + static_cast<std::size_t>(action) * cells(), cells()};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double total() const;
  // Sum over actions at every cell.
  std::vector<double> state_marginal() const;
  std::array<double, kNumActions> action_distribution(std::size_t cell) const;

  friend bool operator==(const MessageTensor&, const MessageTensor&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  MessageKind kind_ = MessageKind::kForward;
  bool dead_ = false;
  std::vector<double> values_;
};

// N x M distribution over cells only: f(s_T), b(s_T) and their product.
struct StateMarginal {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  bool dead = false;

  StateMarginal() = default;
  StateMarginal(int r, int c)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double total() const;
  friend bool operator==(const StateMarginal&, const StateMarginal&) = default;
};

// Complete flow for horizon T. Index t - 1 holds time slice t for t = 1..T-1;
// slice T has no action dimension and lives in the *_final members.
struct FlowSet {
  int horizon = 0;
  std::vector<MessageTensor> forward;
  std::vector<MessageTensor> backward;
  std::vector<MessageTensor> posterior;
  StateMarginal forward_final;
  StateMarginal goal;
  StateMarginal posterior_final;

  const MessageTensor& forward_at(int t) const { return forward[static_cast<std::size_t>(t - 1)]; }
  const MessageTensor& backward_at(int t) const { return backward[static_cast<std::size_t>(t - 1)]; }
  const MessageTensor& posterior_at(int t) const { return posterior[static_cast<std::size_t>(t - 1)]; }
};

}  // namespace pflow

#endif  // PFLOW_TENSOR_H_
