#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pnnkit/net.hpp"

namespace pnnkit {

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  int batch_size = 8;
  int epochs = 30;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool coupled_weight_decay = true;  // classical L2 folded into the gradient
  bool stop_at_perfect_train_accuracy = false;

  void validate() const;
};

struct CrossEntropyResult {
  double loss = 0.0;
  Matrix d_logits;  // (p - onehot) / B
};

// Mean cross-entropy over the batch; probabilities are clamped at 1e-12
// inside the log.
CrossEntropyResult cross_entropy(const Matrix& probabilities,
                                 const std::vector<int>& labels);

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  int step = 0;
};

AdamState adam_init(const std::vector<ParamRef>& params);

// One bias-corrected Adam step across all parameter blocks. Throws
// NumericError naming the block on a non-finite gradient.
void adam_step(const std::vector<ParamRef>& params,
               const std::vector<std::vector<double>*>& grads, AdamState& state,
               const TrainConfig& config);

struct TrainHistory {
  std::vector<double> loss;             // per iteration
  std::vector<double> train_accuracy;   // per iteration (batch accuracy)
  std::vector<int> epoch_of_iteration;  // 1-based epoch index per iteration
  std::vector<double> epoch_grad_sum;   // raw L1 gradient sum, last iteration
  std::vector<double> epoch_grad_sum_normalized;  // min-max over the run

  int iterations() const { return static_cast<int>(loss.size()); }
  void write(std::ostream& os) const;
};

// Deterministic mini-batch training of any engine-backed model. A size-1
// remainder batch is merged into the previous batch so batch-norm variance
// stays defined.
TrainHistory train(NetModel& model, const Matrix& inputs,
                   const std::vector<int>& labels, const TrainConfig& config);

// Central-difference audit of the analytic gradients on one batch.
// Returns the worst relative error over all trainable parameters.
double finite_difference_audit(NetModel model, const Matrix& inputs,
                               const std::vector<int>& labels,
                               double h = 1e-6);

}  // namespace pnnkit
