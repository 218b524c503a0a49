#include "pnnkit/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "pnnkit/rng.hpp"

namespace pnnkit {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ValidationError("train: learning rate must be positive");
  }
  if (weight_decay < 0.0) {
    throw ValidationError("train: weight decay must be non-negative");
  }
  if (batch_size < 2) {
    throw ValidationError("train: batch size must be >= 2 (batch norm)");
  }
  if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
}

CrossEntropyResult cross_entropy(const Matrix& probabilities,
                                 const std::vector<int>& labels) {
  const std::size_t batch = probabilities.rows;
  if (batch == 0 || labels.size() != batch) {
    throw ValidationError("cross_entropy: batch/label size mismatch");
  }
  CrossEntropyResult result;
  result.d_logits = probabilities;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= probabilities.cols) {
      throw ValidationError("cross_entropy: label out of range");
    }
    result.loss -=
        std::log(std::max(probabilities(i, static_cast<std::size_t>(y)), 1e-12));
    result.d_logits(i, static_cast<std::size_t>(y)) -= 1.0;
    for (std::size_t j = 0; j < probabilities.cols; ++j) {
      result.d_logits(i, j) *= inv_batch;
    }
  }
  result.loss *= inv_batch;
  return result;
}

AdamState adam_init(const std::vector<ParamRef>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.emplace_back(p.values->size(), 0.0);
    state.v.emplace_back(p.values->size(), 0.0);
  }
  return state;
}

void adam_step(const std::vector<ParamRef>& params,
               const std::vector<std::vector<double>*>& grads, AdamState& state,
               const TrainConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ValidationError("adam: parameter/gradient/state block mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.adam_beta1, state.step);
  const double bc2 = 1.0 - std::pow(config.adam_beta2, state.step);
  for (std::size_t b = 0; b < params.size(); ++b) {
    std::vector<double>& p = *params[b].values;
    const std::vector<double>& g = *grads[b];
    if (p.size() != g.size()) {
      throw ValidationError("adam: shape mismatch in block " + params[b].name);
    }
    std::vector<double>& m = state.m[b];
    std::vector<double>& v = state.v[b];
    const bool decay = params[b].weight_decay && config.coupled_weight_decay &&
                       config.weight_decay > 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double gi = g[i];
      if (!std::isfinite(gi)) {
        throw NumericError("adam: non-finite gradient in block " +
                           params[b].name);
      }
      if (decay) gi += config.weight_decay * p[i];
      m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * gi;
      v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * gi * gi;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
    }
  }
}

namespace {

Matrix gather_rows(const Matrix& inputs, const std::vector<std::size_t>& idx) {
  Matrix out(idx.size(), inputs.cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy(inputs.row(idx[i]), inputs.row(idx[i]) + inputs.cols, out.row(i));
  }
  return out;
}

double batch_accuracy(const Matrix& probs, const std::vector<int>& labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.rows; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.cols; ++j) {
      if (probs(i, j) > probs(i, best)) best = j;
    }
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(probs.rows);
}

}  // namespace

void TrainHistory::write(std::ostream& os) const {
  os << "iteration\tepoch\tloss\ttrain_accuracy\n";
  for (std::size_t i = 0; i < loss.size(); ++i) {
    os << (i + 1) << '\t' << epoch_of_iteration[i] << '\t' << loss[i] << '\t'
       << train_accuracy[i] << '\n';
  }
  os << "\nepoch\tgrad_sum\tgrad_sum_normalized\n";
  for (std::size_t e = 0; e < epoch_grad_sum.size(); ++e) {
    os << (e + 1) << '\t' << epoch_grad_sum[e] << '\t'
       << epoch_grad_sum_normalized[e] << '\n';
  }
}

TrainHistory train(NetModel& model, const Matrix& inputs,
                   const std::vector<int>& labels, const TrainConfig& config) {
  config.validate();
  const std::size_t m = inputs.rows;
  if (m == 0) throw ValidationError("train: empty training set");
  if (labels.size() != m) throw ValidationError("train: label count mismatch");
  if (static_cast<std::size_t>(config.batch_size) > m) {
    throw ValidationError("train: batch size exceeds training-set size");
  }
  for (int y : labels) {
    if (y < 0 || y >= model.spec.class_count) {
      throw ValidationError("train: label out of range");
    }
  }

  const auto params = collect_params(model);
  AdamState adam = adam_init(params);
  Rng shuffle_rng(config.seed);
  TrainHistory history;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);

  bool stop = false;
  for (int epoch = 1; epoch <= config.epochs && !stop; ++epoch) {
    if (config.shuffle) shuffle_rng.shuffle(order);

    // Batch boundaries; a size-1 remainder joins the previous batch.
    std::vector<std::pair<std::size_t, std::size_t>> batches;
    for (std::size_t start = 0; start < m; start += bs) {
      batches.emplace_back(start, std::min(start + bs, m));
    }
    if (batches.size() > 1 &&
        batches.back().second - batches.back().first == 1) {
      batches[batches.size() - 2].second = m;
      batches.pop_back();
    }

    double epoch_correct = 0.0;
    double epoch_total = 0.0;
    double last_grad_sum = 0.0;
    for (const auto& [start, end] : batches) {
      std::vector<std::size_t> idx(order.begin() + start, order.begin() + end);
      Matrix xb = gather_rows(inputs, idx);
      std::vector<int> yb(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) yb[i] = labels[idx[i]];

      ForwardCache cache;
      const Matrix& probs = net_forward(model, xb, Mode::kTrain, &cache);
      CrossEntropyResult ce = cross_entropy(probs, yb);
      Gradients grads = net_backward(model, cache, yb);
      auto grad_blocks = collect_grads(grads);
      adam_step(params, grad_blocks, adam, config);

      const double acc = batch_accuracy(probs, yb);
      history.loss.push_back(ce.loss);
      history.train_accuracy.push_back(acc);
      history.epoch_of_iteration.push_back(epoch);
      epoch_correct += acc * static_cast<double>(idx.size());
      epoch_total += static_cast<double>(idx.size());
      last_grad_sum = grads.total_l1();
    }
    history.epoch_grad_sum.push_back(last_grad_sum);
    if (config.stop_at_perfect_train_accuracy &&
        epoch_correct == epoch_total) {
      stop = true;
    }
  }

  // Min-max normalization of the per-epoch gradient sums over the run.
  history.epoch_grad_sum_normalized = history.epoch_grad_sum;
  if (!history.epoch_grad_sum.empty()) {
    const auto [lo, hi] = std::minmax_element(history.epoch_grad_sum.begin(),
                                              history.epoch_grad_sum.end());
    const double span = *hi - *lo;
    for (double& g : history.epoch_grad_sum_normalized) {
      g = span > 0.0 ? (g - *lo) / span : 0.0;
    }
  }
  return history;
}

double finite_difference_audit(NetModel model, const Matrix& inputs,
                               const std::vector<int>& labels, double h) {
  if (!(h > 0.0)) throw ValidationError("audit: h must be positive");
  ForwardCache cache;
  net_forward(model, inputs, Mode::kTrain, &cache, /*update_running=*/false);
  Gradients grads = net_backward(model, cache, labels);
  auto params = collect_params(model);
  auto grad_blocks = collect_grads(grads);

  const auto loss_at = [&]() {
    const Matrix& probs =
        net_forward(model, inputs, Mode::kTrain, nullptr,
                    /*update_running=*/false);
    return cross_entropy(probs, labels).loss;
  };

  double worst = 0.0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    std::vector<double>& p = *params[b].values;
    const std::vector<double>& g = *grad_blocks[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double plus = loss_at();
      p[i] = saved - h;
      const double minus = loss_at();
      p[i] = saved;
      const double fd = (plus - minus) / (2.0 * h);
      const double rel =
          std::abs(fd - g[i]) / std::max(std::abs(fd) + std::abs(g[i]), 1e-4);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace pnnkit
