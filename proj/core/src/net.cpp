#include "pnnkit/net.hpp"

#include <algorithm>
#include <cmath>

#include "pnnkit/rng.hpp"

namespace pnnkit {

int NetSpec::block_width(int id) const {
  if (id == 0) return input_width;
  return hidden.at(static_cast<std::size_t>(id - 1)).width;
}

int NetSpec::layer_input_width(int n) const {
  int w = 0;
  for (int id : hidden.at(static_cast<std::size_t>(n)).inputs) {
    w += block_width(id);
  }
  return w;
}

int NetSpec::classifier_input_width() const {
  int w = 0;
  for (int id : classifier_inputs) w += block_width(id);
  return w;
}

void NetSpec::validate() const {
  if (input_width < 1) throw ValidationError("net: input width must be >= 1");
  if (class_count < 2) throw ValidationError("net: need at least 2 classes");
  if (hidden.empty()) throw ValidationError("net: need at least 1 hidden layer");
  if (!(bn_epsilon > 0.0)) throw ValidationError("net: bn_epsilon must be > 0");
  if (!(bn_momentum > 0.0 && bn_momentum < 1.0)) {
    throw ValidationError("net: bn_momentum must be in (0,1)");
  }
  for (std::size_t n = 0; n < hidden.size(); ++n) {
    const auto& layer = hidden[n];
    if (layer.width < 1) throw ValidationError("net: layer width must be >= 1");
    if (layer.inputs.empty()) {
      throw ValidationError("net: layer has no input blocks");
    }
    for (int id : layer.inputs) {
      if (id < 0 || static_cast<std::size_t>(id) > n) {
        throw ValidationError("net: layer may only consume earlier blocks");
      }
    }
  }
  if (classifier_inputs.empty()) {
    throw ValidationError("net: classifier has no input blocks");
  }
  for (int id : classifier_inputs) {
    if (id < 0 || static_cast<std::size_t>(id) > hidden.size()) {
      throw ValidationError("net: classifier input block out of range");
    }
  }
}

namespace {

void fill_uniform(Matrix& w, Rng& rng, double scale) {
  for (double& x : w.data) x = rng.uniform(-scale, scale);
}

}  // namespace

NetModel init_net(const NetSpec& spec, std::uint64_t seed) {
  spec.validate();
  NetModel model;
  model.spec = spec;
  Rng rng(seed);
  for (int n = 0; n < spec.depth(); ++n) {
    const int in = spec.layer_input_width(n);
    const int out = spec.hidden[static_cast<std::size_t>(n)].width;
    HiddenLayer layer;
    layer.linear.weights = Matrix(static_cast<std::size_t>(out),
                                  static_cast<std::size_t>(in));
    fill_uniform(layer.linear.weights, rng, std::sqrt(6.0 / in));
    layer.linear.bias.assign(static_cast<std::size_t>(out), 0.0);
    layer.bn.gamma.assign(static_cast<std::size_t>(out), 1.0);
    layer.bn.beta.assign(static_cast<std::size_t>(out), 0.0);
    layer.bn.running_mean.assign(static_cast<std::size_t>(out), 0.0);
    layer.bn.running_var.assign(static_cast<std::size_t>(out), 1.0);
    model.hidden.push_back(std::move(layer));
  }
  const int cin = spec.classifier_input_width();
  model.classifier.weights = Matrix(static_cast<std::size_t>(spec.class_count),
                                    static_cast<std::size_t>(cin));
  fill_uniform(model.classifier.weights, rng, std::sqrt(6.0 / cin));
  model.classifier.bias.assign(static_cast<std::size_t>(spec.class_count), 0.0);
  return model;
}

Matrix concat_blocks(const std::vector<int>& block_ids, const Matrix& input,
                     const std::vector<Matrix>& layer_outputs) {
  std::size_t width = 0;
  for (int id : block_ids) {
    const Matrix& b = id == 0 ? input : layer_outputs.at(
                                            static_cast<std::size_t>(id - 1));
    if (b.rows != input.rows) {
      throw ValidationError("concat: block batch size mismatch");
    }
    width += b.cols;
  }
  Matrix out(input.rows, width);
  std::size_t col = 0;
  for (int id : block_ids) {
    const Matrix& b = id == 0 ? input : layer_outputs.at(
                                            static_cast<std::size_t>(id - 1));
    for (std::size_t i = 0; i < b.rows; ++i) {
      std::copy(b.row(i), b.row(i) + b.cols, out.row(i) + col);
    }
    col += b.cols;
  }
  return out;
}

Matrix net_forward(NetModel& model, const Matrix& input, Mode mode,
                   ForwardCache* cache, bool update_running) {
  const NetSpec& spec = model.spec;
  if (input.cols != static_cast<std::size_t>(spec.input_width)) {
    throw ValidationError("forward: input width mismatch");
  }
  const std::size_t batch = input.rows;
  if (batch < 1) throw ValidationError("forward: empty batch");
  if (mode == Mode::kTrain && batch < 2) {
    throw NumericError("forward: train mode needs batch >= 2 for batch norm");
  }

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.train_mode = (mode == Mode::kTrain);
  c.input = input;
  c.layers.assign(model.hidden.size(), {});

  std::vector<Matrix> outputs(model.hidden.size());
  for (std::size_t n = 0; n < model.hidden.size(); ++n) {
    HiddenLayer& layer = model.hidden[n];
    LayerCache& lc = c.layers[n];
    lc.concat_in = concat_blocks(spec.hidden[n].inputs, input, outputs);
    lc.pre_activation =
        affine_transposed(lc.concat_in, layer.linear.weights, layer.linear.bias);
    lc.relu = lc.pre_activation;
    for (double& x : lc.relu.data) x = std::max(x, 0.0);

    const std::size_t width = lc.relu.cols;
    lc.mean.resize(width);
    lc.inv_std.resize(width);
    if (mode == Mode::kTrain) {
      for (std::size_t j = 0; j < width; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < batch; ++i) mean += lc.relu(i, j);
        mean /= static_cast<double>(batch);
        double var = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
          const double d = lc.relu(i, j) - mean;
          var += d * d;
        }
        var /= static_cast<double>(batch);
        lc.mean[j] = mean;
        lc.inv_std[j] = 1.0 / std::sqrt(var + spec.bn_epsilon);
        if (update_running) {
          layer.bn.running_mean[j] = (1.0 - spec.bn_momentum) *
                                         layer.bn.running_mean[j] +
                                     spec.bn_momentum * mean;
          layer.bn.running_var[j] =
              (1.0 - spec.bn_momentum) * layer.bn.running_var[j] +
              spec.bn_momentum * var;
        }
      }
    } else {
      for (std::size_t j = 0; j < width; ++j) {
        lc.mean[j] = layer.bn.running_mean[j];
        lc.inv_std[j] = 1.0 / std::sqrt(layer.bn.running_var[j] + spec.bn_epsilon);
      }
    }
    lc.normalized = Matrix(batch, width);
    lc.out = Matrix(batch, width);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        const double xhat = (lc.relu(i, j) - lc.mean[j]) * lc.inv_std[j];
        lc.normalized(i, j) = xhat;
        lc.out(i, j) = layer.bn.gamma[j] * xhat + layer.bn.beta[j];
      }
    }
    outputs[n] = lc.out;
  }

  c.classifier_in = concat_blocks(spec.classifier_inputs, input, outputs);
  c.logits = affine_transposed(c.classifier_in, model.classifier.weights,
                               model.classifier.bias);
  c.probs = Matrix(batch, c.logits.cols);
  for (std::size_t i = 0; i < batch; ++i) {
    const double* li = c.logits.row(i);
    double peak = li[0];
    for (std::size_t j = 1; j < c.logits.cols; ++j) peak = std::max(peak, li[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c.logits.cols; ++j) {
      const double e = std::exp(li[j] - peak);
      c.probs(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < c.logits.cols; ++j) c.probs(i, j) /= sum;
  }
  return c.probs;
}

namespace {

// Split a gradient on a concatenated input back into its blocks,
// accumulating into d_input (block 0) and d_outputs (blocks >= 1).
void scatter_concat_grad(const std::vector<int>& block_ids, const Matrix& grad,
                         const NetSpec& spec, Matrix& d_input,
                         std::vector<Matrix>& d_outputs) {
  std::size_t col = 0;
  for (int id : block_ids) {
    const std::size_t width = static_cast<std::size_t>(spec.block_width(id));
    Matrix& target = id == 0 ? d_input
                             : d_outputs[static_cast<std::size_t>(id - 1)];
    for (std::size_t i = 0; i < grad.rows; ++i) {
      const double* gi = grad.row(i) + col;
      double* ti = target.row(i);
      for (std::size_t j = 0; j < width; ++j) ti[j] += gi[j];
    }
    col += width;
  }
}

}  // namespace

Gradients net_backward(const NetModel& model, const ForwardCache& cache,
                       const std::vector<int>& labels) {
  const NetSpec& spec = model.spec;
  const std::size_t batch = cache.input.rows;
  if (cache.layers.size() != model.hidden.size() || cache.probs.rows != batch) {
    throw ValidationError("backward: cache does not match model/batch");
  }
  if (labels.size() != batch) {
    throw ValidationError("backward: label count does not match batch");
  }
  for (int y : labels) {
    if (y < 0 || y >= spec.class_count) {
      throw ValidationError("backward: label out of range");
    }
  }

  Gradients grads;
  grads.hidden.resize(model.hidden.size());
  grads.d_input = Matrix(batch, static_cast<std::size_t>(spec.input_width));
  std::vector<Matrix> d_outputs(model.hidden.size());
  for (std::size_t n = 0; n < model.hidden.size(); ++n) {
    d_outputs[n] = Matrix(batch, cache.layers[n].out.cols);
  }

  // Mean cross-entropy through softmax: dlogits = (p - onehot) / B.
  Matrix d_logits = cache.probs;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    d_logits(i, static_cast<std::size_t>(labels[i])) -= 1.0;
    for (std::size_t j = 0; j < d_logits.cols; ++j) d_logits(i, j) *= inv_batch;
  }

  grads.d_classifier_weights = transpose_times(d_logits, cache.classifier_in);
  grads.d_classifier_bias = column_sums(d_logits);
  scatter_concat_grad(spec.classifier_inputs,
                      times(d_logits, model.classifier.weights), spec,
                      grads.d_input, d_outputs);

  for (std::size_t n = model.hidden.size(); n-- > 0;) {
    const HiddenLayer& layer = model.hidden[n];
    const LayerCache& lc = cache.layers[n];
    const Matrix& d_out = d_outputs[n];
    const std::size_t width = d_out.cols;

    LayerGrads& lg = grads.hidden[n];
    lg.d_gamma.assign(width, 0.0);
    lg.d_beta.assign(width, 0.0);
    Matrix d_relu(batch, width);

    if (cache.train_mode) {
      // Batch-statistics normalization backward (biased variance).
      for (std::size_t j = 0; j < width; ++j) {
        double sum_dxhat = 0.0;
        double sum_dxhat_xhat = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
          const double dy = d_out(i, j);
          lg.d_gamma[j] += dy * lc.normalized(i, j);
          lg.d_beta[j] += dy;
          const double dxhat = dy * layer.bn.gamma[j];
          sum_dxhat += dxhat;
          sum_dxhat_xhat += dxhat * lc.normalized(i, j);
        }
        const double scale = lc.inv_std[j] / static_cast<double>(batch);
        for (std::size_t i = 0; i < batch; ++i) {
          const double dxhat = d_out(i, j) * layer.bn.gamma[j];
          d_relu(i, j) = scale * (static_cast<double>(batch) * dxhat -
                                  sum_dxhat -
                                  lc.normalized(i, j) * sum_dxhat_xhat);
        }
      }
    } else {
      // Frozen running statistics: normalization is an affine map.
      for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t i = 0; i < batch; ++i) {
          const double dy = d_out(i, j);
          lg.d_gamma[j] += dy * lc.normalized(i, j);
          lg.d_beta[j] += dy;
          d_relu(i, j) = dy * layer.bn.gamma[j] * lc.inv_std[j];
        }
      }
    }

    Matrix d_z = d_relu;
    for (std::size_t idx = 0; idx < d_z.data.size(); ++idx) {
      if (lc.pre_activation.data[idx] <= 0.0) d_z.data[idx] = 0.0;
    }

    lg.d_weights = transpose_times(d_z, lc.concat_in);
    lg.d_bias = column_sums(d_z);
    scatter_concat_grad(spec.hidden[n].inputs, times(d_z, layer.linear.weights),
                        spec, grads.d_input, d_outputs);
  }
  return grads;
}

namespace {

double l1_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

std::vector<std::pair<std::string, double>> Gradients::l1_block_sums() const {
  std::vector<std::pair<std::string, double>> sums;
  for (std::size_t n = 0; n < hidden.size(); ++n) {
    const std::string prefix = "hidden" + std::to_string(n + 1) + ".";
    sums.emplace_back(prefix + "weights", l1_sum(hidden[n].d_weights.data));
    sums.emplace_back(prefix + "bias", l1_sum(hidden[n].d_bias));
    sums.emplace_back(prefix + "gamma", l1_sum(hidden[n].d_gamma));
    sums.emplace_back(prefix + "beta", l1_sum(hidden[n].d_beta));
  }
  sums.emplace_back("classifier.weights", l1_sum(d_classifier_weights.data));
  sums.emplace_back("classifier.bias", l1_sum(d_classifier_bias));
  return sums;
}

double Gradients::total_l1() const {
  double total = 0.0;
  for (const auto& [name, s] : l1_block_sums()) total += s;
  return total;
}

std::vector<ParamRef> collect_params(NetModel& model) {
  std::vector<ParamRef> params;
  for (std::size_t n = 0; n < model.hidden.size(); ++n) {
    const std::string prefix = "hidden" + std::to_string(n + 1) + ".";
    params.push_back({prefix + "weights", &model.hidden[n].linear.weights.data,
                      true});
    params.push_back({prefix + "bias", &model.hidden[n].linear.bias, true});
    params.push_back({prefix + "gamma", &model.hidden[n].bn.gamma, false});
    params.push_back({prefix + "beta", &model.hidden[n].bn.beta, false});
  }
  params.push_back({"classifier.weights", &model.classifier.weights.data, true});
  params.push_back({"classifier.bias", &model.classifier.bias, true});
  return params;
}

std::vector<std::vector<double>*> collect_grads(Gradients& grads) {
  std::vector<std::vector<double>*> out;
  for (auto& lg : grads.hidden) {
    out.push_back(&lg.d_weights.data);
    out.push_back(&lg.d_bias);
    out.push_back(&lg.d_gamma);
    out.push_back(&lg.d_beta);
  }
  out.push_back(&grads.d_classifier_weights.data);
  out.push_back(&grads.d_classifier_bias);
  return out;
}

std::size_t total_param_count(const NetModel& model) {
  std::size_t total = 0;
  for (const auto& layer : model.hidden) {
    total += layer.linear.weights.data.size() + layer.linear.bias.size() +
             layer.bn.gamma.size() + layer.bn.beta.size();
  }
  total += model.classifier.weights.data.size() + model.classifier.bias.size();
  return total;
}

}  // namespace pnnkit
