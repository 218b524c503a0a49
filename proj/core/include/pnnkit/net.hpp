#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnnkit/common.hpp"
#include "pnnkit/tensor.hpp"

namespace pnnkit {

// Generic engine for concatenation-wired feedforward classifiers.
// Each hidden layer is Linear -> ReLU -> BatchNorm; the classifier is
// Linear -> Softmax. A layer's input is the concatenation of "blocks":
// block 0 is the network input X, block n (n >= 1) is the output of
// hidden layer n. Wiring is arbitrary, which lets the progressive
// network, its ablated variants, and the plain-chain baseline share one
// forward/backward implementation.

struct LayerWiring {
  std::vector<int> inputs;  // block ids, consumed in this order
  int width = 0;            // output width of the layer
};

struct NetSpec {
  int input_width = 0;  // width of block 0
  int class_count = 0;
  std::vector<LayerWiring> hidden;
  std::vector<int> classifier_inputs;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;

  int depth() const { return static_cast<int>(hidden.size()); }
  int block_width(int id) const;
  int layer_input_width(int n) const;  // n in [0, depth) -> hidden layer n
  int classifier_input_width() const;
  void validate() const;
  bool operator==(const NetSpec&) const = default;
};

struct LinearLayer {
  Matrix weights;  // [out x in]
  std::vector<double> bias;
};

struct BatchNormState {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

struct HiddenLayer {
  LinearLayer linear;
  BatchNormState bn;
};

struct NetModel {
  NetSpec spec;
  std::vector<HiddenLayer> hidden;
  LinearLayer classifier;
};

enum class Mode { kTrain, kInfer };

struct LayerCache {
  Matrix concat_in;            // [B x layer_input_width]
  Matrix pre_activation;       // z = concat_in * W^T + b
  Matrix relu;                 // max(z, 0)
  Matrix normalized;           // xhat
  Matrix out;                  // gamma * xhat + beta (the layer's block)
  std::vector<double> mean;    // batch (train) or running (infer)
  std::vector<double> inv_std; // 1 / sqrt(var + eps)
};

struct ForwardCache {
  Matrix input;
  std::vector<LayerCache> layers;
  Matrix classifier_in;
  Matrix logits;
  Matrix probs;
  bool train_mode = false;
};

struct LayerGrads {
  Matrix d_weights;
  std::vector<double> d_bias;
  std::vector<double> d_gamma;
  std::vector<double> d_beta;
};

struct Gradients {
  std::vector<LayerGrads> hidden;
  Matrix d_classifier_weights;
  std::vector<double> d_classifier_bias;
  Matrix d_input;  // gradient w.r.t. X, accumulated over every consumer

  // Sum of |g| per parameter block, in canonical block order.
  std::vector<std::pair<std::string, double>> l1_block_sums() const;
  double total_l1() const;
};

// Named view of one trainable parameter vector. Batch-norm scale/shift are
// flagged as exempt from weight decay.
struct ParamRef {
  std::string name;
  std::vector<double>* values = nullptr;
  bool weight_decay = true;
};

NetModel init_net(const NetSpec& spec, std::uint64_t seed);

// Concatenate the requested blocks (X plus prior layer outputs) in wiring
// order, X always referring to block 0.
Matrix concat_blocks(const std::vector<int>& block_ids, const Matrix& input,
                     const std::vector<Matrix>& layer_outputs);

// Train mode uses batch statistics (batch >= 2) and, when update_running is
// set, folds them into the running estimates. Infer mode uses running stats.
Matrix net_forward(NetModel& model, const Matrix& input, Mode mode,
                   ForwardCache* cache = nullptr, bool update_running = true);

// Gradients of the mean cross-entropy loss over the cached batch.
Gradients net_backward(const NetModel& model, const ForwardCache& cache,
                       const std::vector<int>& labels);

std::vector<ParamRef> collect_params(NetModel& model);
std::vector<std::vector<double>*> collect_grads(Gradients& grads);

std::size_t total_param_count(const NetModel& model);

}  // namespace pnnkit
