#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnnkit/net.hpp"

namespace pnnkit {

// Feed-forward wiring variants. Full is the progressive network; the others
// remove parts of the direct input path for ablation.
enum class Wiring : std::uint8_t {
  kFull = 0,     // layer n consumes X ++ outputs of layers 1..n-1
  kNoZh = 1,     // layer n consumes X ++ output of layer n-1 only
  kNoX = 2,      // layer n consumes outputs 1..n-1 (layer 1 still gets X)
  kNeither = 3,  // plain chain: layer n consumes output n-1 only
};

const char* wiring_name(Wiring w);
Wiring wiring_from_name(const std::string& name);

struct PNNConfig {
  int input_bins = 16384;  // K
  int hidden_width = 100;  // H_d
  int depth = 6;           // progressive hidden layers (classifier excluded)
  int class_count = 2;     // C
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;
  Wiring wiring = Wiring::kFull;

  void validate() const;
  bool operator==(const PNNConfig&) const = default;
};

struct PNNModel {
  PNNConfig config;
  NetModel net;
};

struct ParamCount {
  std::size_t hidden_weights = 0;
  std::size_t hidden_biases = 0;
  std::size_t bn_params = 0;  // gamma + beta (running stats are not trainable)
  std::size_t classifier_params = 0;
  std::size_t total = 0;
};

NetSpec pnn_net_spec(const PNNConfig& config);

PNNModel pnn_init(const PNNConfig& config, std::uint64_t seed);

// Input to layer n (1-based; n = depth+1 addresses the classifier):
// X ++ prior outputs in ascending layer order, X first.
Matrix pnn_layer_input(const PNNConfig& config, int n, const Matrix& input,
                       const std::vector<Matrix>& prior_outputs);

Matrix pnn_forward(PNNModel& model, const Matrix& input, Mode mode,
                   ForwardCache* cache = nullptr, bool update_running = true);

Gradients pnn_backward(const PNNModel& model, const ForwardCache& cache,
                       const std::vector<int>& labels);

// Exact counts for the full wiring; hidden weights follow
// D*K*H + H^2 * D*(D-1)/2.
ParamCount pnn_param_count(const PNNConfig& config);

// Container "PNNMDL1\0": version, dtype, config block, then tensors in
// declaration order with per-tensor length prefixes.
void pnn_save(const PNNModel& model, const std::string& path,
              bool float32 = false);
PNNModel pnn_load(const std::string& path);

}  // namespace pnnkit
