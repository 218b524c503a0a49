#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnnkit/net.hpp"

namespace pnnkit {

// Vanilla DNN baseline: a plain chain whose hidden widths shrink by a fixed
// ratio per layer. Shares the init/forward/backward engine with the PNN.
struct VDNNConfig {
  int input_bins = 16384;  // K
  int depth = 6;
  int class_count = 2;
  double shrink = 0.5;
  int min_width = 1;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;

  void validate() const;
  std::vector<int> hidden_widths() const;
  bool operator==(const VDNNConfig&) const = default;
};

struct VDNNModel {
  VDNNConfig config;
  NetModel net;
};

struct VDNNParamCount {
  std::size_t hidden_weights = 0;
  std::size_t hidden_biases = 0;
  std::size_t bn_params = 0;
  std::size_t classifier_params = 0;
  std::size_t total = 0;
};

NetSpec vdnn_net_spec(const VDNNConfig& config);
VDNNModel vdnn_init(const VDNNConfig& config, std::uint64_t seed);
Matrix vdnn_forward(VDNNModel& model, const Matrix& input, Mode mode,
                    ForwardCache* cache = nullptr, bool update_running = true);
Gradients vdnn_backward(const VDNNModel& model, const ForwardCache& cache,
                        const std::vector<int>& labels);
VDNNParamCount vdnn_param_count(const VDNNConfig& config);

// Container "VDNMDL1\0", same layout conventions as the PNN container.
void vdnn_save(const VDNNModel& model, const std::string& path,
               bool float32 = false);
VDNNModel vdnn_load(const std::string& path);

}  // namespace pnnkit
