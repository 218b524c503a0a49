#include "pnnkit/vdnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "model_io.hpp"

namespace pnnkit {

void VDNNConfig::validate() const {
  if (input_bins < 1) throw ValidationError("vdnn: K must be >= 1");
  if (depth < 1) throw ValidationError("vdnn: depth must be >= 1");
  if (class_count < 2) throw ValidationError("vdnn: need at least 2 classes");
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw ValidationError("vdnn: shrink must be in (0,1)");
  }
  if (min_width < 1) throw ValidationError("vdnn: min_width must be >= 1");
}

std::vector<int> VDNNConfig::hidden_widths() const {
  validate();
  std::vector<int> widths;
  int prev = input_bins;
  for (int n = 0; n < depth; ++n) {
    const int w = std::max(static_cast<int>(std::floor(prev * shrink)),
                           min_width);
    widths.push_back(w);
    prev = w;
  }
  return widths;
}

NetSpec vdnn_net_spec(const VDNNConfig& config) {
  NetSpec spec;
  spec.input_width = config.input_bins;
  spec.class_count = config.class_count;
  spec.bn_epsilon = config.bn_epsilon;
  spec.bn_momentum = config.bn_momentum;
  const auto widths = config.hidden_widths();
  for (int n = 0; n < config.depth; ++n) {
    LayerWiring layer;
    layer.inputs = {n};  // plain chain
    layer.width = widths[static_cast<std::size_t>(n)];
    spec.hidden.push_back(std::move(layer));
  }
  spec.classifier_inputs = {config.depth};
  return spec;
}

VDNNModel vdnn_init(const VDNNConfig& config, std::uint64_t seed) {
  return {config, init_net(vdnn_net_spec(config), seed)};
}

Matrix vdnn_forward(VDNNModel& model, const Matrix& input, Mode mode,
                    ForwardCache* cache, bool update_running) {
  return net_forward(model.net, input, mode, cache, update_running);
}

Gradients vdnn_backward(const VDNNModel& model, const ForwardCache& cache,
                        const std::vector<int>& labels) {
  return net_backward(model.net, cache, labels);
}

VDNNParamCount vdnn_param_count(const VDNNConfig& config) {
  const auto widths = config.hidden_widths();
  VDNNParamCount pc;
  std::size_t prev = static_cast<std::size_t>(config.input_bins);
  for (int w : widths) {
    pc.hidden_weights += prev * static_cast<std::size_t>(w);
    pc.hidden_biases += static_cast<std::size_t>(w);
    pc.bn_params += 2 * static_cast<std::size_t>(w);
    prev = static_cast<std::size_t>(w);
  }
  pc.classifier_params =
      static_cast<std::size_t>(config.class_count) * (prev + 1);
  pc.total = pc.hidden_weights + pc.hidden_biases + pc.bn_params +
             pc.classifier_params;
  return pc;
}

namespace {
constexpr char kModelMagic[8] = {'V', 'D', 'N', 'M', 'D', 'L', '1', '\0'};
}

void vdnn_save(const VDNNModel& model, const std::string& path, bool float32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  const std::uint8_t dtype = float32 ? detail::kDtypeF32 : detail::kDtypeF64;
  write_bytes(os, kModelMagic, 8);
  write_u8(os, detail::kModelVersion);
  write_u8(os, dtype);
  write_u32(os, static_cast<std::uint32_t>(model.config.input_bins));
  write_u32(os, static_cast<std::uint32_t>(model.config.depth));
  write_u32(os, static_cast<std::uint32_t>(model.config.class_count));
  write_f64(os, model.config.shrink);
  write_u32(os, static_cast<std::uint32_t>(model.config.min_width));
  write_f64(os, model.config.bn_epsilon);
  write_f64(os, model.config.bn_momentum);
  detail::write_net_tensors(os, model.net, dtype);
  if (!os) throw ValidationError("write failed: " + path);
}

VDNNModel vdnn_load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open model file: " + path);
  Reader r(is, path);
  r.expect_magic(kModelMagic);
  const std::uint8_t version = r.u8();
  if (version != detail::kModelVersion) {
    r.fail("unsupported container version " + std::to_string(version));
  }
  const std::uint8_t dtype = r.u8();
  if (dtype != detail::kDtypeF32 && dtype != detail::kDtypeF64) {
    r.fail("unknown dtype " + std::to_string(dtype));
  }
  VDNNModel model;
  model.config.input_bins = static_cast<int>(r.u32());
  model.config.depth = static_cast<int>(r.u32());
  model.config.class_count = static_cast<int>(r.u32());
  model.config.shrink = r.f64();
  model.config.min_width = static_cast<int>(r.u32());
  model.config.bn_epsilon = r.f64();
  model.config.bn_momentum = r.f64();
  model.net.spec = vdnn_net_spec(model.config);
  detail::read_net_tensors(r, model.net, dtype);
  return model;
}

}  // namespace pnnkit
