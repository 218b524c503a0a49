#include "pnnkit/pnn.hpp"

#include <fstream>

#include "model_io.hpp"

namespace pnnkit {

const char* wiring_name(Wiring w) {
  switch (w) {
    case Wiring::kFull: return "full";
    case Wiring::kNoZh: return "no_zh";
    case Wiring::kNoX: return "no_x";
    case Wiring::kNeither: return "neither";
  }
  throw ValidationError("unknown wiring");
}

Wiring wiring_from_name(const std::string& name) {
  if (name == "full") return Wiring::kFull;
  if (name == "no_zh") return Wiring::kNoZh;
  if (name == "no_x") return Wiring::kNoX;
  if (name == "neither") return Wiring::kNeither;
  throw ValidationError("unknown wiring variant: " + name);
}

void PNNConfig::validate() const {
  if (input_bins < 1) throw ValidationError("pnn: K must be >= 1");
  if (hidden_width < 1) throw ValidationError("pnn: H_d must be >= 1");
  if (depth < 1) throw ValidationError("pnn: depth must be >= 1");
  if (class_count < 2) throw ValidationError("pnn: need at least 2 classes");
}

NetSpec pnn_net_spec(const PNNConfig& config) {
  config.validate();
  NetSpec spec;
  spec.input_width = config.input_bins;
  spec.class_count = config.class_count;
  spec.bn_epsilon = config.bn_epsilon;
  spec.bn_momentum = config.bn_momentum;
  const int d = config.depth;
  for (int n = 1; n <= d; ++n) {
    LayerWiring layer;
    layer.width = config.hidden_width;
    switch (config.wiring) {
      case Wiring::kFull:
        layer.inputs.push_back(0);
        for (int p = 1; p < n; ++p) layer.inputs.push_back(p);
        break;
      case Wiring::kNoZh:
        layer.inputs.push_back(0);
        if (n > 1) layer.inputs.push_back(n - 1);
        break;
      case Wiring::kNoX:
        if (n == 1) {
          layer.inputs.push_back(0);  // the network's only data entry point
        } else {
          for (int p = 1; p < n; ++p) layer.inputs.push_back(p);
        }
        break;
      case Wiring::kNeither:
        layer.inputs.push_back(n == 1 ? 0 : n - 1);
        break;
    }
    spec.hidden.push_back(std::move(layer));
  }
  switch (config.wiring) {
    case Wiring::kFull:
      spec.classifier_inputs.push_back(0);
      for (int p = 1; p <= d; ++p) spec.classifier_inputs.push_back(p);
      break;
    case Wiring::kNoZh:
      spec.classifier_inputs = {0, d};
      break;
    case Wiring::kNoX:
      for (int p = 1; p <= d; ++p) spec.classifier_inputs.push_back(p);
      break;
    case Wiring::kNeither:
      spec.classifier_inputs = {d};
      break;
  }
  return spec;
}

PNNModel pnn_init(const PNNConfig& config, std::uint64_t seed) {
  return {config, init_net(pnn_net_spec(config), seed)};
}

Matrix pnn_layer_input(const PNNConfig& config, int n, const Matrix& input,
                       const std::vector<Matrix>& prior_outputs) {
  config.validate();
  if (n < 1 || n > config.depth + 1) {
    throw ValidationError("pnn: layer index out of range");
  }
  if (prior_outputs.size() != static_cast<std::size_t>(n - 1)) {
    throw ValidationError("pnn: expected exactly n-1 prior outputs");
  }
  for (const Matrix& out : prior_outputs) {
    if (out.cols != static_cast<std::size_t>(config.hidden_width)) {
      throw ValidationError("pnn: prior output width must equal H_d");
    }
  }
  std::vector<int> ids(static_cast<std::size_t>(n), 0);
  for (int p = 1; p < n; ++p) ids[static_cast<std::size_t>(p)] = p;
  return concat_blocks(ids, input, prior_outputs);
}

Matrix pnn_forward(PNNModel& model, const Matrix& input, Mode mode,
                   ForwardCache* cache, bool update_running) {
  return net_forward(model.net, input, mode, cache, update_running);
}

Gradients pnn_backward(const PNNModel& model, const ForwardCache& cache,
                       const std::vector<int>& labels) {
  return net_backward(model.net, cache, labels);
}

ParamCount pnn_param_count(const PNNConfig& config) {
  config.validate();
  if (config.wiring != Wiring::kFull) {
    throw ValidationError("param_count is defined for the full wiring");
  }
  const std::size_t k = static_cast<std::size_t>(config.input_bins);
  const std::size_t h = static_cast<std::size_t>(config.hidden_width);
  const std::size_t d = static_cast<std::size_t>(config.depth);
  const std::size_t c = static_cast<std::size_t>(config.class_count);
  ParamCount pc;
  pc.hidden_weights = d * k * h + (d * (d - 1) / 2) * h * h;
  pc.hidden_biases = d * h;
  pc.bn_params = 2 * d * h;
  pc.classifier_params = c * (k + d * h) + c;
  pc.total = pc.hidden_weights + pc.hidden_biases + pc.bn_params +
             pc.classifier_params;
  return pc;
}

namespace {
constexpr char kModelMagic[8] = {'P', 'N', 'N', 'M', 'D', 'L', '1', '\0'};
}

void pnn_save(const PNNModel& model, const std::string& path, bool float32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  const std::uint8_t dtype = float32 ? detail::kDtypeF32 : detail::kDtypeF64;
  write_bytes(os, kModelMagic, 8);
  write_u8(os, detail::kModelVersion);
  write_u8(os, dtype);
  write_u32(os, static_cast<std::uint32_t>(model.config.input_bins));
  write_u32(os, static_cast<std::uint32_t>(model.config.hidden_width));
  write_u32(os, static_cast<std::uint32_t>(model.config.depth));
  write_u32(os, static_cast<std::uint32_t>(model.config.class_count));
  write_f64(os, model.config.bn_epsilon);
  write_f64(os, model.config.bn_momentum);
  write_u8(os, static_cast<std::uint8_t>(model.config.wiring));
  detail::write_net_tensors(os, model.net, dtype);
  if (!os) throw ValidationError("write failed: " + path);
}

PNNModel pnn_load(const std::string& path) {
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
  PNNModel model;
  model.config.input_bins = static_cast<int>(r.u32());
  model.config.hidden_width = static_cast<int>(r.u32());
  model.config.depth = static_cast<int>(r.u32());
  model.config.class_count = static_cast<int>(r.u32());
  model.config.bn_epsilon = r.f64();
  model.config.bn_momentum = r.f64();
  const std::uint8_t wiring = r.u8();
  if (wiring > 3) r.fail("unknown wiring variant " + std::to_string(wiring));
  model.config.wiring = static_cast<Wiring>(wiring);
  model.net.spec = pnn_net_spec(model.config);
  detail::read_net_tensors(r, model.net, dtype);
  return model;
}

}  // namespace pnnkit
