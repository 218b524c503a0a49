#pragma once

// Shared tensor-stream helpers for the model containers (internal).

#include <ostream>
#include <vector>

#include "pnnkit/io.hpp"
#include "pnnkit/net.hpp"

namespace pnnkit::detail {

inline constexpr std::uint8_t kDtypeF32 = 0;
inline constexpr std::uint8_t kDtypeF64 = 1;
inline constexpr std::uint8_t kModelVersion = 1;

inline void write_tensor(std::ostream& os, const std::vector<double>& v,
                         std::uint8_t dtype) {
  write_u64(os, v.size());
  if (dtype == kDtypeF32) {
    write_f32_array(os, v);
  } else {
    write_f64_array(os, v);
  }
}

inline std::vector<double> read_tensor(Reader& r, std::size_t expected,
                                       std::uint8_t dtype,
                                       const char* name) {
  const std::uint64_t n = r.u64();
  if (n != expected) {
    r.fail(std::string("tensor \"") + name + "\" length " + std::to_string(n) +
           " does not match config-derived shape " + std::to_string(expected));
  }
  return dtype == kDtypeF32 ? r.f32_array(n) : r.f64_array(n);
}

// Parameter tensors in declaration order: per hidden layer weights, bias,
// gamma, beta, running_mean, running_var; then classifier weights, bias.
inline void write_net_tensors(std::ostream& os, const NetModel& model,
                              std::uint8_t dtype) {
  for (const auto& layer : model.hidden) {
    write_tensor(os, layer.linear.weights.data, dtype);
    write_tensor(os, layer.linear.bias, dtype);
    write_tensor(os, layer.bn.gamma, dtype);
    write_tensor(os, layer.bn.beta, dtype);
    write_tensor(os, layer.bn.running_mean, dtype);
    write_tensor(os, layer.bn.running_var, dtype);
  }
  write_tensor(os, model.classifier.weights.data, dtype);
  write_tensor(os, model.classifier.bias, dtype);
}

inline void read_net_tensors(Reader& r, NetModel& model, std::uint8_t dtype) {
  const NetSpec& spec = model.spec;
  model.hidden.resize(static_cast<std::size_t>(spec.depth()));
  for (int n = 0; n < spec.depth(); ++n) {
    auto& layer = model.hidden[static_cast<std::size_t>(n)];
    const std::size_t in = static_cast<std::size_t>(spec.layer_input_width(n));
    const std::size_t out =
        static_cast<std::size_t>(spec.hidden[static_cast<std::size_t>(n)].width);
    layer.linear.weights = Matrix(out, in);
    layer.linear.weights.data = read_tensor(r, out * in, dtype, "weights");
    layer.linear.bias = read_tensor(r, out, dtype, "bias");
    layer.bn.gamma = read_tensor(r, out, dtype, "gamma");
    layer.bn.beta = read_tensor(r, out, dtype, "beta");
    layer.bn.running_mean = read_tensor(r, out, dtype, "running_mean");
    layer.bn.running_var = read_tensor(r, out, dtype, "running_var");
  }
  const std::size_t cin =
      static_cast<std::size_t>(spec.classifier_input_width());
  const std::size_t cls = static_cast<std::size_t>(spec.class_count);
  model.classifier.weights = Matrix(cls, cin);
  model.classifier.weights.data =
      read_tensor(r, cls * cin, dtype, "classifier.weights");
  model.classifier.bias = read_tensor(r, cls, dtype, "classifier.bias");
}

}  // namespace pnnkit::detail
