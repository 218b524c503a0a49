#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "pnnkit/rng.hpp"
#include "pnnkit/training.hpp"
#include "pnnkit/vdnn.hpp"

using namespace pnnkit;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& x : m.data) x = std::abs(rng.normal());
  return m;
}

}  // namespace

TEST_CASE("halving rule widths") {
  VDNNConfig cfg{8, 3, 2};
  CHECK(cfg.hidden_widths() == std::vector<int>{4, 2, 1});
  const VDNNModel m = vdnn_init(cfg, 1);
  CHECK(m.net.classifier.weights.cols == 1);
  CHECK(m.net.hidden[0].linear.weights.rows == 4);
  CHECK(m.net.hidden[0].linear.weights.cols == 8);
  CHECK(m.net.hidden[2].linear.weights.cols == 2);
}

TEST_CASE("min_width floors the shrink chain") {
  VDNNConfig cfg{8, 6, 2};
  CHECK(cfg.hidden_widths() == std::vector<int>{4, 2, 1, 1, 1, 1});
}

TEST_CASE("init determinism") {
  VDNNConfig cfg{16, 3, 3};
  CHECK(vdnn_init(cfg, 7).net.hidden[1].linear.weights.data ==
        vdnn_init(cfg, 7).net.hidden[1].linear.weights.data);
}

TEST_CASE("full-scale parameter count is ~0.67 K^2") {
  VDNNConfig cfg{16384, 6, 7};
  const VDNNParamCount pc = vdnn_param_count(cfg);
  const double k2 = 16384.0 * 16384.0;
  CHECK(pc.hidden_weights >= 0.66 * k2);
  CHECK(pc.hidden_weights <= 0.68 * k2);
  // Roughly 178 million parameters at this geometry.
  CHECK(std::abs(static_cast<double>(pc.hidden_weights) - 0.67 * k2) <
        0.02 * k2);
}

TEST_CASE("small exact parameter counts") {
  CHECK(vdnn_param_count({8, 2, 2}).hidden_weights == 8 * 4 + 4 * 2);
  CHECK(vdnn_param_count({8, 1, 2}).hidden_weights == 8 * 4);
}

TEST_CASE("zero-parameter model emits the uniform distribution") {
  VDNNConfig cfg{6, 2, 4};
  VDNNModel m = vdnn_init(cfg, 9);
  for (auto& layer : m.net.hidden) {
    std::fill(layer.linear.weights.data.begin(),
              layer.linear.weights.data.end(), 0.0);
  }
  std::fill(m.net.classifier.weights.data.begin(),
            m.net.classifier.weights.data.end(), 0.0);
  const Matrix probs = vdnn_forward(m, random_batch(3, 6, 2), Mode::kInfer);
  for (double p : probs.data) CHECK(p == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("backward matches central finite differences") {
  VDNNConfig cfg{16, 3, 3};
  VDNNModel m = vdnn_init(cfg, 13);
  const Matrix x = random_batch(4, 16, 19);
  CHECK(finite_difference_audit(m.net, x, {0, 1, 2, 1}, 1e-6) < 1e-5);
}

TEST_CASE("container round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pnnkit_vdnn_test";
  fs::create_directories(dir);
  const std::string path = (dir / "m.vdnn").string();

  VDNNModel m = vdnn_init({12, 2, 3}, 33);
  vdnn_save(m, path);
  const VDNNModel loaded = vdnn_load(path);
  CHECK(loaded.config == m.config);
  CHECK(loaded.net.hidden[0].linear.weights.data ==
        m.net.hidden[0].linear.weights.data);
  CHECK(loaded.net.classifier.bias == m.net.classifier.bias);
  fs::remove_all(dir);
}
