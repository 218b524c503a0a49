#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnnkit/data.hpp"
#include "pnnkit/metrics.hpp"
#include "pnnkit/pnn.hpp"
#include "pnnkit/training.hpp"
#include "pnnkit/vdnn.hpp"

namespace pnnkit {

enum class ModelFamily { kPNN, kVDNN };

// Architecture choice for one experiment run; exactly one config is active.
struct ModelSetup {
  ModelFamily family = ModelFamily::kPNN;
  PNNConfig pnn;
  VDNNConfig vdnn;
};

struct RunResult {
  EvalReport report;
  TrainHistory history;
  double train_seconds = 0.0;
};

// Spectra for a whole manifest, preprocessed once and indexed by sample id so
// repeated split/train runs avoid redundant FFT work.
class PreparedDataset {
 public:
  PreparedDataset(const Manifest& manifest, std::size_t K, bool standardized);

  const Manifest& manifest() const { return manifest_; }
  std::size_t bins() const { return spectra_.cols; }

  Matrix gather(const Manifest& subset) const;
  std::vector<int> labels(const Manifest& subset) const;

 private:
  Manifest manifest_;
  Matrix spectra_;
  std::vector<std::size_t> row_of_sample_;
  std::size_t row_index(const std::string& id) const;
};

// Seed derivation shared by every sweep: run r splits with base+r and
// initializes with base+1e6+r; the shuffle stream uses base+2e6+r.
struct RunSeeds {
  std::uint64_t split = 0;
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
};
RunSeeds seeds_for_run(std::uint64_t base_seed, int run);

// Train on a stratified split of the prepared dataset and evaluate on the
// held-out part.
RunResult train_eval_once(const PreparedDataset& data, const ModelSetup& setup,
                          const TrainConfig& train_config, double train_fraction,
                          const RunSeeds& seeds);

struct SweepCell {
  double ratio = 0.0;
  RunStats stats;
};

std::vector<SweepCell> ratio_sweep(const PreparedDataset& data,
                                   const ModelSetup& setup,
                                   const TrainConfig& train_config,
                                   const std::vector<double>& ratios, int runs,
                                   std::uint64_t base_seed);

struct VariantResult {
  Wiring wiring = Wiring::kFull;
  RunStats stats;
};

// The four feed-forward wiring variants, trained under identical seeds.
std::vector<VariantResult> ablation_feedforward(const PreparedDataset& data,
                                                const PNNConfig& base_config,
                                                const TrainConfig& train_config,
                                                double train_fraction, int runs,
                                                std::uint64_t base_seed);

struct StandardizationResult {
  RunStats with_standardization;
  RunStats without_standardization;
};

// Compares max-of-bin standardization against the direct fixed-size DFT path
// on the same manifest (the manifest is preprocessed twice).
StandardizationResult ablation_standardization(const Manifest& manifest,
                                               std::size_t K,
                                               const PNNConfig& config,
                                               const TrainConfig& train_config,
                                               double train_fraction, int runs,
                                               std::uint64_t base_seed);

struct DepthHiddenCell {
  int depth = 0;
  int hidden_width = 0;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  std::size_t model_bytes = 0;
  std::size_t hidden_weights = 0;
};

std::vector<DepthHiddenCell> depth_hidden_sweep(
    const PreparedDataset& data, const std::vector<int>& depths,
    const std::vector<int>& hidden_widths, const PNNConfig& base_config,
    const TrainConfig& train_config, double train_fraction,
    std::uint64_t base_seed);

struct MaskReport {
  std::size_t mask_size = 0;
  double unmasked_score = 0.0;
  std::vector<double> deltas;  // score(unmasked) - score(masked), per window
  std::size_t argmax_deficit_window = 0;
};

// Zero one spectral window at a time and record the softmax-score drop for
// the true class. Windows tile [0, K) in steps of mask_size.
MaskReport mask_sweep(PNNModel& model, const std::vector<double>& spectrum,
                      int true_class, std::size_t mask_size);

struct ClassMaskSummary {
  int class_index = 0;
  std::vector<double> mean_deltas;
  std::size_t argmax_deficit_window = 0;
};

// mask_sweep averaged over every sample of each class in a dataset.
std::vector<ClassMaskSummary> class_mask_attribution(PNNModel& model,
                                                     const Matrix& spectra,
                                                     const std::vector<int>& labels,
                                                     std::size_t mask_size);

}  // namespace pnnkit
