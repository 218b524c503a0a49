#include "pnnkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <unordered_map>

namespace fs = std::filesystem;

namespace pnnkit {

PreparedDataset::PreparedDataset(const Manifest& manifest, std::size_t K,
                                 bool standardized)
    : manifest_(manifest) {
  const LoadedDataset loaded = load_dataset_spectra(manifest, K, standardized);
  spectra_ = loaded.spectra;
  row_of_sample_.resize(manifest.samples.size());
}

std::size_t PreparedDataset::row_index(const std::string& id) const {
  for (std::size_t i = 0; i < manifest_.samples.size(); ++i) {
    if (manifest_.samples[i].id == id) return i;
  }
  throw ValidationError("prepared dataset: unknown sample id \"" + id + "\"");
}

Matrix PreparedDataset::gather(const Manifest& subset) const {
  Matrix out(subset.samples.size(), spectra_.cols);
  for (std::size_t i = 0; i < subset.samples.size(); ++i) {
    const std::size_t r = row_index(subset.samples[i].id);
    std::copy(spectra_.row(r), spectra_.row(r) + spectra_.cols, out.row(i));
  }
  return out;
}

std::vector<int> PreparedDataset::labels(const Manifest& subset) const {
  std::vector<int> out;
  out.reserve(subset.samples.size());
  for (const auto& s : subset.samples) out.push_back(s.label);
  return out;
}

RunSeeds seeds_for_run(std::uint64_t base_seed, int run) {
  const auto r = static_cast<std::uint64_t>(run);
  return {base_seed + r, base_seed + 1000000 + r, base_seed + 2000000 + r};
}

RunResult train_eval_once(const PreparedDataset& data, const ModelSetup& setup,
                          const TrainConfig& train_config, double train_fraction,
                          const RunSeeds& seeds) {
  SplitSpec split_spec;
  split_spec.train_fraction = train_fraction;
  split_spec.seed = seeds.split;
  const auto [train_manifest, test_manifest] = split(data.manifest(), split_spec);
  if (test_manifest.samples.empty()) {
    throw ValidationError("experiment: split produced an empty test set");
  }

  const Matrix train_x = data.gather(train_manifest);
  const std::vector<int> train_y = data.labels(train_manifest);
  const Matrix test_x = data.gather(test_manifest);
  const std::vector<int> test_y = data.labels(test_manifest);

  NetModel net = setup.family == ModelFamily::kPNN
                     ? init_net(pnn_net_spec(setup.pnn), seeds.init)
                     : init_net(vdnn_net_spec(setup.vdnn), seeds.init);

  TrainConfig cfg = train_config;
  cfg.seed = seeds.shuffle;
  cfg.batch_size = std::min<int>(cfg.batch_size,
                                 static_cast<int>(train_x.rows));
  if (cfg.batch_size < 2) cfg.batch_size = 2;

  RunResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.history = train(net, train_x, train_y, cfg);
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const Matrix probs = net_forward(net, test_x, Mode::kInfer);
  result.report = evaluate(probs, test_y);
  return result;
}

std::vector<SweepCell> ratio_sweep(const PreparedDataset& data,
                                   const ModelSetup& setup,
                                   const TrainConfig& train_config,
                                   const std::vector<double>& ratios, int runs,
                                   std::uint64_t base_seed) {
  if (ratios.empty() || runs < 1) {
    throw ValidationError("ratio_sweep: empty plan");
  }
  std::vector<SweepCell> cells;
  for (double ratio : ratios) {
    std::vector<EvalReport> reports;
    for (int r = 0; r < runs; ++r) {
      reports.push_back(train_eval_once(data, setup, train_config, ratio,
                                        seeds_for_run(base_seed, r))
                            .report);
    }
    cells.push_back({ratio, run_stats(reports)});
  }
  return cells;
}

std::vector<VariantResult> ablation_feedforward(const PreparedDataset& data,
                                                const PNNConfig& base_config,
                                                const TrainConfig& train_config,
                                                double train_fraction, int runs,
                                                std::uint64_t base_seed) {
  std::vector<VariantResult> results;
  for (Wiring wiring : {Wiring::kFull, Wiring::kNoZh, Wiring::kNoX,
                        Wiring::kNeither}) {
    ModelSetup setup;
    setup.family = ModelFamily::kPNN;
    setup.pnn = base_config;
    setup.pnn.wiring = wiring;
    std::vector<EvalReport> reports;
    for (int r = 0; r < runs; ++r) {
      reports.push_back(train_eval_once(data, setup, train_config,
                                        train_fraction,
                                        seeds_for_run(base_seed, r))
                            .report);
    }
    results.push_back({wiring, run_stats(reports)});
  }
  return results;
}

StandardizationResult ablation_standardization(const Manifest& manifest,
                                               std::size_t K,
                                               const PNNConfig& config,
                                               const TrainConfig& train_config,
                                               double train_fraction, int runs,
                                               std::uint64_t base_seed) {
  StandardizationResult result;
  for (bool standardized : {true, false}) {
    PreparedDataset data(manifest, K, standardized);
    ModelSetup setup;
    setup.pnn = config;
    std::vector<EvalReport> reports;
    for (int r = 0; r < runs; ++r) {
      reports.push_back(train_eval_once(data, setup, train_config,
                                        train_fraction,
                                        seeds_for_run(base_seed, r))
                            .report);
    }
    (standardized ? result.with_standardization
                  : result.without_standardization) = run_stats(reports);
  }
  return result;
}

std::vector<DepthHiddenCell> depth_hidden_sweep(
    const PreparedDataset& data, const std::vector<int>& depths,
    const std::vector<int>& hidden_widths, const PNNConfig& base_config,
    const TrainConfig& train_config, double train_fraction,
    std::uint64_t base_seed) {
  if (depths.empty() || hidden_widths.empty()) {
    throw ValidationError("depth_hidden_sweep: empty grid");
  }
  std::vector<DepthHiddenCell> cells;
  const fs::path tmp =
      fs::temp_directory_path() /
      ("pnnkit_sweep_" + std::to_string(base_seed) + ".model");
  for (int depth : depths) {
    for (int hd : hidden_widths) {
      ModelSetup setup;
      setup.pnn = base_config;
      setup.pnn.depth = depth;
      setup.pnn.hidden_width = hd;

      const RunSeeds seeds = seeds_for_run(base_seed, 0);
      RunResult run = train_eval_once(data, setup, train_config, train_fraction,
                                      seeds);
      DepthHiddenCell cell;
      cell.depth = depth;
      cell.hidden_width = hd;
      cell.accuracy = run.report.accuracy;
      cell.train_seconds = run.train_seconds;
      cell.hidden_weights = pnn_param_count(setup.pnn).hidden_weights;

      // Measured size of the serialized container.
      PNNModel model = pnn_init(setup.pnn, seeds.init);
      pnn_save(model, tmp.string(), /*float32=*/true);
      cell.model_bytes = static_cast<std::size_t>(fs::file_size(tmp));
      cells.push_back(cell);
    }
  }
  std::error_code ec;
  fs::remove(tmp, ec);
  return cells;
}

MaskReport mask_sweep(PNNModel& model, const std::vector<double>& spectrum,
                      int true_class, std::size_t mask_size) {
  const auto k = static_cast<std::size_t>(model.config.input_bins);
  if (spectrum.size() != k) {
    throw ValidationError("mask_sweep: spectrum width mismatch");
  }
  if (mask_size < 1 || mask_size > k) {
    throw ValidationError("mask_sweep: mask size out of range");
  }
  if (true_class < 0 || true_class >= model.config.class_count) {
    throw ValidationError("mask_sweep: class out of range");
  }

  const auto score_of = [&](const std::vector<double>& bins) {
    Matrix x(1, k);
    std::copy(bins.begin(), bins.end(), x.row(0));
    const Matrix probs = pnn_forward(model, x, Mode::kInfer);
    return probs(0, static_cast<std::size_t>(true_class));
  };

  MaskReport report;
  report.mask_size = mask_size;
  report.unmasked_score = score_of(spectrum);
  const std::size_t windows = (k + mask_size - 1) / mask_size;
  std::vector<double> masked = spectrum;
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t lo = w * mask_size;
    const std::size_t hi = std::min(lo + mask_size, k);
    std::fill(masked.begin() + static_cast<std::ptrdiff_t>(lo),
              masked.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
    report.deltas.push_back(report.unmasked_score - score_of(masked));
    std::copy(spectrum.begin() + static_cast<std::ptrdiff_t>(lo),
              spectrum.begin() + static_cast<std::ptrdiff_t>(hi),
              masked.begin() + static_cast<std::ptrdiff_t>(lo));
  }
  report.argmax_deficit_window = static_cast<std::size_t>(
      std::max_element(report.deltas.begin(), report.deltas.end()) -
      report.deltas.begin());
  return report;
}

std::vector<ClassMaskSummary> class_mask_attribution(
    PNNModel& model, const Matrix& spectra, const std::vector<int>& labels,
    std::size_t mask_size) {
  const auto k = static_cast<std::size_t>(model.config.input_bins);
  const std::size_t windows = (k + mask_size - 1) / mask_size;
  std::vector<ClassMaskSummary> summaries;
  for (int c = 0; c < model.config.class_count; ++c) {
    ClassMaskSummary summary;
    summary.class_index = c;
    summary.mean_deltas.assign(windows, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < spectra.rows; ++i) {
      if (labels[i] != c) continue;
      std::vector<double> bins(spectra.row(i), spectra.row(i) + spectra.cols);
      const MaskReport report = mask_sweep(model, bins, c, mask_size);
      for (std::size_t w = 0; w < windows; ++w) {
        summary.mean_deltas[w] += report.deltas[w];
      }
      ++count;
    }
    if (count > 0) {
      for (double& d : summary.mean_deltas) d /= static_cast<double>(count);
    }
    summary.argmax_deficit_window = static_cast<std::size_t>(
        std::max_element(summary.mean_deltas.begin(),
                         summary.mean_deltas.end()) -
        summary.mean_deltas.begin());
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

}  // namespace pnnkit
