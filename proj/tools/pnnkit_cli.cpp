// Command-line front end: preprocess, synth, split, train, eval, sweep,
// ablate, mask, paramcount.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pnnkit/common.hpp"
#include "pnnkit/data.hpp"
#include "pnnkit/experiments.hpp"
#include "pnnkit/metrics.hpp"
#include "pnnkit/pnn.hpp"
#include "pnnkit/rng.hpp"
#include "pnnkit/spectral.hpp"
#include "pnnkit/training.hpp"
#include "pnnkit/vdnn.hpp"

namespace fs = std::filesystem;
using namespace pnnkit;

namespace {

// Resolved configuration: defaults < config file < command-line flags.
class Settings {
 public:
  Settings() {
    values_ = {
        {"k", "16384"},          {"hd", "100"},
        {"depth", "6"},          {"classes", "7"},
        {"ratio", "0.75"},       {"runs", "5"},
        {"epochs", "30"},        {"batch", "8"},
        {"lr", "0.0001"},        {"wd", "0.0001"},
        {"mask-size", "500"},    {"arch", "pnn"},
        {"variant", "full"},     {"standardize", "on"},
        {"seed", "0"},           {"samples-per-class", "75"},
        {"signal-length", "8192"}, {"sample-rate", "20000"},
        {"base-freq", "60"},     {"snr-db", "15"},
        {"lengths", ""},         {"shrink", "0.5"},
        {"min-width", "1"},      {"ablation", "feedforward"},
    };
  }

  void load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("missing config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": expected key = value");
      }
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), path);
    }
  }

  void set(const std::string& key, const std::string& value,
           const std::string& source = "flags") {
    if (values_.find(key) == values_.end()) {
      throw ValidationError(source + ": unknown key \"" + key + "\"");
    }
    values_[key] = value;
  }

  const std::string& str(const std::string& key) const {
    return values_.at(key);
  }
  int integer(const std::string& key) const {
    return std::stoi(values_.at(key));
  }
  double real(const std::string& key) const {
    return std::stod(values_.at(key));
  }
  std::uint64_t seed() const { return std::stoull(values_.at("seed")); }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
  }

  void write_stamp(const fs::path& out_dir, const std::string& subcommand) const {
    std::ofstream os(out_dir / "stamp.txt");
    os << "artifact = " << kArtifactVersion << '\n';
    os << "subcommand = " << subcommand << '\n';
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  }

  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }
  std::map<std::string, std::string> values_;
};

PNNConfig pnn_config_from(const Settings& s, std::size_t k, int classes) {
  PNNConfig cfg;
  cfg.input_bins = static_cast<int>(k);
  cfg.hidden_width = s.integer("hd");
  cfg.depth = s.integer("depth");
  cfg.class_count = classes;
  cfg.wiring = wiring_from_name(s.str("variant"));
  return cfg;
}

VDNNConfig vdnn_config_from(const Settings& s, std::size_t k, int classes) {
  VDNNConfig cfg;
  cfg.input_bins = static_cast<int>(k);
  cfg.depth = s.integer("depth");
  cfg.class_count = classes;
  cfg.shrink = s.real("shrink");
  cfg.min_width = s.integer("min-width");
  return cfg;
}

TrainConfig train_config_from(const Settings& s) {
  TrainConfig cfg;
  cfg.learning_rate = s.real("lr");
  cfg.weight_decay = s.real("wd");
  cfg.batch_size = s.integer("batch");
  cfg.epochs = s.integer("epochs");
  cfg.seed = s.seed();
  return cfg;
}

std::string detect_model_kind(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open model file: " + path);
  char magic[8] = {};
  is.read(magic, 8);
  if (std::string(magic, 3) == "PNN") return "pnn";
  if (std::string(magic, 3) == "VDN") return "vdnn";
  throw FormatError(path + ": not a model container");
}

struct EvalOutput {
  EvalReport report;
};

EvalReport eval_model(const std::string& model_path,
                      const std::string& manifest_path, const Settings& s) {
  const Manifest manifest = load_manifest(manifest_path);
  const bool standardized = s.str("standardize") != "off";
  if (detect_model_kind(model_path) == "pnn") {
    PNNModel model = pnn_load(model_path);
    const LoadedDataset data = load_dataset_spectra(
        manifest, static_cast<std::size_t>(model.config.input_bins),
        standardized);
    const Matrix probs =
        pnn_forward(model, data.spectra, Mode::kInfer);
    return evaluate(probs, data.labels);
  }
  VDNNModel model = vdnn_load(model_path);
  const LoadedDataset data = load_dataset_spectra(
      manifest, static_cast<std::size_t>(model.config.input_bins),
      standardized);
  const Matrix probs = vdnn_forward(model, data.spectra, Mode::kInfer);
  return evaluate(probs, data.labels);
}

void print_run_stats(std::ostream& os, const RunStats& stats) {
  os << "accuracy_mean = " << stats.accuracy.mean;
  if (stats.accuracy.sd) os << "\naccuracy_sd = " << *stats.accuracy.sd;
  os << "\nmacro_f1_mean = " << stats.macro_f1.mean;
  if (stats.macro_f1.sd) os << "\nmacro_f1_sd = " << *stats.macro_f1.sd;
  os << "\nauroc_mean = " << stats.auroc.mean;
  if (stats.auroc.sd) os << "\nauroc_sd = " << *stats.auroc.sd;
  os << "\nruns = " << stats.runs << '\n';
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Progressive-network fault-classification toolkit"};
  app.require_subcommand(1);

  Settings settings;
  std::string config_path;
  std::string out_dir = [] {
    const char* env = std::getenv("PNNKIT_OUT");
    return std::string(env ? env : "pnnkit_out");
  }();

  std::map<std::string, std::string> flag_values;
  std::vector<std::string> positionals;
  std::string subcommand;

  const std::vector<std::string> flag_keys = {
      "seed", "k",  "hd",   "depth",  "classes",  "ratio",     "runs",
      "epochs", "batch", "lr", "wd", "mask-size", "arch", "variant",
      "standardize", "ablation", "samples-per-class", "signal-length",
      "sample-rate", "base-freq", "snr-db", "lengths", "shrink", "min-width"};

  auto add_common = [&](CLI::App* sub, int n_positional) {
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory");
    for (const auto& key : flag_keys) {
      sub->add_option_function<std::string>(
          "--" + key,
          [&flag_values, key](const std::string& v) { flag_values[key] = v; });
    }
    if (n_positional > 0) {
      sub->add_option("inputs", positionals)->expected(n_positional);
    }
    sub->callback([&, sub] { subcommand = sub->get_name(); });
  };

  add_common(app.add_subcommand("preprocess", "standardize one signal file"), 1);
  add_common(app.add_subcommand("synth", "generate a synthetic benchmark"), 0);
  add_common(app.add_subcommand("split", "stratified train/test split"), 1);
  add_common(app.add_subcommand("train", "train a model on a manifest"), 1);
  add_common(app.add_subcommand("eval", "evaluate a model on a manifest"), 2);
  add_common(app.add_subcommand("sweep", "division-ratio sweep"), 1);
  add_common(app.add_subcommand("ablate", "ablation experiments"), 1);
  add_common(app.add_subcommand("mask", "spectral masking attribution"), 2);
  add_common(app.add_subcommand("paramcount", "parameter-count breakdown"), 0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << '\n' << app.help() << '\n';
    return 1;
  }

  if (!config_path.empty()) settings.load_file(config_path);
  for (const auto& [k, v] : flag_values) settings.set(k, v);

  fs::create_directories(out_dir);
  settings.write_stamp(out_dir, subcommand);

  const std::size_t k = static_cast<std::size_t>(settings.integer("k"));

  if (subcommand == "paramcount") {
    if (settings.str("arch") == "pnn") {
      PNNConfig cfg = pnn_config_from(settings, k, settings.integer("classes"));
      const ParamCount pc = pnn_param_count(cfg);
      std::cout << "hidden_weights=" << pc.hidden_weights << '\n'
                << "hidden_biases=" << pc.hidden_biases << '\n'
                << "bn_params=" << pc.bn_params << '\n'
                << "classifier_params=" << pc.classifier_params << '\n'
                << "total=" << pc.total << '\n';
    } else {
      VDNNConfig cfg = vdnn_config_from(settings, k, settings.integer("classes"));
      const VDNNParamCount pc = vdnn_param_count(cfg);
      std::cout << "hidden_weights=" << pc.hidden_weights << '\n'
                << "hidden_biases=" << pc.hidden_biases << '\n'
                << "bn_params=" << pc.bn_params << '\n'
                << "classifier_params=" << pc.classifier_params << '\n'
                << "total=" << pc.total << '\n';
    }
    return 0;
  }

  if (subcommand == "preprocess") {
    const RawSignal signal = load_signal(positionals[0]);
    const Spectrum spectrum = preprocess(signal, k);
    const fs::path out =
        fs::path(out_dir) / (fs::path(positionals[0]).stem().string() + ".spc");
    save_spectrum(spectrum, out.string());
    std::cout << "wrote " << out.string() << '\n';
    return 0;
  }

  if (subcommand == "synth") {
    SynthSpec spec;
    spec.classes = settings.integer("classes");
    spec.samples_per_class = settings.integer("samples-per-class");
    spec.signal_length =
        static_cast<std::size_t>(settings.integer("signal-length"));
    for (double l : settings.real_list("lengths")) {
      spec.length_choices.push_back(static_cast<std::size_t>(l));
    }
    spec.sample_rate_hz = settings.real("sample-rate");
    spec.base_freq_hz = settings.real("base-freq");
    spec.noise_snr_db = settings.real("snr-db");
    spec.seed = settings.seed();
    const SynthResult result = synth_generate(spec, out_dir);
    Manifest manifest = result.manifest;
    manifest.spectrum_bins = k;
    save_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());
    std::ofstream bands(fs::path(out_dir) / "bands.txt");
    bands << "class\tcenter_hz\twidth_hz\n";
    for (std::size_t c = 0; c < result.bands.size(); ++c) {
      bands << manifest.classes[c] << '\t' << result.bands[c].center_hz << '\t'
            << result.bands[c].width_hz << '\n';
    }
    std::cout << "wrote " << manifest.samples.size() << " signals under "
              << out_dir << '\n';
    return 0;
  }

  if (subcommand == "split") {
    Manifest manifest = load_manifest(positionals[0]);
    // Rebase signal paths so the split manifests work from the out dir.
    for (auto& s : manifest.samples) {
      s.signal_path = fs::absolute(manifest.resolve_path(s)).string();
    }
    manifest.base_dir.clear();
    SplitSpec spec;
    spec.train_fraction = settings.real("ratio");
    spec.seed = settings.seed();
    const auto [train_m, test_m] = split(manifest, spec);
    save_manifest(train_m, (fs::path(out_dir) / "train.txt").string());
    save_manifest(test_m, (fs::path(out_dir) / "test.txt").string());
    std::cout << "train=" << train_m.samples.size()
              << " test=" << test_m.samples.size() << '\n';
    return 0;
  }

  if (subcommand == "train") {
    const Manifest manifest = load_manifest(positionals[0]);
    const bool standardized = settings.str("standardize") != "off";
    const LoadedDataset data = load_dataset_spectra(manifest, k, standardized);
    TrainConfig tc = train_config_from(settings);
    const int classes = static_cast<int>(manifest.classes.size());
    TrainHistory history;
    fs::path model_path;
    if (settings.str("arch") == "pnn") {
      PNNModel model =
          pnn_init(pnn_config_from(settings, k, classes),
                   derive_seed(settings.seed(), 1));
      history = train(model.net, data.spectra, data.labels, tc);
      model_path = fs::path(out_dir) / "model.pnn";
      pnn_save(model, model_path.string());
    } else if (settings.str("arch") == "vdnn") {
      VDNNModel model =
          vdnn_init(vdnn_config_from(settings, k, classes),
                    derive_seed(settings.seed(), 1));
      history = train(model.net, data.spectra, data.labels, tc);
      model_path = fs::path(out_dir) / "model.vdnn";
      vdnn_save(model, model_path.string());
    } else {
      throw ValidationError("unknown arch: " + settings.str("arch"));
    }
    std::ofstream hs(fs::path(out_dir) / "history.txt");
    history.write(hs);
    std::cout << "wrote " << model_path.string() << '\n';
    return 0;
  }

  if (subcommand == "eval") {
    const EvalReport report = eval_model(positionals[0], positionals[1],
                                         settings);
    std::ofstream os(fs::path(out_dir) / "report.txt");
    report.write(os);
    report.write(std::cout);
    return 0;
  }

  if (subcommand == "sweep" || subcommand == "ablate") {
    const Manifest manifest = load_manifest(positionals[0]);
    const int classes = static_cast<int>(manifest.classes.size());
    const TrainConfig tc = train_config_from(settings);
    const int runs = settings.integer("runs");
    const std::uint64_t base_seed = settings.seed();
    std::ofstream os(fs::path(out_dir) /
                     (subcommand == "sweep" ? "sweep.txt" : "ablation.txt"));

    if (subcommand == "sweep") {
      const PreparedDataset data(manifest, k, true);
      ModelSetup setup;
      if (settings.str("arch") == "vdnn") {
        setup.family = ModelFamily::kVDNN;
        setup.vdnn = vdnn_config_from(settings, k, classes);
      } else {
        setup.pnn = pnn_config_from(settings, k, classes);
      }
      const auto cells = ratio_sweep(data, setup, tc,
                                     settings.real_list("ratio"), runs,
                                     base_seed);
      os << "ratio\taccuracy_mean\taccuracy_sd\tmacro_f1_mean\tauroc_mean\n";
      for (const auto& cell : cells) {
        os << cell.ratio << '\t' << cell.stats.accuracy.mean << '\t'
           << (cell.stats.accuracy.sd ? *cell.stats.accuracy.sd : 0.0) << '\t'
           << cell.stats.macro_f1.mean << '\t' << cell.stats.auroc.mean << '\n';
      }
    } else if (settings.str("ablation") == "feedforward") {
      const PreparedDataset data(manifest, k, true);
      const auto results = ablation_feedforward(
          data, pnn_config_from(settings, k, classes), tc,
          settings.real("ratio"), runs, base_seed);
      os << "variant\taccuracy_mean\taccuracy_sd\n";
      for (const auto& r : results) {
        os << wiring_name(r.wiring) << '\t' << r.stats.accuracy.mean << '\t'
           << (r.stats.accuracy.sd ? *r.stats.accuracy.sd : 0.0) << '\n';
      }
    } else if (settings.str("ablation") == "standardization") {
      const auto result = ablation_standardization(
          manifest, k, pnn_config_from(settings, k, classes), tc,
          settings.real("ratio"), runs, base_seed);
      os << "standardization\taccuracy_mean\taccuracy_sd\n"
         << "with\t" << result.with_standardization.accuracy.mean << '\t'
         << (result.with_standardization.accuracy.sd
                 ? *result.with_standardization.accuracy.sd
                 : 0.0)
         << '\n'
         << "without\t" << result.without_standardization.accuracy.mean << '\t'
         << (result.without_standardization.accuracy.sd
                 ? *result.without_standardization.accuracy.sd
                 : 0.0)
         << '\n';
    } else if (settings.str("ablation") == "depth_hidden") {
      const PreparedDataset data(manifest, k, true);
      const auto cells = depth_hidden_sweep(
          data, {3, 4, 5, 6}, {settings.integer("hd")},
          pnn_config_from(settings, k, classes), tc, settings.real("ratio"),
          base_seed);
      os << "depth\thd\taccuracy\ttrain_seconds\tmodel_bytes\thidden_weights\n";
      for (const auto& c : cells) {
        os << c.depth << '\t' << c.hidden_width << '\t' << c.accuracy << '\t'
           << c.train_seconds << '\t' << c.model_bytes << '\t'
           << c.hidden_weights << '\n';
      }
    } else {
      throw ValidationError("unknown ablation: " + settings.str("ablation"));
    }
    std::cout << "wrote results under " << out_dir << '\n';
    return 0;
  }

  if (subcommand == "mask") {
    PNNModel model = pnn_load(positionals[0]);
    const Manifest manifest = load_manifest(positionals[1]);
    const LoadedDataset data = load_dataset_spectra(
        manifest, static_cast<std::size_t>(model.config.input_bins), true);
    const auto mask_size =
        static_cast<std::size_t>(settings.integer("mask-size"));
    const auto summaries =
        class_mask_attribution(model, data.spectra, data.labels, mask_size);
    std::ofstream os(fs::path(out_dir) / "mask.txt");
    os << "class\targmax_deficit_window\tmask_size\n";
    for (const auto& s : summaries) {
      os << manifest.classes[static_cast<std::size_t>(s.class_index)] << '\t'
         << s.argmax_deficit_window << '\t' << mask_size << '\n';
    }
    std::cout << "wrote " << (fs::path(out_dir) / "mask.txt").string() << '\n';
    return 0;
  }

  throw ValidationError("unhandled subcommand: " + subcommand);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 2;
  }
}
