#include "pnnkit/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pnnkit/common.hpp"
#include "pnnkit/rng.hpp"

namespace fs = std::filesystem;

namespace pnnkit {

void Manifest::validate() const {
  if (classes.size() < 2) {
    throw ValidationError("manifest: need at least 2 classes");
  }
  std::unordered_set<std::string> ids;
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& s : samples) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= classes.size()) {
      throw ValidationError("manifest: sample \"" + s.id +
                            "\" has an out-of-range class");
    }
    if (!ids.insert(s.id).second) {
      throw ValidationError("manifest: duplicate sample id \"" + s.id + "\"");
    }
    counts[static_cast<std::size_t>(s.label)] += 1;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw ValidationError("manifest: class \"" + classes[c] +
                            "\" has no samples");
    }
  }
}

std::vector<std::size_t> Manifest::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& s : samples) {
    counts[static_cast<std::size_t>(s.label)] += 1;
  }
  return counts;
}

std::string Manifest::resolve_path(const Sample& sample) const {
  fs::path p(sample.signal_path);
  if (p.is_absolute() || base_dir.empty()) return sample.signal_path;
  return (fs::path(base_dir) / p).string();
}

std::pair<Manifest, Manifest> split(const Manifest& manifest,
                                    const SplitSpec& spec) {
  manifest.validate();
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ValidationError("split: train fraction must be in (0,1)");
  }
  Manifest train = manifest;
  Manifest test = manifest;
  train.samples.clear();
  test.samples.clear();
  Rng rng(spec.seed);

  const auto take = [&](std::vector<std::size_t>& pool, std::size_t n_train) {
    rng.shuffle(pool);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Sample& s = manifest.samples[pool[i]];
      (i < n_train ? train : test).samples.push_back(s);
    }
  };

  if (spec.stratified) {
    for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
        if (static_cast<std::size_t>(manifest.samples[i].label) == c) {
          pool.push_back(i);
        }
      }
      // Round half up, floored at one training sample per class.
      const std::size_t n_train = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(
                 spec.train_fraction * static_cast<double>(pool.size()) + 0.5)));
      take(pool, std::min(n_train, pool.size()));
    }
  } else {
    std::vector<std::size_t> pool(manifest.samples.size());
    std::iota(pool.begin(), pool.end(), 0);
    const std::size_t n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(
               spec.train_fraction * static_cast<double>(pool.size()) + 0.5)));
    take(pool, std::min(n_train, pool.size()));
  }
  return {std::move(train), std::move(test)};
}

std::pair<std::size_t, std::size_t> ClassBand::bin_range(
    double sample_rate_hz, std::size_t K) const {
  const double nyquist = sample_rate_hz / 2.0;
  const double lo = std::max(0.0, (center_hz - width_hz / 2.0) / nyquist);
  const double hi = std::min(1.0, (center_hz + width_hz / 2.0) / nyquist);
  auto lo_bin = static_cast<std::size_t>(std::floor(lo * static_cast<double>(K)));
  auto hi_bin = static_cast<std::size_t>(std::ceil(hi * static_cast<double>(K)));
  return {std::min(lo_bin, K - 1), std::min(std::max(hi_bin, lo_bin + 1), K)};
}

SynthResult synth_generate(const SynthSpec& spec, const std::string& out_dir) {
  if (spec.classes < 2) throw ValidationError("synth: need at least 2 classes");
  if (spec.samples_per_class < 1) {
    throw ValidationError("synth: need at least 1 sample per class");
  }
  if (!(spec.sample_rate_hz > 0.0) || !(spec.base_freq_hz > 0.0)) {
    throw ValidationError("synth: rates must be positive");
  }
  const double nyquist = spec.sample_rate_hz / 2.0;
  if (spec.base_freq_hz * spec.harmonics >= nyquist) {
    throw ValidationError("synth: harmonics exceed Nyquist frequency");
  }
  if (!(spec.burst_fraction > 0.0 && spec.burst_fraction <= 1.0)) {
    throw ValidationError("synth: burst fraction must be in (0,1]");
  }

  fs::create_directories(out_dir);
  SynthResult result;
  result.manifest.base_dir = out_dir;
  result.manifest.provenance =
      "synthetic rotating-machinery benchmark, seed " +
      std::to_string(spec.seed);

  const double kTau = 2.0 * 3.14159265358979323846;
  // The shaft harmonics are common to every class: they are operating-state
  // nuisance structure, not a fault signature.
  std::vector<double> harmonic_amps;
  {
    Rng hrng(derive_seed(spec.seed, 999));
    for (int h = 0; h < spec.harmonics; ++h) {
      harmonic_amps.push_back(hrng.uniform(0.5, 1.0));
    }
  }

  // Class identity is carried by one resonance band per class. Bands live in
  // distinct slots of the upper spectrum so the attribution ground truth
  // stays unambiguous.
  const double band_region_lo = 0.30, band_region_hi = 0.88;
  const double slot = (band_region_hi - band_region_lo) / spec.classes;

  for (int c = 0; c < spec.classes; ++c) {
    Rng crng(derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(c)));
    const double center_rel =
        band_region_lo + slot * (c + crng.uniform(0.35, 0.65));
    const double width_rel = crng.uniform(0.015, 0.025);
    ClassBand band;
    band.center_hz = center_rel * nyquist;
    band.width_hz = width_rel * nyquist;
    if (band.center_hz + band.width_hz / 2.0 >= nyquist) {
      throw ValidationError("synth: resonance band above Nyquist");
    }
    result.bands.push_back(band);
    result.manifest.classes.push_back("fault" + std::to_string(c));
  }

  const bool noise_on = std::isfinite(spec.noise_snr_db);
  for (int c = 0; c < spec.classes; ++c) {
    const ClassBand& band = result.bands[static_cast<std::size_t>(c)];
    for (int k = 0; k < spec.samples_per_class; ++k) {
      Rng srng(derive_seed(spec.seed,
                           1000000 + static_cast<std::uint64_t>(c) * 100003 +
                               static_cast<std::uint64_t>(k)));
      std::size_t length = spec.signal_length;
      if (!spec.length_choices.empty()) {
        length = spec.length_choices[static_cast<std::size_t>(k) %
                                     spec.length_choices.size()];
      }
      // Components are scaled by 2/L so spectral peak magnitudes stay O(1)
      // regardless of record length.
      const double scale = 2.0 / static_cast<double>(length);

      struct Tone {
        double amp, freq, phase;
      };
      std::vector<Tone> tones;
      for (int h = 0; h < spec.harmonics; ++h) {
        tones.push_back({harmonic_amps[static_cast<std::size_t>(h)] *
                             srng.uniform(0.9, 1.1),
                         spec.base_freq_hz * (h + 1),
                         srng.uniform(0.0, kTau)});
      }
      // The fault signature: moderate tones spread across the class band,
      // re-drawn per sample so memorizing exact bins does not work. With
      // burst_fraction < 1 they fire only inside one window of the record,
      // boosted by 1/fraction so the full-record peak stays comparable.
      std::vector<Tone> band_tone_list;
      const int band_tones = 6;
      for (int t = 0; t < band_tones; ++t) {
        band_tone_list.push_back(
            {srng.uniform(0.8, 1.2) / spec.burst_fraction,
             srng.uniform(band.center_hz - band.width_hz / 2.0,
                          band.center_hz + band.width_hz / 2.0),
             srng.uniform(0.0, kTau)});
      }
      const auto burst_len = static_cast<std::size_t>(
          std::llround(spec.burst_fraction * static_cast<double>(length)));
      const std::size_t burst_start =
          burst_len >= length
              ? 0
              : static_cast<std::size_t>(srng.uniform_int(
                    static_cast<std::uint64_t>(length - burst_len + 1)));
      // Broadband interference: isolated tones anywhere in the band region,
      // including inside other classes' bands. Telling a lone spike from a
      // band-wide elevation is what makes the benchmark nontrivial.
      const int distractor_tones = 5;
      for (int t = 0; t < distractor_tones; ++t) {
        tones.push_back({srng.uniform(0.3, 0.8),
                         srng.uniform(0.25, 0.92) * nyquist,
                         srng.uniform(0.0, kTau)});
      }

      RawSignal signal;
      signal.sample_rate_hz = spec.sample_rate_hz;
      signal.samples.assign(length, 0.0);
      for (std::size_t n = 0; n < length; ++n) {
        double x = 0.0;
        const double t = static_cast<double>(n) / spec.sample_rate_hz;
        for (const Tone& tone : tones) {
          x += tone.amp * std::cos(kTau * tone.freq * t + tone.phase);
        }
        if (n >= burst_start && n < burst_start + burst_len) {
          for (const Tone& tone : band_tone_list) {
            x += tone.amp * std::cos(kTau * tone.freq * t + tone.phase);
          }
        }
        signal.samples[n] = scale * x;
      }
      if (noise_on) {
        double power = 0.0;
        for (double x : signal.samples) power += x * x;
        power /= static_cast<double>(length);
        const double sigma =
            std::sqrt(power * std::pow(10.0, -spec.noise_snr_db / 10.0));
        for (double& x : signal.samples) x += sigma * srng.normal();
      }

      const std::string id =
          "c" + std::to_string(c) + "_s" + std::to_string(k);
      const std::string file = id + ".sig";
      save_signal(signal, (fs::path(out_dir) / file).string());
      result.manifest.samples.push_back({id, c, file});
    }
  }
  result.manifest.validate();
  return result;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  manifest.validate();
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  os << "PNNMAN1 " << manifest.classes.size() << ' ' << manifest.spectrum_bins
     << '\n';
  if (!manifest.provenance.empty()) {
    os << "# provenance: " << manifest.provenance << '\n';
  }
  for (const auto& c : manifest.classes) os << c << '\n';
  for (const auto& s : manifest.samples) {
    os << s.id << '\t' << manifest.classes[static_cast<std::size_t>(s.label)]
       << '\t' << s.signal_path << '\n';
  }
  if (!os) throw ValidationError("write failed: " + path);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open manifest: " + path);
  Manifest manifest;
  manifest.base_dir = fs::path(path).parent_path().string();

  std::string line;
  std::size_t class_count = 0;
  if (!std::getline(is, line)) {
    throw FormatError(path + ": empty manifest");
  }
  {
    std::istringstream header(line);
    std::string magic;
    header >> magic >> class_count >> manifest.spectrum_bins;
    if (magic != "PNNMAN1" || class_count < 2 || manifest.spectrum_bins < 1) {
      throw FormatError(path + ": bad manifest header \"" + line + "\"");
    }
  }
  std::unordered_map<std::string, int> class_index;
  while (manifest.classes.size() < class_count && std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# provenance: ", 0) == 0) {
        manifest.provenance = line.substr(14);
      }
      continue;
    }
    class_index[line] = static_cast<int>(manifest.classes.size());
    manifest.classes.push_back(line);
  }
  if (manifest.classes.size() != class_count) {
    throw FormatError(path + ": expected " + std::to_string(class_count) +
                      " class names");
  }
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Sample s;
    std::string class_name;
    if (!std::getline(row, s.id, '\t') || !std::getline(row, class_name, '\t') ||
        !std::getline(row, s.signal_path)) {
      throw FormatError(path + ": malformed sample line \"" + line + "\"");
    }
    const auto it = class_index.find(class_name);
    if (it == class_index.end()) {
      throw FormatError(path + ": sample \"" + s.id + "\" names unknown class \"" +
                        class_name + "\"");
    }
    s.label = it->second;
    manifest.samples.push_back(std::move(s));
  }
  manifest.validate();
  for (const auto& s : manifest.samples) {
    if (!fs::exists(manifest.resolve_path(s))) {
      throw ValidationError(path + ": sample \"" + s.id +
                            "\" references missing signal file " +
                            manifest.resolve_path(s));
    }
  }
  return manifest;
}

LoadedDataset load_dataset_spectra(const Manifest& manifest, std::size_t K,
                                   bool standardized,
                                   const PreprocessOptions& opts) {
  manifest.validate();
  LoadedDataset out;
  out.spectra = Matrix(manifest.samples.size(), K);
  out.labels.reserve(manifest.samples.size());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const Sample& s = manifest.samples[i];
    const RawSignal signal = load_signal(manifest.resolve_path(s));
    const Spectrum spec = standardized ? preprocess(signal, K, opts)
                                       : direct_dft_fixed(signal, K);
    std::copy(spec.bins.begin(), spec.bins.end(), out.spectra.row(i));
    out.labels.push_back(s.label);
  }
  return out;
}

double nearest_centroid_accuracy(const LoadedDataset& train,
                                 const LoadedDataset& test, int class_count) {
  const std::size_t k = train.spectra.cols;
  Matrix centroids(static_cast<std::size_t>(class_count), k);
  std::vector<double> counts(static_cast<std::size_t>(class_count), 0.0);
  for (std::size_t i = 0; i < train.spectra.rows; ++i) {
    const auto c = static_cast<std::size_t>(train.labels[i]);
    for (std::size_t j = 0; j < k; ++j) {
      centroids(c, j) += train.spectra(i, j);
    }
    counts[c] += 1.0;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0.0) {
      for (std::size_t j = 0; j < k; ++j) centroids(c, j) /= counts[c];
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.spectra.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_class = 0;
    for (int c = 0; c < class_count; ++c) {
      double dist = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d =
            test.spectra(i, j) - centroids(static_cast<std::size_t>(c), j);
        dist += d * d;
      }
      if (dist < best) {
        best = dist;
        best_class = c;
      }
    }
    if (best_class == test.labels[i]) ++correct;
  }
  return test.spectra.rows == 0
             ? 0.0
             : static_cast<double>(correct) /
                   static_cast<double>(test.spectra.rows);
}

}  // namespace pnnkit
