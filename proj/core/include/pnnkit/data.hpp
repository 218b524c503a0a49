#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnnkit/spectral.hpp"
#include "pnnkit/tensor.hpp"

namespace pnnkit {

struct Sample {
  std::string id;
  int label = 0;            // index into Manifest::classes
  std::string signal_path;  // relative to the manifest's directory
};

struct Manifest {
  std::vector<std::string> classes;
  std::vector<Sample> samples;
  std::size_t spectrum_bins = kDefaultSpectrumBins;  // K
  std::string provenance;
  std::string base_dir;  // directory the signal paths resolve against

  void validate() const;
  std::vector<std::size_t> class_counts() const;
  std::string resolve_path(const Sample& sample) const;
};

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Per class, train count = max(1, round-half-up(fraction * class size)),
// members chosen by seeded shuffle. Unstratified mode shuffles globally and
// takes max(1, round(fraction * M)).
std::pair<Manifest, Manifest> split(const Manifest& manifest,
                                    const SplitSpec& spec);

struct SynthSpec {
  int classes = 7;
  int samples_per_class = 75;
  std::size_t signal_length = 8192;
  std::vector<std::size_t> length_choices;  // when set, cycled per sample
  double sample_rate_hz = 20000.0;
  double base_freq_hz = 60.0;
  double noise_snr_db = 15.0;  // infinity turns noise off
  std::uint64_t seed = 0;
  int harmonics = 5;
  // Fraction of the record carrying the resonance burst. 1.0 = continuous;
  // below 1.0 the band tones fire in one window at a random position, with
  // amplitude scaled so the full-record spectral peak stays comparable.
  double burst_fraction = 1.0;
};

// Class-specific resonance band, recorded so attribution experiments can be
// checked against ground truth.
struct ClassBand {
  double center_hz = 0.0;
  double width_hz = 0.0;

  // Band interval mapped onto a K-bin standardized spectrum.
  std::pair<std::size_t, std::size_t> bin_range(double sample_rate_hz,
                                                std::size_t K) const;
};

struct SynthResult {
  Manifest manifest;
  std::vector<ClassBand> bands;  // one per class
};

// Generate signal files plus a manifest under out_dir. Each class carries a
// distinct harmonic amplitude pattern and one resonance band; samples get
// +-10% amplitude jitter, random phases, and white noise at the given SNR.
SynthResult synth_generate(const SynthSpec& spec, const std::string& out_dir);

// Manifest text format: "PNNMAN1 <C> <K>" header, C class-name lines, then
// one "id<TAB>class<TAB>path" line per sample. '#' lines carry provenance.
void save_manifest(const Manifest& manifest, const std::string& path);
Manifest load_manifest(const std::string& path);

struct LoadedDataset {
  Matrix spectra;  // [M x K]
  std::vector<int> labels;
};

// Load every signal and produce the network input matrix. standardized=false
// takes the direct fixed-size DFT path instead of max-of-bin standardization.
LoadedDataset load_dataset_spectra(const Manifest& manifest, std::size_t K,
                                   bool standardized = true,
                                   const PreprocessOptions& opts = {});

// Nearest-centroid accuracy of a train/test pair of loaded spectra; the
// learnability self-test for generated benchmarks.
double nearest_centroid_accuracy(const LoadedDataset& train,
                                 const LoadedDataset& test, int class_count);

}  // namespace pnnkit
