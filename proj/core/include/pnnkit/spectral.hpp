#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pnnkit/common.hpp"

namespace pnnkit {

// Variable-length time-domain vibration recording.
struct RawSignal {
  std::vector<double> samples;
  double sample_rate_hz = 1.0;

  void validate() const;
};

// Fixed-length standardized magnitude spectrum: the network input X.
struct Spectrum {
  std::vector<double> bins;

  std::size_t size() const { return bins.size(); }
  void validate() const;
};

inline constexpr std::size_t kDefaultSpectrumBins = 16384;

// In-place iterative radix-2 FFT; length must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse = false);

// One-sided magnitude spectrum |X[0..P/2]| where P is the signal length
// zero-padded up to the next power of two. Output length P/2 + 1.
std::vector<double> dft_magnitude(const RawSignal& signal);

// Standardize a magnitude vector of length M to exactly K bins.
// M >= K: bin i takes the max over input indices [floor(i*M/K), floor((i+1)*M/K)).
// M <  K: nearest-neighbor upsampling, which preserves peak magnitudes.
Spectrum max_of_bin(const std::vector<double>& magnitudes, std::size_t K);

struct PreprocessOptions {
  bool unit_max_scale = false;  // off by default; batch norm absorbs scale
};

// dft_magnitude followed by max_of_bin.
Spectrum preprocess(const RawSignal& signal, std::size_t K,
                    const PreprocessOptions& opts = {});

// The comparison path without standardization: the raw signal is truncated or
// zero-padded to K samples and a full K-point DFT magnitude (all K bins) is
// taken directly.
Spectrum direct_dft_fixed(const RawSignal& signal, std::size_t K);

// Binary containers: little-endian float32 payload.
// Signal file: magic "PNNSIG1\0", u64 sample count, u64 rate in millihertz.
// Spectrum file: magic "PNNSPC1\0", u64 bin count.
void save_signal(const RawSignal& signal, const std::string& path);
RawSignal load_signal(const std::string& path);
void save_spectrum(const Spectrum& spectrum, const std::string& path);
Spectrum load_spectrum(const std::string& path);

}  // namespace pnnkit
