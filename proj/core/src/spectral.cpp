#include "pnnkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pnnkit/io.hpp"

namespace pnnkit {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void RawSignal::validate() const {
  if (samples.size() < 2) {
    throw ValidationError("signal must contain at least 2 samples");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ValidationError("sample rate must be positive");
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw ValidationError("signal contains a non-finite sample");
    }
  }
}

void Spectrum::validate() const {
  if (bins.empty()) throw ValidationError("spectrum is empty");
  for (double b : bins) {
    if (!std::isfinite(b) || b < 0.0) {
      throw ValidationError("spectrum bins must be finite and non-negative");
    }
  }
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ValidationError("FFT length must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

std::vector<double> dft_magnitude(const RawSignal& signal) {
  signal.validate();
  const std::size_t padded = next_pow2(signal.samples.size());
  std::vector<std::complex<double>> buf(padded, {0.0, 0.0});
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    buf[i] = {signal.samples[i], 0.0};
  }
  fft_radix2(buf);
  std::vector<double> mags(padded / 2 + 1);
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(buf[i]);
  return mags;
}

Spectrum max_of_bin(const std::vector<double>& magnitudes, std::size_t K) {
  const std::size_t m = magnitudes.size();
  if (m == 0) throw ValidationError("max_of_bin: empty input");
  if (K == 0) throw ValidationError("max_of_bin: K must be positive");
  Spectrum out;
  out.bins.resize(K);
  if (m >= K) {
    for (std::size_t i = 0; i < K; ++i) {
      const std::size_t lo = i * m / K;
      const std::size_t hi = (i + 1) * m / K;
      double best = magnitudes[lo];
      for (std::size_t j = lo + 1; j < hi; ++j) {
        best = std::max(best, magnitudes[j]);
      }
      out.bins[i] = best;
    }
  } else {
    for (std::size_t i = 0; i < K; ++i) out.bins[i] = magnitudes[i * m / K];
  }
  return out;
}

Spectrum preprocess(const RawSignal& signal, std::size_t K,
                    const PreprocessOptions& opts) {
  Spectrum spec = max_of_bin(dft_magnitude(signal), K);
  if (opts.unit_max_scale) {
    const double peak = *std::max_element(spec.bins.begin(), spec.bins.end());
    if (peak > 0.0) {
      for (double& b : spec.bins) b /= peak;
    }
  }
  return spec;
}

Spectrum direct_dft_fixed(const RawSignal& signal, std::size_t K) {
  signal.validate();
  if (K == 0) throw ValidationError("direct_dft_fixed: K must be positive");
  std::vector<double> fixed(K, 0.0);
  const std::size_t n = std::min(K, signal.samples.size());
  std::copy_n(signal.samples.begin(), n, fixed.begin());

  const std::size_t padded = next_pow2(K);
  std::vector<std::complex<double>> buf(padded, {0.0, 0.0});
  for (std::size_t i = 0; i < K; ++i) buf[i] = {fixed[i], 0.0};
  fft_radix2(buf);
  Spectrum out;
  out.bins.resize(K);
  for (std::size_t i = 0; i < K; ++i) out.bins[i] = std::abs(buf[i]);
  return out;
}

namespace {
constexpr char kSignalMagic[8] = {'P', 'N', 'N', 'S', 'I', 'G', '1', '\0'};
constexpr char kSpectrumMagic[8] = {'P', 'N', 'N', 'S', 'P', 'C', '1', '\0'};
}  // namespace

void save_signal(const RawSignal& signal, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  write_bytes(os, kSignalMagic, 8);
  write_u64(os, signal.samples.size());
  write_u64(os, static_cast<std::uint64_t>(
                    std::llround(signal.sample_rate_hz * 1000.0)));
  write_f32_array(os, signal.samples);
  if (!os) throw ValidationError("write failed: " + path);
}

RawSignal load_signal(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open signal file: " + path);
  Reader r(is, path);
  r.expect_magic(kSignalMagic);
  const std::uint64_t count = r.u64();
  const std::uint64_t rate_mhz = r.u64();
  RawSignal signal;
  signal.samples = r.f32_array(count);
  signal.sample_rate_hz = static_cast<double>(rate_mhz) / 1000.0;
  return signal;
}

void save_spectrum(const Spectrum& spectrum, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  write_bytes(os, kSpectrumMagic, 8);
  write_u64(os, spectrum.bins.size());
  write_f32_array(os, spectrum.bins);
  if (!os) throw ValidationError("write failed: " + path);
}

Spectrum load_spectrum(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open spectrum file: " + path);
  Reader r(is, path);
  r.expect_magic(kSpectrumMagic);
  const std::uint64_t count = r.u64();
  Spectrum spec;
  spec.bins = r.f32_array(count);
  return spec;
}

}  // namespace pnnkit
