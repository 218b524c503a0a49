#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "pnnkit/rng.hpp"
#include "pnnkit/spectral.hpp"

using namespace pnnkit;

namespace {

RawSignal tone(std::size_t length, double cycles, double amplitude = 1.0,
               double rate = 1000.0) {
  RawSignal s;
  s.sample_rate_hz = rate;
  s.samples.resize(length);
  for (std::size_t n = 0; n < length; ++n) {
    s.samples[n] = amplitude *
                   std::cos(2.0 * 3.14159265358979323846 * cycles *
                            static_cast<double>(n) / static_cast<double>(length));
  }
  return s;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("dft_magnitude of a constant signal is DC only") {
  RawSignal s{{1.0, 1.0, 1.0, 1.0}, 10.0};
  const auto mags = dft_magnitude(s);
  REQUIRE(mags.size() == 3);
  CHECK(mags[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(mags[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mags[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("single tone lands in one bin") {
  const auto mags = dft_magnitude(tone(8, 1.0));
  REQUIRE(mags.size() == 5);
  CHECK(mags[1] == doctest::Approx(4.0).epsilon(1e-9));
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (i != 1) CHECK(std::abs(mags[i]) < 1e-9);
  }
}

TEST_CASE("Parseval identity on a random 1024-sample signal") {
  Rng rng(42);
  RawSignal s;
  s.sample_rate_hz = 1.0;
  for (int i = 0; i < 1024; ++i) s.samples.push_back(rng.normal());

  const std::size_t L = s.samples.size();
  const auto half = dft_magnitude(s);
  // Reconstruct the two-sided sum from the one-sided half (real signal).
  double spectral = half[0] * half[0] + half[L / 2] * half[L / 2];
  for (std::size_t i = 1; i < L / 2; ++i) spectral += 2.0 * half[i] * half[i];

  double direct = 0.0;
  for (double x : s.samples) direct += x * x;
  CHECK(spectral == doctest::Approx(L * direct).epsilon(1e-6));
}

TEST_CASE("non-finite samples are rejected") {
  RawSignal s{{1.0, std::nan("")}, 10.0};
  CHECK_THROWS_AS(dft_magnitude(s), ValidationError);
  RawSignal short_signal{{1.0}, 10.0};
  CHECK_THROWS_AS(dft_magnitude(short_signal), ValidationError);
}

TEST_CASE("max_of_bin pairwise example") {
  const Spectrum out = max_of_bin({1, 3, 2, 5, 4, 0, 7, 6}, 4);
  CHECK(out.bins == std::vector<double>{3, 5, 4, 7});
}

TEST_CASE("max_of_bin identity when K equals M") {
  const std::vector<double> v{0.5, 9.0, 2.5, 1.0, 1.0};
  CHECK(max_of_bin(v, 5).bins == v);
}

TEST_CASE("max_of_bin boundary rule for M=6, K=4") {
  // Windows from floor(i*6/4): {0}, {1,2}, {3}, {4,5}.
  const Spectrum out = max_of_bin({9, 1, 2, 8, 3, 4}, 4);
  CHECK(out.bins == std::vector<double>{9, 2, 8, 4});
}

TEST_CASE("max_of_bin upsamples with nearest neighbor when M < K") {
  const Spectrum out = max_of_bin({1, 7}, 4);
  CHECK(out.bins == std::vector<double>{1, 1, 7, 7});
  CHECK(*std::max_element(out.bins.begin(), out.bins.end()) == 7);
}

TEST_CASE("max_of_bin preserves the global maximum when M >= K") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(37 + trial * 11);
    for (double& x : v) x = std::abs(rng.normal());
    const std::size_t k = 5 + static_cast<std::size_t>(trial);
    const Spectrum out = max_of_bin(v, k);
    CHECK(*std::max_element(out.bins.begin(), out.bins.end()) ==
          *std::max_element(v.begin(), v.end()));
    // Every input index belongs to exactly one window.
    std::size_t covered = 0;
    for (std::size_t i = 0; i < k; ++i) {
      covered += (i + 1) * v.size() / k - i * v.size() / k;
    }
    CHECK(covered == v.size());
  }
}

TEST_CASE("standardized argmax matches the scaled peak position") {
  const std::size_t L = 4096;
  const double cycles = 301.0;
  const auto mags = dft_magnitude(tone(L, cycles));
  const std::size_t K = 256;
  const Spectrum spec = preprocess(tone(L, cycles), K);
  const std::size_t expected = argmax(mags) * K / mags.size();
  const std::size_t got = argmax(spec.bins);
  CHECK(std::llabs(static_cast<long long>(got) -
                   static_cast<long long>(expected)) <= 1);
}

TEST_CASE("peak positions agree across signal lengths") {
  // Same normalized frequency, different record lengths.
  const std::size_t K = 512;
  const Spectrum a = preprocess(tone(4096, 4096 * 0.21), K);
  const Spectrum b = preprocess(tone(16384, 16384 * 0.21), K);
  CHECK(std::llabs(static_cast<long long>(argmax(a.bins)) -
                   static_cast<long long>(argmax(b.bins))) <= 1);
}

TEST_CASE("all-zero signal standardizes to all-zero spectrum") {
  RawSignal s;
  s.sample_rate_hz = 100.0;
  s.samples.assign(64, 0.0);
  const Spectrum spec = preprocess(s, 16);
  for (double b : spec.bins) CHECK(b == 0.0);
}

TEST_CASE("preprocess is deterministic") {
  const RawSignal s = tone(1000, 123.0);  // non-power-of-two length
  const Spectrum a = preprocess(s, 128);
  const Spectrum b = preprocess(s, 128);
  CHECK(a.bins == b.bins);
}

TEST_CASE("preprocess equals max_of_bin of dft_magnitude") {
  const RawSignal s = tone(512, 37.0);
  const Spectrum direct = preprocess(s, 64);
  const Spectrum composed = max_of_bin(dft_magnitude(s), 64);
  CHECK(direct.bins == composed.bins);
}

TEST_CASE("unit-max scaling flag") {
  PreprocessOptions opts;
  opts.unit_max_scale = true;
  const Spectrum spec = preprocess(tone(256, 10.0, 3.0), 64, opts);
  CHECK(*std::max_element(spec.bins.begin(), spec.bins.end()) ==
        doctest::Approx(1.0));
}

TEST_CASE("signal and spectrum containers round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pnnkit_spectral_test";
  fs::create_directories(dir);

  RawSignal s = tone(128, 5.0, 1.5, 2048.0);
  const std::string sig_path = (dir / "a.sig").string();
  save_signal(s, sig_path);
  const RawSignal loaded = load_signal(sig_path);
  REQUIRE(loaded.samples.size() == s.samples.size());
  CHECK(loaded.sample_rate_hz == doctest::Approx(2048.0));
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    CHECK(loaded.samples[i] ==
          doctest::Approx(s.samples[i]).epsilon(1e-6));
  }

  const Spectrum spec = preprocess(s, 32);
  const std::string spc_path = (dir / "a.spc").string();
  save_spectrum(spec, spc_path);
  const Spectrum spec_loaded = load_spectrum(spc_path);
  REQUIRE(spec_loaded.bins.size() == 32);

  // Corrupt the magic and expect a format error naming the magic.
  std::fstream f(sig_path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(0);
  f.put('X');
  f.close();
  CHECK_THROWS_AS(load_signal(sig_path), FormatError);
  fs::remove_all(dir);
}
