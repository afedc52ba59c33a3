// tests/test_scalogram.cpp

// Copyright 2026  The sct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sct/fft.hpp"
#include "sct/scalogram.hpp"

using namespace sct;

namespace {

constexpr double kPi = 3.14159265358979323846;

Signal MakeNoise(size_t n, double fs, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Signal s;
  s.sample_rate = fs;
  s.samples.resize(n);
  for (auto &v : s.samples) v = g(rng);
  return s;
}

}  // namespace

TEST_CASE("reflect index mirrors without repeating the edge") {
  CHECK(ReflectIndex(0, 5) == 0);
  CHECK(ReflectIndex(-1, 5) == 1);
  CHECK(ReflectIndex(-2, 5) == 2);
  CHECK(ReflectIndex(4, 5) == 4);
  CHECK(ReflectIndex(5, 5) == 3);
  CHECK(ReflectIndex(6, 5) == 2);
  CHECK(ReflectIndex(8, 5) == 0);
  CHECK(ReflectIndex(9, 5) == 1);  // period 8
  CHECK(ReflectIndex(-100, 1) == 0);
}

TEST_CASE("pad adjoint matches the padding map in inner products") {
  size_t n = 37, big = 128;
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto &v : x) v = g(rng);
  std::vector<double> y(big);
  for (auto &v : y) v = g(rng);

  for (Padding mode : {Padding::kReflect}) {
    Padded p = PadSignal(x, big, mode);
    double lhs = 0.0;
    for (size_t i = 0; i < big; ++i) lhs += p.data[i] * y[i];
    std::vector<double> back = PadAdjoint(y, n, p.left, mode);
    double rhs = 0.0;
    for (size_t i = 0; i < n; ++i) rhs += x[i] * back[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // Periodic variant with a divisible length.
  std::vector<double> x2(32);
  for (auto &v : x2) v = g(rng);
  Padded p2 = PadSignal(x2, big, Padding::kPeriodic);
  double lhs = 0.0;
  for (size_t i = 0; i < big; ++i) lhs += p2.data[i] * y[i];
  std::vector<double> back = PadAdjoint(y, 32, 0, Padding::kPeriodic);
  double rhs = 0.0;
  for (size_t i = 0; i < 32; ++i) rhs += x2[i] * back[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("impulse response reproduces the time-domain filter") {
  double fs = 1000.0;
  size_t n = 1024;
  FilterBank bank = BuildTimeBank(fs, 2, 0.064, n);
  Signal x;
  x.sample_rate = fs;
  x.samples.assign(n, 0.0);
  size_t t0 = 300;
  x.samples[t0] = 1.0;

  ComplexMatrix wt = WaveletTransform(x, bank, Padding::kPeriodic);
  for (size_t b = 0; b < bank.filters.size(); b += 3) {
    std::vector<cplx> kernel(bank.filters[b].response.begin(),
                             bank.filters[b].response.end());
    IfftInplace(kernel);
    for (size_t t = 0; t < n; t += 7) {
      cplx expect = kernel[(t + n - t0) % n];
      CHECK(std::abs(wt.at(t, b) - expect) < 1e-12);
    }
  }
}

TEST_CASE("sinusoid at a band center lights up that band uniformly") {
  double fs = 2000.0;
  size_t n = 4096;
  FilterBank bank = BuildTimeBank(fs, 8, 0.064, n);
  // Snap a mid-bank center to the transform grid so the tone is periodic.
  size_t band = bank.filters.size() / 3;
  double step = 2.0 * kPi * fs / static_cast<double>(n);
  size_t bin = bank.BinOf(bank.filters[band].center);
  double w = step * static_cast<double>(bin);

  Signal x;
  x.sample_rate = fs;
  x.samples.resize(n);
  for (size_t t = 0; t < n; ++t) {
    x.samples[t] = std::cos(w * static_cast<double>(t) / fs);
  }
  ComplexMatrix wt = WaveletTransform(x, bank, Padding::kPeriodic);

  // The analytic filter keeps only the positive-frequency half of the
  // cosine, so the modulus is half the response at the tone frequency.
  double expect = 0.5 * bank.filters[band].response[bin];
  double mean = 0.0;
  for (size_t t = 0; t < n; ++t) mean += std::abs(wt.at(t, band));
  mean /= static_cast<double>(n);
  CHECK(mean == doctest::Approx(expect).epsilon(1e-10));
  for (size_t t = 0; t < n; t += 41) {
    CHECK(std::abs(wt.at(t, band)) == doctest::Approx(expect).epsilon(1e-9));
  }

  // And that band dominates.
  for (size_t b = 0; b < bank.filters.size(); ++b) {
    double m = std::abs(wt.at(n / 2, b));
    if (b != band) CHECK(m <= std::abs(wt.at(n / 2, band)) * (1.0 + 1e-9));
  }
}

TEST_CASE("wavelet transform is linear") {
  double fs = 4000.0;
  FilterBank bank = BuildTimeBank(fs, 4, 0.032, 2048);
  Signal a = MakeNoise(900, fs, 11), b = MakeNoise(900, fs, 12);
  Signal mix;
  mix.sample_rate = fs;
  mix.samples.resize(900);
  for (size_t i = 0; i < 900; ++i) {
    mix.samples[i] = 0.7 * a.samples[i] - 1.3 * b.samples[i];
  }
  ComplexMatrix wa = WaveletTransform(a, bank, Padding::kReflect);
  ComplexMatrix wb = WaveletTransform(b, bank, Padding::kReflect);
  ComplexMatrix wm = WaveletTransform(mix, bank, Padding::kReflect);
  for (size_t i = 0; i < wm.data.size(); i += 13) {
    cplx expect = 0.7 * wa.data[i] - 1.3 * wb.data[i];
    CHECK(std::abs(wm.data[i] - expect) < 1e-10);
  }
}

TEST_CASE("band energy stays within the global frame bound") {
  double fs = 4000.0;
  size_t n = 2048;
  FilterBank bank = BuildTimeBank(fs, 8, 0.032, n);
  Signal x = MakeNoise(n, fs, 5);
  double energy_in = 0.0;
  for (double v : x.samples) energy_in += v * v;

  ComplexMatrix wt = WaveletTransform(x, bank, Padding::kPeriodic);
  double energy_out = 0.0;
  for (const auto &v : wt.data) energy_out += std::norm(v);
  // Low-pass branch, computed directly in the spectral domain.
  std::vector<cplx> spec(x.samples.begin(), x.samples.end());
  FftInplace(spec);
  std::vector<cplx> smooth(n);
  for (size_t k = 0; k < n; ++k) {
    smooth[k] = spec[k] * bank.lowpass.response[k];
  }
  IfftInplace(smooth);
  for (const auto &v : smooth) energy_out += std::norm(v);

  FrameBounds fb = MeasureFrameBounds(bank);
  CHECK(energy_out <= (fb.max_global + 1e-9) * energy_in);
}

TEST_CASE("scalogram hop follows T and the oversampling factor") {
  double fs = 16000.0;
  FilterBank bank = BuildTimeBank(fs, 8, 0.032, 32768);
  Signal x = MakeNoise(16000, fs, 8);

  Scalogram s2 = ComputeScalogram(x, bank, 2, Padding::kReflect);
  CHECK(s2.hop == 64);  // 512 samples / 2^3
  CHECK(s2.values.rows == 250);
  CHECK(s2.values.cols == bank.filters.size());
  CHECK(s2.FrameRate() == doctest::Approx(250.0));

  Scalogram s0 = ComputeScalogram(x, bank, 0, Padding::kReflect);
  CHECK(s0.hop == 256);
  CHECK(s0.values.rows == 63);  // ceil(16000 / 256)

  for (double v : s2.values.data) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("misaligned averaging window is rejected") {
  double fs = 16000.0;
  // 0.0301 s * 16 kHz rounds to 482 samples, not divisible by 8.
  FilterBank bank = BuildTimeBank(fs, 8, 0.0301, 32768);
  Signal x = MakeNoise(4000, fs, 2);
  CHECK_THROWS_AS(ComputeScalogram(x, bank, 2, Padding::kReflect),
                  ConfigError);
}

TEST_CASE("invalid input is rejected with the right error type") {
  double fs = 8000.0;
  FilterBank bank = BuildTimeBank(fs, 8, 0.032, 8192);
  Signal bad;
  bad.sample_rate = fs;
  bad.samples.assign(100, 0.0);
  bad.samples[50] = std::nan("");
  CHECK_THROWS_AS(WaveletTransform(bad, bank, Padding::kReflect), DataError);

  Signal other = MakeNoise(100, 44100.0, 1);
  CHECK_THROWS_AS(WaveletTransform(other, bank, Padding::kReflect),
                  ConfigError);

  Signal empty;
  empty.sample_rate = fs;
  CHECK_THROWS_AS(WaveletTransform(empty, bank, Padding::kReflect), DataError);
}

TEST_CASE("circular shift moves scalogram frames") {
  double fs = 8000.0;
  size_t n = 8192;
  FilterBank bank = BuildTimeBank(fs, 8, 0.032, n);
  Signal x = MakeNoise(n, fs, 21);
  size_t hop = 256 / 8;  // T_samples=256, oversampling=2

  size_t shift = 2 * hop;
  Signal y;
  y.sample_rate = fs;
  y.samples.resize(n);
  for (size_t i = 0; i < n; ++i) y.samples[i] = x.samples[(i + n - shift) % n];

  Scalogram sx = ComputeScalogram(x, bank, 2, Padding::kPeriodic);
  Scalogram sy = ComputeScalogram(y, bank, 2, Padding::kPeriodic);
  REQUIRE(sx.hop == hop);
  size_t frames = sx.values.rows;
  for (size_t f = 0; f < frames; ++f) {
    for (size_t b = 0; b < sx.values.cols; b += 5) {
      CHECK(std::abs(sy.values.at((f + 2) % frames, b) - sx.values.at(f, b)) <
            1e-10);
    }
  }
}

TEST_CASE("harmonic signal with a formant peaks at the formant band") {
  double fs = 8000.0;
  size_t n = 8192;
  FilterBank bank = BuildTimeBank(fs, 8, 0.032, 16384);
  double f0 = 120.0, formant = 700.0, width = 150.0;
  Signal x;
  x.sample_rate = fs;
  x.samples.resize(n);
  for (size_t t = 0; t < n; ++t) {
    double v = 0.0;
    for (int k = 1; k * f0 < fs / 2 * 0.9; ++k) {
      double fk = k * f0;
      double a = std::exp(-((fk - formant) * (fk - formant)) /
                          (2.0 * width * width));
      v += a * std::cos(2.0 * kPi * fk * static_cast<double>(t) / fs);
    }
    x.samples[t] = v;
  }
  Scalogram s = ComputeScalogram(x, bank, 2, Padding::kReflect);
  // Average over frames, find the band with maximum energy.
  size_t best = 0;
  double best_e = -1.0;
  for (size_t b = 0; b < s.values.cols; ++b) {
    double e = 0.0;
    for (size_t f = 0; f < s.values.rows; ++f) e += s.values.at(f, b);
    if (e > best_e) {
      best_e = e;
      best = b;
    }
  }
  // The winning band center should be the partial nearest the formant.
  double center_hz = std::pow(2.0, s.log_centers[best]) / (2.0 * kPi);
  CHECK(std::abs(center_hz - 720.0) < 720.0 * 0.1);
}

TEST_CASE("scalogram export formats are well formed") {
  double fs = 4000.0;
  FilterBank bank = BuildTimeBank(fs, 4, 0.032, 4096);
  Signal x = MakeNoise(2000, fs, 9);
  Scalogram s = ComputeScalogram(x, bank, 1, Padding::kReflect);

  std::string csv = ScalogramCsv(s);
  size_t lines = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == s.values.rows + 1);

  std::string pgm = ScalogramPgm(s, 1e-3);
  REQUIRE(pgm.substr(0, 3) == "P5\n");
  size_t header_end = pgm.find("255\n");
  REQUIRE(header_end != std::string::npos);
  CHECK(pgm.size() - (header_end + 4) == s.values.rows * s.values.cols);
}
