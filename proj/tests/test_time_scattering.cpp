// tests/test_time_scattering.cpp

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
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "sct/scattering.hpp"

using namespace sct;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Filters evaluated from their stored parameters, without touching the
// sampled response arrays produced by the library.
double EvalStored(const AnalyticFilter &f, double w) {
  if (f.shape == FilterShape::kLowpass) {
    return f.amplitude * std::exp(-(w * w) / (2.0 * f.sigma * f.sigma));
  }
  if (w <= 0.0) return 0.0;
  double d = w - f.center;
  double g = std::exp(-(d * d) / (2.0 * f.sigma * f.sigma));
  double corr = f.dc_corr * std::exp(-(w * w) / (2.0 * f.sigma * f.sigma));
  return f.amplitude * (g - corr);
}

// Band-pass value at a transform bin, honoring the one-sided sampling
// rule: bins 0 and >= n/2 carry nothing.
double EvalAtBin(const AnalyticFilter &f, size_t bin, size_t n, double step) {
  if (bin == 0 || bin >= n / 2) return 0.0;
  return EvalStored(f, step * static_cast<double>(bin));
}

std::vector<double> NoiseSignal(size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto &v : x) v = u(rng);
  return x;
}

size_t Reflect101(long long i, size_t n) {
  long long period = 2 * static_cast<long long>(n) - 2;
  if (n == 1) return 0;
  long long j = ((i % period) + period) % period;
  if (j >= static_cast<long long>(n)) j = period - j;
  return static_cast<size_t>(j);
}

}  // namespace

TEST_CASE("averaging lowpass reaches half power at T/2") {
  for (double t : {0.016, 0.032, 0.512}) {
    AnalyticFilter lp = MakeAveragingLowpass(t);
    CHECK(lp.sigma == doctest::Approx(2.0 * 0.8325546111576977 / t).epsilon(1e-12));
    CHECK(lp.Eval(0.0) == doctest::Approx(1.0));
  }

  // Impulse response: the squared window loses half its height T/2 away
  // from the peak, so the amplitude there is 1/sqrt(2) of the peak.
  double rate = 1000.0;
  double t = 0.032;  // 32 samples
  size_t len = 256;
  Averager av = BuildAverager(len, rate, MakeAveragingLowpass(t),
                              Padding::kPeriodic);
  std::vector<double> delta(len, 0.0);
  delta[128] = 1.0;
  std::vector<double> y = Smooth(av, delta);
  double peak = y[128];
  CHECK(peak > 0.0);
  CHECK(y[128 + 16] / peak == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
  CHECK(y[128 - 16] / peak == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("smoothing preserves constant series exactly") {
  for (Padding mode : {Padding::kReflect, Padding::kPeriodic}) {
    size_t len = mode == Padding::kPeriodic ? 64 : 100;
    Averager av = BuildAverager(len, 250.0, MakeAveragingLowpass(0.032), mode);
    std::vector<double> x(len, 3.7);
    std::vector<double> y = Smooth(av, x);
    for (double v : y) CHECK(v == doctest::Approx(3.7).epsilon(1e-12));
  }
}

TEST_CASE("smooth adjoint satisfies the inner product identity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Padding mode : {Padding::kReflect, Padding::kPeriodic}) {
    size_t len = mode == Padding::kPeriodic ? 64 : 100;
    Averager av = BuildAverager(len, 500.0, MakeAveragingLowpass(0.02), mode);
    std::vector<double> x(len), g(len);
    for (auto &v : x) v = u(rng);
    for (auto &v : g) v = u(rng);
    std::vector<double> sx = Smooth(av, x);
    std::vector<double> sg = SmoothAdjoint(av, g);
    double lhs = 0.0, rhs = 0.0;
    for (size_t i = 0; i < len; ++i) {
      lhs += sx[i] * g[i];
      rhs += x[i] * sg[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("subsample adjoint and length arithmetic") {
  std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(Subsample(x, 4).size() == 3);
  CHECK(Subsample(x, 4)[2] == 9.0);
  CHECK(Subsample(x, 1) == x);
  CHECK_THROWS_AS(Subsample(x, 0), ConfigError);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  size_t len = 13, ratio = 3;
  std::vector<double> a(len), g((len + ratio - 1) / ratio);
  for (auto &v : a) v = u(rng);
  for (auto &v : g) v = u(rng);
  std::vector<double> sa = Subsample(a, ratio);
  std::vector<double> ag = SubsampleAdjoint(g, ratio, len);
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < g.size(); ++i) lhs += sa[i] * g[i];
  for (size_t i = 0; i < len; ++i) rhs += a[i] * ag[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

// Amplitude-modulated tone with carrier and modulation on exact transform
// bins, analyzed in periodic mode.  The first-layer output at the best
// band is an exactly 4-frame-periodic envelope whose closed form is
// h(theta) = |r + p e^{i theta} + q e^{-i theta}| with r, p, q read off
// the filter transfer function at the three spectral lines.  Both orders
// then reduce to a 4-point discrete Fourier transform of h.
TEST_CASE("am tone matches the closed-form envelope oracle") {
  const double fs = 16000.0;
  const size_t n = 32768;
  const int q = 8;
  const double t_sup = 0.512;  // 8192 samples
  const int os = 3;            // hop 512, envelope rate 31.25 Hz

  const double f_c = 1000.0;                          // bin 2048
  const double f_m = fs * 16.0 / static_cast<double>(n);  // bin 16, 7.8125 Hz
  const double w_c = 2.0 * kPi * f_c;
  const double w_m = 2.0 * kPi * f_m;

  Signal x;
  x.sample_rate = fs;
  x.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double tt = static_cast<double>(i) / fs;
    x.samples[i] = (1.0 + 0.5 * std::cos(w_m * tt)) * std::cos(w_c * tt);
  }

  FilterBank bank1 = BuildTimeBank(fs, q, t_sup, n);
  Scalogram scal = ComputeScalogram(x, bank1, os, Padding::kPeriodic);
  REQUIRE(scal.hop == 512);
  REQUIRE(scal.values.rows == 64);

  double env_rate = fs / 512.0;
  FilterBank ebank = BuildTimeBank(env_rate, 1, t_sup, 64);
  REQUIRE(ebank.filters.size() == 4);

  RealMatrix s1 = ComputeS1(scal);
  SecondOrder so = TimeScatter(scal, ebank);
  REQUIRE(s1.rows == 8);
  REQUIRE(so.s2.rows == 8);

  // Strongest first-layer band at the carrier.
  size_t b1 = 0;
  double best = -1.0;
  for (size_t b = 0; b < bank1.filters.size(); ++b) {
    double v = EvalStored(bank1.filters[b], w_c);
    if (v > best) {
      best = v;
      b1 = b;
    }
  }

  // Positive-line amplitudes: cos(w_c t) carries 1/2, and each sideband
  // of 0.25 cos((w_c +- w_m) t) carries 1/8.
  const AnalyticFilter &f1 = bank1.filters[b1];
  double r = 0.5 * EvalStored(f1, w_c);
  double p = 0.125 * EvalStored(f1, w_c + w_m);
  double qq = 0.125 * EvalStored(f1, w_c - w_m);
  auto h = [&](double theta) {
    std::complex<double> z =
        r + p * std::polar(1.0, theta) + qq * std::polar(1.0, -theta);
    return std::abs(z);
  };
  // 4-point DFT of one envelope period across scalogram frames.
  double h0 = h(0.0), h1 = h(kPi / 2.0), h2 = h(kPi), h3 = h(3.0 * kPi / 2.0);
  double c0 = 0.25 * (h0 + h1 + h2 + h3);
  double c1 = 0.25 * (h0 - h2);  // imaginary part cancels, h is even

  for (size_t f = 0; f < s1.rows; ++f) {
    CHECK(s1.at(f, b1) == doctest::Approx(c0).epsilon(1e-9));
  }

  // Second layer: the modulation line sits on envelope bin 16; its
  // doubled frequency is the envelope Nyquist bin, which carries
  // nothing, so a single band-pass line survives.
  double estep = 2.0 * kPi * env_rate / 64.0;
  size_t n_el = ebank.filters.size();
  std::vector<double> resp2(n_el);
  for (size_t b2 = 0; b2 < n_el; ++b2) {
    resp2[b2] = EvalAtBin(ebank.filters[b2], 16, 64, estep);
  }
  size_t best2 = 0;
  for (size_t b2 = 1; b2 < n_el; ++b2) {
    if (resp2[b2] > resp2[best2]) best2 = b2;
  }

  // Locate the s2 column block of band b1: paths are grouped by
  // descending lambda1 and every envelope band is eligible here.
  size_t block = 0;
  while (block < so.paths.size() &&
         so.paths[block].log_lambda1 != scal.log_centers[b1]) {
    ++block;
  }
  REQUIRE(block + n_el <= so.paths.size());
  for (size_t j = 0; j < n_el; ++j) {
    double expect = std::abs(c1) * resp2[j];
    for (size_t f = 0; f < so.s2.rows; ++f) {
      CHECK(so.s2.at(f, block + j) == doctest::Approx(expect).epsilon(1e-9));
    }
  }

  // The winning second layer band is the one closest to 7.8 Hz.
  size_t arg = 0;
  for (size_t j = 1; j < n_el; ++j) {
    if (so.s2.at(3, block + j) > so.s2.at(3, block + arg)) arg = j;
  }
  CHECK(arg == best2);
  CHECK(std::pow(2.0, so.paths[block + arg].log_lambda2) ==
        doctest::Approx(ebank.filters[best2].center).epsilon(1e-12));

  for (double v : so.s2.data) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}

TEST_CASE("second order keeps exactly the paths below lambda1 over q") {
  const double fs = 16000.0;
  const size_t n = 8192;
  const int q = 8;
  const double t_sup = 0.032;
  const int os = 2;

  Signal x;
  x.sample_rate = fs;
  x.samples = NoiseSignal(n, 21);
  FilterBank bank1 = BuildTimeBank(fs, q, t_sup, n);
  Scalogram scal = ComputeScalogram(x, bank1, os, Padding::kPeriodic);
  FilterBank ebank = BuildTimeBank(scal.FrameRate(), 1, t_sup, 128);
  REQUIRE(scal.values.rows == 128);

  SecondOrder so = TimeScatter(scal, ebank);

  size_t expected = 0;
  std::vector<size_t> per_band(bank1.filters.size(), 0);
  for (size_t b1 = 0; b1 < bank1.filters.size(); ++b1) {
    for (const auto &f2 : ebank.filters) {
      double cut = bank1.filters[b1].center / static_cast<double>(q);
      if (f2.center < cut * (1.0 - 1e-9)) ++per_band[b1];
    }
    expected += per_band[b1];
  }
  REQUIRE(expected > 0);
  CHECK(so.paths.size() == expected);
  CHECK(so.s2.cols == expected);

  size_t at = 0;
  for (size_t b1 = 0; b1 < bank1.filters.size(); ++b1) {
    double prev = 0.0;
    for (size_t j = 0; j < per_band[b1]; ++j, ++at) {
      const ScatteringPath &pp = so.paths[at];
      CHECK(pp.log_lambda1 == scal.log_centers[b1]);
      double l2 = std::pow(2.0, pp.log_lambda2);
      CHECK(l2 < bank1.filters[b1].center / static_cast<double>(q) * (1.0 + 1e-12));
      if (j > 0) CHECK(pp.log_lambda2 < prev);
      prev = pp.log_lambda2;
      CHECK_FALSE(pp.is_joint);
      CHECK_FALSE(pp.is_freq);
    }
  }
  CHECK(at == so.paths.size());
}

TEST_CASE("periodic analysis commutes with circular shifts") {
  const double fs = 16000.0;
  const size_t n = 8192;
  const double t_sup = 0.032;
  const int os = 2;
  const size_t frame_len = 256;  // T/2 in samples
  const size_t shift = 2 * frame_len;

  FilterBank bank1 = BuildTimeBank(fs, 8, t_sup, n);
  Signal x;
  x.sample_rate = fs;
  x.samples = NoiseSignal(n, 42);
  Signal y = x;
  for (size_t i = 0; i < n; ++i) y.samples[i] = x.samples[(i + shift) % n];

  Scalogram sx = ComputeScalogram(x, bank1, os, Padding::kPeriodic);
  Scalogram sy = ComputeScalogram(y, bank1, os, Padding::kPeriodic);
  FilterBank ebank = BuildTimeBank(sx.FrameRate(), 1, t_sup, 128);

  RealMatrix s1x = ComputeS1(sx);
  RealMatrix s1y = ComputeS1(sy);
  SecondOrder s2x = TimeScatter(sx, ebank);
  SecondOrder s2y = TimeScatter(sy, ebank);

  double scale1 = 0.0, scale2 = 0.0;
  for (double v : s1x.data) scale1 = std::max(scale1, std::abs(v));
  for (double v : s2x.s2.data) scale2 = std::max(scale2, std::abs(v));

  size_t rolled = 2;  // shift / (T/2)
  for (size_t f = 0; f < s1x.rows; ++f) {
    size_t g = (f + rolled) % s1x.rows;
    for (size_t b = 0; b < s1x.cols; ++b) {
      CHECK(std::abs(s1y.at(f, b) - s1x.at(g, b)) <= 1e-10 * scale1);
    }
    for (size_t c = 0; c < s2x.s2.cols; ++c) {
      CHECK(std::abs(s2y.s2.at(f, c) - s2x.s2.at(g, c)) <= 1e-10 * scale2);
    }
  }
}

TEST_CASE("time scattering rejects mismatched envelope banks") {
  const double fs = 16000.0;
  Signal x;
  x.sample_rate = fs;
  x.samples = NoiseSignal(4096, 5);
  FilterBank bank1 = BuildTimeBank(fs, 8, 0.032, 4096);
  Scalogram scal = ComputeScalogram(x, bank1, 2, Padding::kPeriodic);
  REQUIRE(scal.FrameRate() == doctest::Approx(250.0));

  FilterBank wrong_rate = BuildTimeBank(260.0, 1, 0.032, 64);
  CHECK_THROWS_AS(TimeScatter(scal, wrong_rate), ConfigError);

  FilterBank wrong_len = BuildTimeBank(250.0, 1, 0.032, 128);
  CHECK_THROWS_AS(TimeScatter(scal, wrong_len), ConfigError);
}

TEST_CASE("frequency scattering matches a direct transform oracle") {
  const size_t n1 = 39;
  const size_t frames = 3;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealMatrix s1(frames, n1);
  std::vector<double> centers(n1);
  for (size_t b = 0; b < n1; ++b) {
    centers[b] = 13.0 - static_cast<double>(b) / 8.0;  // descending log2
  }
  for (auto &v : s1.data) {
    double a = u(rng);
    v = 0.1 + a * a;
  }

  FilterBank quef = BuildQuefrencyBank(8, 4.0, 128);
  REQUIRE(quef.filters.size() == 6);
  SecondOrder so = FreqScatter(s1, centers, quef);
  size_t n_ch = quef.filters.size() + 1;
  REQUIRE(so.s2.cols == n1 * n_ch);
  REQUIRE(so.s2.rows == frames);

  // Path metadata: per band, band-pass centers descending then the
  // low-pass channel.
  for (size_t b = 0; b < n1; ++b) {
    for (size_t c = 0; c < n_ch; ++c) {
      const ScatteringPath &p = so.paths[b * n_ch + c];
      CHECK(p.is_freq);
      CHECK(p.log_lambda1 == centers[b]);
      if (c + 1 < n_ch) {
        CHECK(p.beta == doctest::Approx(quef.filters[c].center));
        CHECK(p.beta_sign == 1);
      } else {
        CHECK(p.beta == 0.0);
        CHECK(p.beta_sign == 0);
      }
    }
  }

  // Direct quadratic-time reimplementation: reflect pad, naive DFT,
  // stored-parameter transfer functions, naive inverse DFT.
  const size_t nq = 128;
  const size_t left = (nq - n1) / 2;
  double step = quef.axis_rate / static_cast<double>(nq);
  for (size_t f = 0; f < frames; ++f) {
    std::vector<double> padded(nq);
    for (size_t i = 0; i < nq; ++i) {
      size_t src = Reflect101(static_cast<long long>(i) -
                              static_cast<long long>(left), n1);
      padded[i] = s1.at(f, n1 - 1 - src);
    }
    std::vector<std::complex<double>> spec(nq);
    for (size_t k = 0; k < nq; ++k) {
      std::complex<double> acc = 0.0;
      for (size_t i = 0; i < nq; ++i) {
        double ang = -2.0 * kPi * static_cast<double>(k * i) /
                     static_cast<double>(nq);
        acc += padded[i] * std::polar(1.0, ang);
      }
      spec[k] = acc;
    }
    for (size_t c = 0; c < n_ch; ++c) {
      std::vector<std::complex<double>> prod(nq);
      for (size_t k = 0; k < nq; ++k) {
        double g;
        if (c + 1 < n_ch) {
          g = EvalAtBin(quef.filters[c], k, nq, step);
        } else {
          double idx = static_cast<double>(k);
          if (k > nq / 2) idx -= static_cast<double>(nq);
          g = EvalStored(quef.lowpass, step * idx);
        }
        prod[k] = spec[k] * g;
      }
      for (size_t b = 0; b < n1; ++b) {
        size_t pos = n1 - 1 - b;
        std::complex<double> acc = 0.0;
        for (size_t k = 0; k < nq; ++k) {
          double ang = 2.0 * kPi *
                       static_cast<double>(((left + pos) * k) % nq) /
                       static_cast<double>(nq);
          acc += prod[k] * std::polar(1.0, ang);
        }
        acc /= static_cast<double>(nq);
        CHECK(so.s2.at(f, b * n_ch + c) ==
              doctest::Approx(std::abs(acc)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("frequency scattering input validation") {
  FilterBank quef = BuildQuefrencyBank(8, 4.0, 128);
  RealMatrix one(2, 1);
  one.data = {1.0, 2.0};
  CHECK_THROWS_AS(FreqScatter(one, {10.0}, quef), ConfigError);

  RealMatrix bad(2, 3);
  bad.data.assign(6, 1.0);
  CHECK_THROWS_AS(FreqScatter(bad, {10.0, 9.0}, quef), DataError);

  FilterBank small = BuildQuefrencyBank(8, 4.0, 64);
  RealMatrix wide(1, 39);
  wide.data.assign(39, 1.0);
  std::vector<double> c39(39);
  for (size_t b = 0; b < 39; ++b) c39[b] = 13.0 - static_cast<double>(b) / 8.0;
  CHECK_THROWS_AS(FreqScatter(wide, c39, small), ConfigError);
}

TEST_CASE("log compression uses the upper median of nonzero entries") {
  ScatteringCoeffs c;
  c.s1 = RealMatrix(2, 2);
  c.s1.data = {1.0, 0.5, 0.0, 2.0};
  c.s2 = RealMatrix(1, 2);
  c.s2.data = {0.25, 4.0};
  std::vector<std::string> warnings;
  double eps = 0.01;
  LogCompress(&c, eps, &warnings);
  CHECK(warnings.empty());
  // nonzero sorted: 0.25 0.5 1 2 4, upper median 1.0, floor 0.01
  CHECK(c.s1.data[0] == doctest::Approx(std::log(1.0 + 0.01)).epsilon(1e-14));
  CHECK(c.s1.data[1] == doctest::Approx(std::log(0.5 + 0.01)).epsilon(1e-14));
  CHECK(c.s1.data[2] == doctest::Approx(std::log(0.01)).epsilon(1e-14));
  CHECK(c.s2.data[1] == doctest::Approx(std::log(4.0 + 0.01)).epsilon(1e-14));
  CHECK(c.log_applied);
  CHECK(c.log_eps == eps);

  // Even count takes the upper of the middle pair.
  ScatteringCoeffs e;
  e.s1 = RealMatrix(2, 2);
  e.s1.data = {1.0, 2.0, 3.0, 4.0};
  LogCompress(&e, 0.5, nullptr);
  CHECK(e.s1.data[0] == doctest::Approx(std::log(1.0 + 0.5 * 3.0)).epsilon(1e-14));

  ScatteringCoeffs z;
  z.s1 = RealMatrix(1, 3);
  z.s1.data = {0.0, 0.0, 0.0};
  std::vector<std::string> w2;
  LogCompress(&z, 0.125, &w2);
  REQUIRE(w2.size() == 1);
  for (double v : z.s1.data) {
    CHECK(v == doctest::Approx(std::log(0.125)).epsilon(1e-14));
  }

  ScatteringCoeffs bad;
  bad.s1 = RealMatrix(1, 1);
  bad.s1.data = {1.0};
  CHECK_THROWS_AS(LogCompress(&bad, 0.0, nullptr), ConfigError);
  CHECK_THROWS_AS(LogCompress(&bad, -1.0, nullptr), ConfigError);
}

TEST_CASE("results do not depend on the worker count") {
  const double fs = 16000.0;
  Signal x;
  x.sample_rate = fs;
  x.samples = NoiseSignal(8192, 77);
  FilterBank bank1 = BuildTimeBank(fs, 8, 0.032, 8192);

  SetNumThreads(1);
  Scalogram sa = ComputeScalogram(x, bank1, 2, Padding::kPeriodic);
  FilterBank ebank = BuildTimeBank(sa.FrameRate(), 1, 0.032, 128);
  RealMatrix s1a = ComputeS1(sa);
  SecondOrder s2a = TimeScatter(sa, ebank);

  SetNumThreads(3);
  Scalogram sb = ComputeScalogram(x, bank1, 2, Padding::kPeriodic);
  RealMatrix s1b = ComputeS1(sb);
  SecondOrder s2b = TimeScatter(sb, ebank);
  SetNumThreads(0);

  REQUIRE(s1a.data.size() == s1b.data.size());
  REQUIRE(s2a.s2.data.size() == s2b.s2.data.size());
  for (size_t i = 0; i < s1a.data.size(); ++i) CHECK(s1a.data[i] == s1b.data[i]);
  for (size_t i = 0; i < s2a.s2.data.size(); ++i) {
    CHECK(s2a.s2.data[i] == s2b.s2.data[i]);
  }
}
