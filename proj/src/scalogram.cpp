// src/scalogram.cpp

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

#include "sct/scalogram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sct/fft.hpp"

namespace sct {

size_t ReflectIndex(long i, long n) {
  if (n <= 1) return 0;
  long period = 2 * (n - 1);
  long r = i % period;
  if (r < 0) r += period;
  if (r >= n) r = period - r;
  return static_cast<size_t>(r);
}

Padded PadSignal(const std::vector<double> &x, size_t n_fft, Padding mode) {
  if (x.empty()) throw DataError("cannot pad an empty signal");
  if (n_fft < x.size()) {
    throw ConfigError("transform length shorter than the signal");
  }
  Padded out;
  out.src_len = x.size();
  out.data.resize(n_fft);
  long n = static_cast<long>(x.size());
  if (mode == Padding::kPeriodic) {
    if (n_fft % x.size() != 0) {
      throw ConfigError(
          "periodic padding needs the transform length to be a multiple of "
          "the signal length");
    }
    out.left = 0;
    for (size_t j = 0; j < n_fft; ++j) out.data[j] = x[j % x.size()];
  } else {
    out.left = (n_fft - x.size()) / 2;
    for (size_t j = 0; j < n_fft; ++j) {
      long src = static_cast<long>(j) - static_cast<long>(out.left);
      out.data[j] = x[ReflectIndex(src, n)];
    }
  }
  return out;
}

std::vector<double> PadAdjoint(const std::vector<double> &g, size_t src_len,
                               size_t left, Padding mode) {
  std::vector<double> out(src_len, 0.0);
  long n = static_cast<long>(src_len);
  if (mode == Padding::kPeriodic) {
    for (size_t j = 0; j < g.size(); ++j) out[j % src_len] += g[j];
  } else {
    for (size_t j = 0; j < g.size(); ++j) {
      long src = static_cast<long>(j) - static_cast<long>(left);
      out[ReflectIndex(src, n)] += g[j];
    }
  }
  return out;
}

namespace {

void CheckSignal(const Signal &x, const FilterBank &bank) {
  if (x.samples.empty()) throw DataError("empty signal");
  for (double v : x.samples) {
    if (!std::isfinite(v)) throw DataError("signal contains non-finite values");
  }
  double rel = std::abs(x.sample_rate - bank.axis_rate) /
               std::max(1.0, bank.axis_rate);
  if (rel > 1e-9) {
    throw ConfigError("signal sample rate does not match the filter bank");
  }
}

}  // namespace

ComplexMatrix WaveletTransform(const Signal &x, const FilterBank &bank,
                               Padding mode) {
  CheckSignal(x, bank);
  Padded p = PadSignal(x.samples, bank.n_fft, mode);
  std::vector<cplx> spectrum(p.data.begin(), p.data.end());
  FftInplace(spectrum);

  size_t n = bank.n_fft;
  size_t nb = bank.filters.size();
  ComplexMatrix out(x.samples.size(), nb);
  ParallelFor(nb, [&](size_t b) {
    std::vector<cplx> z(n);
    const auto &resp = bank.filters[b].response;
    for (size_t k = 0; k < n; ++k) z[k] = spectrum[k] * resp[k];
    IfftInplace(z);
    for (size_t t = 0; t < x.samples.size(); ++t) {
      out.at(t, b) = z[p.left + t];
    }
  });
  return out;
}

Scalogram ComputeScalogram(const Signal &x, const FilterBank &bank,
                           int oversampling, Padding mode) {
  if (oversampling < 0) throw ConfigError("oversampling must be nonnegative");
  long t_samples = std::llround(bank.support * bank.axis_rate);
  long div = 1L << (oversampling + 1);
  if (t_samples <= 0 || t_samples % div != 0) {
    throw ConfigError(
        "averaging window in samples must divide by 2^(oversampling+1); "
        "round T to a compatible length");
  }
  size_t hop = static_cast<size_t>(t_samples / div);

  ComplexMatrix wt = WaveletTransform(x, bank, mode);
  size_t n_frames = (x.samples.size() + hop - 1) / hop;

  Scalogram s;
  s.values = RealMatrix(n_frames, wt.cols);
  s.sample_rate = x.sample_rate;
  s.n_samples = x.samples.size();
  s.hop = hop;
  s.oversampling = oversampling;
  s.support = bank.support;
  s.bins_per_octave = bank.bins_per_octave;
  s.padding = mode;
  s.log_centers = bank.log_centers;
  for (size_t f = 0; f < n_frames; ++f) {
    for (size_t b = 0; b < wt.cols; ++b) {
      s.values.at(f, b) = std::abs(wt.at(f * hop, b));
    }
  }
  return s;
}

std::string ScalogramCsv(const Scalogram &s) {
  std::ostringstream os;
  os.precision(12);
  os << "time";
  for (double lc : s.log_centers) os << "," << lc;
  os << "\n";
  for (size_t f = 0; f < s.values.rows; ++f) {
    os << static_cast<double>(f * s.hop) / s.sample_rate;
    for (size_t b = 0; b < s.values.cols; ++b) os << "," << s.values.at(f, b);
    os << "\n";
  }
  return os.str();
}

std::string ScalogramPgm(const Scalogram &s, double eps) {
  std::vector<double> nonzero;
  for (double v : s.values.data) {
    if (v > 0.0) nonzero.push_back(v);
  }
  double median = 1.0;
  if (!nonzero.empty()) {
    size_t mid = nonzero.size() / 2;
    std::nth_element(nonzero.begin(), nonzero.begin() + mid, nonzero.end());
    median = nonzero[mid];
  }
  double floor_v = eps * median;

  size_t w = s.values.rows;
  size_t h = s.values.cols;
  std::vector<double> logged(s.values.data.size());
  double lo = 0.0, hi = 0.0;
  for (size_t i = 0; i < logged.size(); ++i) {
    logged[i] = std::log(s.values.data[i] + floor_v);
    if (i == 0 || logged[i] < lo) lo = logged[i];
    if (i == 0 || logged[i] > hi) hi = logged[i];
  }
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;

  std::ostringstream os;
  os << "P5\n" << w << " " << h << "\n255\n";
  // Row 0 is the highest band; frames run left to right.
  for (size_t b = 0; b < h; ++b) {
    for (size_t f = 0; f < w; ++f) {
      double v = (logged[f * h + b] - lo) / span;
      int g = static_cast<int>(std::lround(v * 255.0));
      os.put(static_cast<char>(std::clamp(g, 0, 255)));
    }
  }
  return os.str();
}

}  // namespace sct
