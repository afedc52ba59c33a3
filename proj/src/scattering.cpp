// src/scattering.cpp

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

#include "sct/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "sct/fft.hpp"

namespace sct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtLn2 = 0.8325546111576977;

}  // namespace

AnalyticFilter MakeAveragingLowpass(double support_seconds) {
  if (support_seconds <= 0.0) {
    throw ConfigError("averaging support must be positive");
  }
  AnalyticFilter f;
  f.shape = FilterShape::kLowpass;
  f.center = 0.0;
  // sigma_t = T / (2 sqrt(ln 2)) in time, reciprocal in frequency.
  f.sigma = 2.0 * kSqrtLn2 / support_seconds;
  f.dc_corr = 0.0;
  f.amplitude = 1.0;
  return f;
}

Averager BuildAverager(size_t len, double axis_rate,
                       const AnalyticFilter &lowpass, Padding mode) {
  if (len == 0) throw DataError("cannot average an empty series");
  Averager av;
  av.len = len;
  av.mode = mode;
  if (mode == Padding::kPeriodic) {
    av.n_fft = len;
    av.left = 0;
  } else {
    av.n_fft = NextPow2(2 * len);
    av.left = (av.n_fft - len) / 2;
  }
  av.phi.resize(av.n_fft);
  double step = 2.0 * kPi * axis_rate / static_cast<double>(av.n_fft);
  for (size_t k = 0; k < av.n_fft; ++k) {
    double idx = static_cast<double>(k);
    if (k > av.n_fft / 2) idx -= static_cast<double>(av.n_fft);
    av.phi[k] = lowpass.Eval(step * idx);
  }
  return av;
}

std::vector<double> Smooth(const Averager &av, const std::vector<double> &x) {
  if (x.size() != av.len) throw DataError("series length mismatch");
  Padded p = PadSignal(x, av.n_fft, av.mode);
  std::vector<cplx> spec(p.data.begin(), p.data.end());
  FftInplace(spec);
  for (size_t k = 0; k < av.n_fft; ++k) spec[k] *= av.phi[k];
  IfftInplace(spec);
  std::vector<double> out(av.len);
  for (size_t i = 0; i < av.len; ++i) out[i] = spec[av.left + i].real();
  return out;
}

std::vector<double> SmoothAdjoint(const Averager &av,
                                  const std::vector<double> &g) {
  if (g.size() != av.len) throw DataError("series length mismatch");
  // Adjoint of crop is zero-extension; the symmetric real filter is its
  // own conjugate, and the pad transpose folds back onto the support.
  std::vector<cplx> spec(av.n_fft, 0.0);
  for (size_t i = 0; i < av.len; ++i) spec[av.left + i] = g[i];
  FftInplace(spec);
  for (size_t k = 0; k < av.n_fft; ++k) spec[k] *= av.phi[k];
  IfftInplace(spec);
  std::vector<double> full(av.n_fft);
  for (size_t k = 0; k < av.n_fft; ++k) full[k] = spec[k].real();
  return PadAdjoint(full, av.len, av.left, av.mode);
}

std::vector<double> Subsample(const std::vector<double> &x, size_t ratio) {
  if (ratio == 0) throw ConfigError("subsampling ratio must be positive");
  std::vector<double> out((x.size() + ratio - 1) / ratio);
  for (size_t i = 0; i < out.size(); ++i) out[i] = x[i * ratio];
  return out;
}

std::vector<double> SubsampleAdjoint(const std::vector<double> &g,
                                     size_t ratio, size_t len) {
  std::vector<double> out(len, 0.0);
  for (size_t i = 0; i < g.size(); ++i) {
    size_t j = i * ratio;
    if (j < len) out[j] = g[i];
  }
  return out;
}

RealMatrix ComputeS1(const Scalogram &scal) {
  size_t len = scal.values.rows;
  size_t nb = scal.values.cols;
  size_t ratio = 1ULL << scal.oversampling;
  AnalyticFilter lp = MakeAveragingLowpass(scal.support);
  Averager av = BuildAverager(len, scal.FrameRate(), lp, scal.padding);

  size_t out_frames = (len + ratio - 1) / ratio;
  RealMatrix s1(out_frames, nb);
  ParallelFor(nb, [&](size_t b) {
    std::vector<double> env(len);
    for (size_t f = 0; f < len; ++f) env[f] = scal.values.at(f, b);
    std::vector<double> sm = Subsample(Smooth(av, env), ratio);
    for (size_t f = 0; f < out_frames; ++f) s1.at(f, b) = sm[f];
  });
  return s1;
}

SecondOrder TimeScatter(const Scalogram &scal, const FilterBank &env_bank) {
  size_t len = scal.values.rows;
  double env_rate = scal.FrameRate();
  if (std::abs(env_bank.axis_rate - env_rate) > 1e-6 * env_rate) {
    throw ConfigError("envelope bank rate does not match the scalogram");
  }
  size_t n_e = scal.padding == Padding::kPeriodic ? len : NextPow2(2 * len);
  if (env_bank.n_fft != n_e) {
    throw ConfigError("envelope bank transform length mismatch");
  }
  // The envelope grid must resolve every second-layer filter.
  if (!env_bank.filters.empty() &&
      env_bank.filters.front().center > kPi * env_rate) {
    throw ConfigError("scalogram hop too coarse for the envelope bank");
  }

  size_t ratio = 1ULL << scal.oversampling;
  AnalyticFilter lp = MakeAveragingLowpass(scal.support);
  Averager av = BuildAverager(len, env_rate, lp, scal.padding);
  size_t out_frames = (len + ratio - 1) / ratio;

  // Eligible second-layer bands per first-layer band.  The margin keeps
  // an exact tie at lambda1 / q out regardless of rounding in the
  // log-domain round trip.
  double q1 = static_cast<double>(scal.bins_per_octave);
  std::vector<std::vector<size_t>> eligible(scal.values.cols);
  SecondOrder out;
  for (size_t b1 = 0; b1 < scal.values.cols; ++b1) {
    double lambda1 = std::pow(2.0, scal.log_centers[b1]);
    for (size_t b2 = 0; b2 < env_bank.filters.size(); ++b2) {
      if (env_bank.filters[b2].center < lambda1 / q1 * (1.0 - 1e-9)) {
        eligible[b1].push_back(b2);
      }
    }
  }
  std::vector<size_t> col_base(scal.values.cols, 0);
  size_t total = 0;
  for (size_t b1 = 0; b1 < scal.values.cols; ++b1) {
    col_base[b1] = total;
    total += eligible[b1].size();
    for (size_t b2 : eligible[b1]) {
      ScatteringPath p;
      p.log_lambda1 = scal.log_centers[b1];
      p.log_lambda2 = std::log2(env_bank.filters[b2].center);
      out.paths.push_back(p);
    }
  }

  out.s2 = RealMatrix(out_frames, total);
  ParallelFor(scal.values.cols, [&](size_t b1) {
    if (eligible[b1].empty()) return;
    std::vector<double> env(len);
    for (size_t f = 0; f < len; ++f) env[f] = scal.values.at(f, b1);
    Padded p = PadSignal(env, n_e, scal.padding);
    std::vector<cplx> spec(p.data.begin(), p.data.end());
    FftInplace(spec);
    for (size_t j = 0; j < eligible[b1].size(); ++j) {
      const auto &resp = env_bank.filters[eligible[b1][j]].response;
      std::vector<cplx> z(n_e);
      for (size_t k = 0; k < n_e; ++k) z[k] = spec[k] * resp[k];
      IfftInplace(z);
      std::vector<double> mod(len);
      for (size_t f = 0; f < len; ++f) mod[f] = std::abs(z[p.left + f]);
      std::vector<double> sm = Subsample(Smooth(av, mod), ratio);
      size_t col = col_base[b1] + j;
      for (size_t f = 0; f < out_frames; ++f) out.s2.at(f, col) = sm[f];
    }
  });
  return out;
}

SecondOrder FreqScatter(const RealMatrix &s1,
                        const std::vector<double> &s1_log_centers,
                        const FilterBank &quef_bank) {
  if (s1.cols != s1_log_centers.size()) {
    throw DataError("band count mismatch between values and centers");
  }
  if (s1.cols < 2) throw ConfigError("frequency scattering needs >= 2 bands");
  size_t n1 = s1.cols;
  size_t n_q = quef_bank.n_fft;
  if (n_q < NextPow2(2 * n1)) {
    throw ConfigError("quefrency bank transform length too short");
  }
  size_t n_ch = quef_bank.filters.size() + 1;  // band-passes plus low-pass

  SecondOrder out;
  for (size_t b1 = 0; b1 < n1; ++b1) {
    for (size_t c = 0; c < n_ch; ++c) {
      ScatteringPath p;
      p.log_lambda1 = s1_log_centers[b1];
      p.is_freq = true;
      if (c + 1 < n_ch) {
        p.beta = quef_bank.filters[c].center;
        p.beta_sign = 1;
      } else {
        p.beta = 0.0;
        p.beta_sign = 0;
      }
      out.paths.push_back(p);
    }
  }
  out.s2 = RealMatrix(s1.rows, n1 * n_ch);

  ParallelFor(s1.rows, [&](size_t f) {
    // Ascending log-frequency order along the quefrency axis.
    std::vector<double> row(n1);
    for (size_t b = 0; b < n1; ++b) row[b] = s1.at(f, n1 - 1 - b);
    Padded p = PadSignal(row, n_q, Padding::kReflect);
    std::vector<cplx> spec(p.data.begin(), p.data.end());
    FftInplace(spec);
    for (size_t c = 0; c < n_ch; ++c) {
      const auto &resp = c + 1 < n_ch ? quef_bank.filters[c].response
                                      : quef_bank.lowpass.response;
      std::vector<cplx> z(n_q);
      for (size_t k = 0; k < n_q; ++k) z[k] = spec[k] * resp[k];
      IfftInplace(z);
      for (size_t b = 0; b < n1; ++b) {
        size_t u = n1 - 1 - b;  // back to descending band order
        out.s2.at(f, b * n_ch + c) = std::abs(z[p.left + u]);
      }
    }
  });
  return out;
}

void LogCompress(ScatteringCoeffs *coeffs, double eps,
                 std::vector<std::string> *warnings) {
  if (eps <= 0.0) throw ConfigError("log-compression eps must be positive");
  std::vector<double> nonzero;
  nonzero.reserve(coeffs->s1.data.size() + coeffs->s2.data.size());
  for (double v : coeffs->s1.data) {
    if (v > 0.0) nonzero.push_back(v);
  }
  for (double v : coeffs->s2.data) {
    if (v > 0.0) nonzero.push_back(v);
  }
  double median = 1.0;
  if (nonzero.empty()) {
    if (warnings != nullptr) {
      warnings->push_back(
          "all scattering coefficients are zero; log floor defaults to eps");
    }
  } else {
    size_t mid = nonzero.size() / 2;
    std::nth_element(nonzero.begin(), nonzero.begin() + mid, nonzero.end());
    median = nonzero[mid];
  }
  double floor_v = eps * median;
  for (double &v : coeffs->s1.data) v = std::log(v + floor_v);
  for (double &v : coeffs->s2.data) v = std::log(v + floor_v);
  coeffs->log_applied = true;
  coeffs->log_eps = eps;
}

}  // namespace sct
