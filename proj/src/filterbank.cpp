// src/filterbank.cpp

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

#include "sct/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtLn2 = 0.8325546111576977;  // sqrt(ln 2)
// Geometric centers stop at the first one below threshold; the comparison
// tolerates rounding in the 2^{-k/Q} ladder.
constexpr double kGridTol = 1.0 - 1e-12;

double RelativeSigma(int q) {
  // -3 dB edges of the unit-center prototype sit at 1 +/- (2^{1/(2Q)} - 1).
  return (std::pow(2.0, 1.0 / (2.0 * q)) - 1.0) / kSqrtLn2;
}

void SampleResponse(const FilterBank &bank, AnalyticFilter *f) {
  size_t n = bank.n_fft;
  f->response.assign(n, 0.0);
  if (f->shape == FilterShape::kLowpass) {
    for (size_t k = 0; k < n; ++k) {
      f->response[k] = f->Eval(bank.BinFrequency(k));
    }
  } else {
    // Analytic: keep strictly positive frequencies.  The Nyquist bin is
    // its own mirror image, so leaving it in would double-count that bin
    // in the frame sum; it stays zero.
    double step = bank.BinStep();
    for (size_t k = 1; k < n / 2; ++k) {
      f->response[k] = f->Eval(step * static_cast<double>(k));
    }
  }
}

void ResampleAll(FilterBank *bank) {
  SampleResponse(*bank, &bank->lowpass);
  for (auto &f : bank->filters) SampleResponse(*bank, &f);
}

// Solves a small symmetric positive definite system in place.
std::vector<double> CholeskySolve(std::vector<double> m, std::vector<double> b,
                                  size_t n) {
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = m[i * n + j];
      for (size_t k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw NumericError("filter gain system not positive");
        m[i * n + i] = std::sqrt(s);
      } else {
        m[i * n + j] = s / m[j * n + j];
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t k = 0; k < i; ++k) s -= m[i * n + k] * b[k];
    b[i] = s / m[i * n + i];
  }
  for (size_t i = n; i-- > 0;) {
    double s = b[i];
    for (size_t k = i + 1; k < n; ++k) s -= m[k * n + i] * b[k];
    b[i] = s / m[i * n + i];
  }
  return b;
}

// Tunes band-pass gains so the frame sum is as flat as possible over the
// covered band, then rescales globally so max A never exceeds 1.
//
// A couple of center-bin equalization rounds give a reasonable start, but
// on their own they leave dips: filters that nearly coincide near the
// geometric/linear junction starve each other, and truncated top filters
// under-cover the region below them.  A ridge-regularized least-squares
// fit of the per-filter energy profiles against the residual 1 - lowpass^2
// fixes the gains jointly; the ridge term keeps nearly collinear profiles
// from trading unbounded weight.
void Equalize(FilterBank *bank) {
  for (int round = 0; round < 2; ++round) {
    std::vector<double> a = LittlewoodPaley(*bank);
    for (auto &f : bank->filters) {
      double v = a[bank->BinOf(f.center)];
      if (v > 1e-12) f.amplitude /= std::sqrt(v);
    }
    ResampleAll(bank);
  }

  size_t nf = bank->filters.size();
  if (nf > 0) {
    double lo = bank->filters.back().center * kGridTol;
    double hi = 0.8 * bank->Nyquist() / kGridTol;
    double step = bank->BinStep();
    std::vector<size_t> bins;
    for (size_t k = 0; k <= bank->n_fft / 2; ++k) {
      double w = step * static_cast<double>(k);
      if (w >= lo && w <= hi) bins.push_back(k);
    }
    size_t stride = bins.size() / 4096 + 1;
    std::vector<size_t> rows;
    for (size_t i = 0; i < bins.size(); i += stride) rows.push_back(bins[i]);

    if (!rows.empty()) {
      size_t n = bank->n_fft;
      // Iteratively reweighted: bins where A still sags below 1 gain
      // weight, so redundant filter pairs shift their energy toward the
      // dips between centers instead of stacking it where they coincide.
      std::vector<double> weight(rows.size(), 1.0);
      for (int pass = 0; pass < 8; ++pass) {
        std::vector<std::vector<double>> prof(nf);
        std::vector<double> target(rows.size());
        for (size_t i = 0; i < nf; ++i) {
          prof[i].resize(rows.size());
          const auto &r = bank->filters[i].response;
          for (size_t j = 0; j < rows.size(); ++j) {
            size_t k = rows[j];
            double pos = r[k];
            double neg = r[(n - k) % n];
            prof[i][j] = 0.5 * (pos * pos + neg * neg);
          }
        }
        for (size_t j = 0; j < rows.size(); ++j) {
          double lp = bank->lowpass.response[rows[j]];
          target[j] = 1.0 - lp * lp;
        }

        std::vector<double> gram(nf * nf, 0.0);
        std::vector<double> rhs(nf, 0.0);
        for (size_t i = 0; i < nf; ++i) {
          for (size_t j = i; j < nf; ++j) {
            double s = 0.0;
            for (size_t r = 0; r < rows.size(); ++r) {
              s += weight[r] * prof[i][r] * prof[j][r];
            }
            gram[i * nf + j] = gram[j * nf + i] = s;
          }
          for (size_t r = 0; r < rows.size(); ++r) {
            rhs[i] += weight[r] * prof[i][r] * target[r];
          }
        }
        double mean_diag = 0.0;
        for (size_t i = 0; i < nf; ++i) mean_diag += gram[i * nf + i];
        mean_diag /= static_cast<double>(nf);
        double ridge = 0.004 * mean_diag + 1e-12;
        for (size_t i = 0; i < nf; ++i) {
          gram[i * nf + i] += ridge;
          rhs[i] += ridge;  // pull gains toward 1
        }
        std::vector<double> gain = CholeskySolve(gram, rhs, nf);
        for (size_t i = 0; i < nf; ++i) {
          double g = std::clamp(gain[i], 0.25, 4.0);
          bank->filters[i].amplitude *= std::sqrt(g);
        }
        ResampleAll(bank);

        std::vector<double> a = LittlewoodPaley(*bank);
        for (size_t j = 0; j < rows.size(); ++j) {
          double sag = std::max(0.0, 1.0 - a[rows[j]]);
          weight[j] = std::min(1024.0, weight[j] * (1.0 + 20.0 * sag));
        }
      }
    }
  }

  std::vector<double> a = LittlewoodPaley(*bank);
  double m = *std::max_element(a.begin(), a.end());
  if (m > 1.0) {
    double s = 1.0 / std::sqrt(m);
    for (auto &f : bank->filters) f.amplitude *= s;
    ResampleAll(bank);
  }
}

void FinishBank(FilterBank *bank) {
  ResampleAll(bank);
  Equalize(bank);
  bank->log_centers.clear();
  for (const auto &f : bank->filters) {
    bank->log_centers.push_back(std::log2(f.center));
  }
  bank->covered_lo =
      bank->filters.empty() ? 0.0 : bank->filters.back().center;
  bank->covered_hi = 0.8 * bank->Nyquist();
}

}  // namespace

double AnalyticFilter::Eval(double w) const {
  if (shape == FilterShape::kLowpass) {
    return amplitude * std::exp(-(w * w) / (2.0 * sigma * sigma));
  }
  if (w <= 0.0) return 0.0;
  double d = w - center;
  double g = std::exp(-(d * d) / (2.0 * sigma * sigma));
  double corr = dc_corr * std::exp(-(w * w) / (2.0 * sigma * sigma));
  return amplitude * (g - corr);
}

double AnalyticFilter::Bandwidth3db() const { return 2.0 * sigma * kSqrtLn2; }

double FilterBank::BinStep() const {
  double full = quefrency_axis ? axis_rate : 2.0 * kPi * axis_rate;
  return full / static_cast<double>(n_fft);
}

double FilterBank::Nyquist() const {
  return quefrency_axis ? axis_rate / 2.0 : kPi * axis_rate;
}

double FilterBank::BinFrequency(size_t k) const {
  double idx = static_cast<double>(k);
  if (k > n_fft / 2) idx -= static_cast<double>(n_fft);
  return idx * BinStep();
}

size_t FilterBank::BinOf(double freq) const {
  long k = std::lround(freq / BinStep());
  if (k < 0) k = 0;
  long half = static_cast<long>(n_fft / 2);
  if (k > half) k = half;
  return static_cast<size_t>(k);
}

AnalyticFilter BuildMotherWavelet(int q) {
  if (q < 1) throw ConfigError("filter bank Q must be at least 1");
  AnalyticFilter f;
  f.shape = FilterShape::kGeometric;
  f.center = 1.0;
  f.sigma = RelativeSigma(q);
  f.dc_corr = std::exp(-1.0 / (2.0 * f.sigma * f.sigma));
  f.amplitude = 1.0;
  return f;
}

FilterBank BuildTimeBank(double sample_rate, int q, double t_seconds,
                         size_t n_fft) {
  if (sample_rate <= 0.0) throw ConfigError("sample rate must be positive");
  if (q < 1) throw ConfigError("filter bank Q must be at least 1");
  if (t_seconds <= 0.0) throw ConfigError("averaging scale T must be positive");
  if (!IsPow2(n_fft)) throw ConfigError("transform size must be a power of 2");
  if (t_seconds * sample_rate > static_cast<double>(n_fft)) {
    throw ConfigError("transform size shorter than the averaging window");
  }

  FilterBank bank;
  bank.axis_rate = sample_rate;
  bank.bins_per_octave = q;
  bank.support = t_seconds;
  bank.n_fft = n_fft;
  bank.quefrency_axis = false;

  double top = 0.85 * kPi * sample_rate;
  double threshold = 2.0 * kPi * q / t_seconds;
  if (top < threshold * kGridTol) {
    throw ConfigError("sample rate too low to place any constant-Q filter");
  }

  double sigma_rel = RelativeSigma(q);
  double log_top = std::log2(top);
  double lowest_geometric = top;
  for (int k = 0;; ++k) {
    double c = std::pow(2.0, log_top - static_cast<double>(k) / q);
    if (c < threshold * kGridTol) break;
    AnalyticFilter f;
    f.shape = FilterShape::kGeometric;
    f.center = c;
    f.sigma = c * sigma_rel;
    f.dc_corr = std::exp(-1.0 / (2.0 * sigma_rel * sigma_rel));
    bank.filters.push_back(f);
    lowest_geometric = c;
  }

  // Linear tail: constant -3 dB width 2 pi / T, centers at multiples of
  // 2 pi / T strictly below the lowest geometric center.
  double delta = 2.0 * kPi / t_seconds;
  double sigma_lin = delta / (2.0 * kSqrtLn2);
  int m_top = static_cast<int>(std::floor(lowest_geometric * kGridTol / delta));
  for (int m = m_top; m >= 1; --m) {
    double c = m * delta;
    AnalyticFilter f;
    f.shape = FilterShape::kLinear;
    f.center = c;
    f.sigma = sigma_lin;
    f.dc_corr = std::exp(-(c * c) / (2.0 * sigma_lin * sigma_lin));
    bank.filters.push_back(f);
  }

  double sigma_t = t_seconds / (2.0 * kSqrtLn2);
  bank.lowpass.shape = FilterShape::kLowpass;
  bank.lowpass.center = 0.0;
  bank.lowpass.sigma = 1.0 / sigma_t;
  bank.lowpass.dc_corr = 0.0;
  bank.lowpass.amplitude = 1.0;

  FinishBank(&bank);
  return bank;
}

FilterBank BuildQuefrencyBank(int bins_per_octave, double k_octaves,
                              size_t n_fft) {
  if (bins_per_octave < 1) {
    throw ConfigError("bins per octave must be at least 1");
  }
  if (k_octaves <= 0.0) throw ConfigError("octave support K must be positive");
  if (!IsPow2(n_fft)) throw ConfigError("transform size must be a power of 2");
  if (k_octaves * bins_per_octave > static_cast<double>(n_fft)) {
    throw ConfigError(
        "log-frequency axis shorter than the octave averaging window");
  }

  FilterBank bank;
  bank.axis_rate = static_cast<double>(bins_per_octave);
  bank.bins_per_octave = bins_per_octave;
  bank.support = k_octaves;
  bank.n_fft = n_fft;
  bank.quefrency_axis = true;

  AnalyticFilter proto = BuildMotherWavelet(1);
  double nyquist = bank.Nyquist();
  double floor_c = 1.0 / (2.0 * k_octaves);
  for (int m = 0;; ++m) {
    double c = nyquist * std::pow(2.0, -m);
    if (c < floor_c * kGridTol) break;
    AnalyticFilter f;
    f.shape = FilterShape::kGeometric;
    f.center = c;
    f.sigma = c * proto.sigma;
    f.dc_corr = proto.dc_corr;
    bank.filters.push_back(f);
  }
  if (bank.filters.empty()) {
    throw ConfigError("no log-frequency filter fits between 1/(2K) and "
                      "the axis Nyquist");
  }

  double sigma_u = k_octaves / (2.0 * kSqrtLn2);
  bank.lowpass.shape = FilterShape::kLowpass;
  bank.lowpass.center = 0.0;
  bank.lowpass.sigma = 1.0 / (2.0 * kPi * sigma_u);
  bank.lowpass.dc_corr = 0.0;
  bank.lowpass.amplitude = 1.0;

  FinishBank(&bank);
  return bank;
}

std::vector<double> LittlewoodPaley(const FilterBank &bank) {
  size_t n = bank.n_fft;
  std::vector<double> a(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    double lp = bank.lowpass.response.empty() ? 0.0 : bank.lowpass.response[k];
    a[k] = lp * lp;
  }
  for (const auto &f : bank.filters) {
    for (size_t k = 0; k < n; ++k) {
      double fwd = f.response[k];
      double mir = f.response[(n - k) % n];
      a[k] += 0.5 * (fwd * fwd + mir * mir);
    }
  }
  return a;
}

FrameBounds MeasureFrameBounds(const FilterBank &bank) {
  std::vector<double> a = LittlewoodPaley(bank);
  FrameBounds out;
  out.max_global = *std::max_element(a.begin(), a.end());
  double step = bank.BinStep();
  double lo = bank.covered_lo * kGridTol;
  double hi = bank.covered_hi / kGridTol;
  bool seen = false;
  for (size_t k = 0; k <= bank.n_fft / 2; ++k) {
    double w = step * static_cast<double>(k);
    if (w < lo || w > hi) continue;
    if (!seen || a[k] < out.min_covered) out.min_covered = a[k];
    seen = true;
  }
  if (!seen) out.min_covered = 0.0;
  return out;
}

std::string FilterBankCsv(const FilterBank &bank) {
  std::ostringstream os;
  os.precision(12);
  os << "frequency,lowpass";
  for (const auto &f : bank.filters) {
    os << "," << (f.shape == FilterShape::kLinear ? "lin_" : "geo_")
       << f.center;
  }
  os << "\n";
  double step = bank.BinStep();
  for (size_t k = 0; k <= bank.n_fft / 2; ++k) {
    os << step * static_cast<double>(k) << "," << bank.lowpass.response[k];
    for (const auto &f : bank.filters) os << "," << f.response[k];
    os << "\n";
  }
  return os.str();
}

}  // namespace sct
