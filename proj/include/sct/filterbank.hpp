// include/sct/filterbank.hpp

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

#ifndef SCT_FILTERBANK_HPP_
#define SCT_FILTERBANK_HPP_

#include <string>

#include "sct/common.hpp"

namespace sct {

enum class FilterShape {
  kGeometric,  // constant-Q band, center on the 2^{-k/Q} grid
  kLinear,     // constant-bandwidth band below the constant-Q region
  kLowpass,    // real Gaussian averaging window
};

// One frequency-domain filter.  Band-pass filters are one-sided Gaussians
// with a DC-cancellation term so the response at frequency zero vanishes
// exactly:
//   g(w) = amplitude * (exp(-(w-center)^2 / (2 sigma^2))
//                       - dc_corr * exp(-w^2 / (2 sigma^2)))
// The low-pass is amplitude * exp(-w^2 / (2 sigma^2)), even in w.
struct AnalyticFilter {
  FilterShape shape = FilterShape::kGeometric;
  double center = 0.0;     // rad/s on time axes, cycles/octave on quefrency
  double sigma = 0.0;      // frequency-domain Gaussian width, same units
  double dc_corr = 0.0;    // exp(-center^2 / (2 sigma^2)), band-pass only
  double amplitude = 1.0;  // frame-equalized gain
  std::vector<double> response;  // sampled on the bank grid, length n_fft

  double Eval(double w) const;
  // -3 dB full width of the uncorrected Gaussian, 2 sigma sqrt(ln 2).
  double Bandwidth3db() const;
};

// A one-axis analytic filter bank: band-pass filters in descending center
// order plus one low-pass.  The same structure serves the signal axis
// (frequencies in rad/s) and the log-frequency axis (cycles/octave).
struct FilterBank {
  double axis_rate = 0.0;     // Hz, or bins/octave on the quefrency axis
  int bins_per_octave = 0;    // Q of the constant-Q region
  double support = 0.0;       // low-pass -3 dB width: T seconds, or K octaves
  size_t n_fft = 0;
  bool quefrency_axis = false;

  std::vector<AnalyticFilter> filters;
  AnalyticFilter lowpass;

  std::vector<double> log_centers;  // log2 of centers, descending
  // Band where the frame bound is maintained: [lowest center, 0.8 Nyquist].
  double covered_lo = 0.0;
  double covered_hi = 0.0;

  // Frequency step between DFT bins, in axis units.
  double BinStep() const;
  double Nyquist() const;
  // Signed frequency of bin k (negative for k > n_fft/2).
  double BinFrequency(size_t k) const;
  size_t BinOf(double freq) const;
};

// Prototype band-pass filter for a given Q, centered at 1:
//   sigma = (2^{1/(2Q)} - 1) / sqrt(ln 2)
// which puts the -3 dB edges of adjacent filters (center ratio 2^{1/Q})
// next to each other.
AnalyticFilter BuildMotherWavelet(int q);

// Signal-axis bank.  Geometric centers run from 0.85 * pi * sample_rate
// downward at ratio 2^{-1/Q} while they stay at or above 2 pi Q / T;
// below that, linearly spaced centers at multiples of 2 pi / T with
// constant -3 dB width 2 pi / T.  The low-pass has sigma_t = T / (2
// sqrt(ln 2)) and unit gain at DC.  Band-pass gains are equalized so the
// Littlewood-Paley sum is 1 at every center and at most 1 overall.
FilterBank BuildTimeBank(double sample_rate, int q, double t_seconds,
                         size_t n_fft);

// Log-frequency-axis bank over an axis sampled at bins_per_octave bins
// per octave.  Centers run from the axis Nyquist (bins_per_octave / 2
// cycles/octave) downward by octaves while they stay at or above
// 1 / (2 K).  The low-pass has -3 dB width K octaves.
FilterBank BuildQuefrencyBank(int bins_per_octave, double k_octaves,
                              size_t n_fft);

// A(w) = |lowpass(w)|^2 + 1/2 sum_f (|f(w)|^2 + |f(-w)|^2), per bin.
std::vector<double> LittlewoodPaley(const FilterBank &bank);

struct FrameBounds {
  double min_covered = 0.0;  // min A over the covered band
  double max_global = 0.0;   // max A over all bins
};

FrameBounds MeasureFrameBounds(const FilterBank &bank);

// CSV table of the sampled responses over the nonnegative frequency
// half-axis: frequency column, low-pass column, one column per filter.
std::string FilterBankCsv(const FilterBank &bank);

}  // namespace sct

#endif  // SCT_FILTERBANK_HPP_
