// include/sct/scattering.hpp

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

#ifndef SCT_SCATTERING_HPP_
#define SCT_SCATTERING_HPP_

#include <string>

#include "sct/scalogram.hpp"

namespace sct {

enum class TransformKind { kS1, kTime, kTimeFreq, kJoint };

// Identifies one second-order coefficient column.  First-order columns
// are described by s1_log_centers alone.
struct ScatteringPath {
  double log_lambda1 = 0.0;  // log2 of the first-layer center (rad/s)
  double log_lambda2 = 0.0;  // time paths: log2 envelope-band center
  double alpha = 0.0;        // joint: time-modulation center (rad/s)
  double beta = 0.0;         // joint/frequency: quefrency center (cyc/oct)
  int beta_sign = 0;         // -1 down, 0 lowpass, +1 up
  bool is_joint = false;
  bool is_freq = false;      // frequency scattering over log-lambda1
};

struct ScatteringCoeffs {
  TransformKind kind = TransformKind::kS1;
  RealMatrix s1;  // [frames x n1], bands in descending center order
  RealMatrix s2;  // [frames x paths2.size()]
  std::vector<double> s1_log_centers;
  std::vector<ScatteringPath> paths2;

  double sample_rate = 0.0;
  size_t n_samples = 0;
  int q = 0;
  double t_support = 0.0;   // seconds
  double k_octaves = 0.0;   // quefrency averaging span, 0 when unused
  int oversampling = 0;
  Padding padding = Padding::kReflect;
  double frame_hop_seconds = 0.0;  // T/2
  bool log_applied = false;
  double log_eps = 0.0;
};

// Zero-phase Gaussian averager over a series of a given length.  Wraps
// the padding bookkeeping so forward smoothing and its adjoint agree.
struct Averager {
  size_t len = 0;
  size_t n_fft = 0;
  size_t left = 0;
  Padding mode = Padding::kReflect;
  std::vector<double> phi;  // sampled response on the padded grid
};

// The averaging filter with unit DC gain and -3 dB width `support`
// seconds; evaluate against frequencies in rad/s.
AnalyticFilter MakeAveragingLowpass(double support_seconds);

Averager BuildAverager(size_t len, double axis_rate,
                       const AnalyticFilter &lowpass, Padding mode);

std::vector<double> Smooth(const Averager &av, const std::vector<double> &x);
// Adjoint of Smooth as a linear map on series of length av.len.
std::vector<double> SmoothAdjoint(const Averager &av,
                                  const std::vector<double> &g);

std::vector<double> Subsample(const std::vector<double> &x, size_t ratio);
std::vector<double> SubsampleAdjoint(const std::vector<double> &g,
                                     size_t ratio, size_t len);

// First-order coefficients: each scalogram band smoothed by the T-scale
// low-pass and subsampled to hop T/2.
RealMatrix ComputeS1(const Scalogram &scal);

struct SecondOrder {
  RealMatrix s2;
  std::vector<ScatteringPath> paths;
};

// Second-order time scattering: band envelopes re-filtered through the
// envelope-rate bank (built at the scalogram frame rate), modulus, then
// T-scale averaging.  Keeps paths with lambda2 < lambda1 / Q.
SecondOrder TimeScatter(const Scalogram &scal, const FilterBank &env_bank);

// Frequency scattering of the first-order coefficients along the
// log-frequency axis.  For every S1 frame the band vector (ascending
// log-frequency) runs through the quefrency bank; output channels per
// band: band-pass centers in descending order, then the octave low-pass.
SecondOrder FreqScatter(const RealMatrix &s1,
                        const std::vector<double> &s1_log_centers,
                        const FilterBank &quef_bank);

// In-place v -> log(v + eps * median(nonzero entries of s1 and s2)).
// An all-zero tensor gets the floor eps * 1 and a warning.
void LogCompress(ScatteringCoeffs *coeffs, double eps,
                 std::vector<std::string> *warnings);

}  // namespace sct

#endif  // SCT_SCATTERING_HPP_
