// include/sct/models.hpp

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

#ifndef SCT_MODELS_HPP_
#define SCT_MODELS_HPP_

#include <functional>
#include <vector>

#include "sct/joint.hpp"

namespace sct {

// Time-varying transfer function: a Gaussian formant whose center moves
// along a sigmoid trajectory over a constant gain floor.  Closed-form,
// so predictions derived from it stay closed-form too.
struct TvFilter {
  double f_start_hz = 1000.0;
  double f_end_hz = 2000.0;
  double t_mid = 0.5;        // s, transition midpoint
  double rate = 10.0;        // 1/s steepness; 0 freezes the midpoint mix
  double width_hz = 200.0;   // formant Gaussian width
  double formant_gain = 1.0;
  double floor_gain = 0.0;

  double CenterHz(double t) const;
  // The transfer magnitude at time t and frequency w in rad/s.
  double Eval(double t, double w) const;
};

// Harmonic excitation of fixed pitch xi shaped by a time-varying filter.
struct HarmonicTvModel {
  double xi = 1256.6370614359172;  // rad/s, a 200 Hz comb
  TvFilter filter;
  double duration = 1.0;   // s
  double sample_rate = 16000.0;
  int n_partials = 0;      // 0 takes every partial below Nyquist
};

// Excitation of varying pitch theta'(t) with closed-form derivatives.
struct FmModel {
  std::function<double(double)> theta;
  std::function<double(double)> dtheta;
  std::function<double(double)> ddtheta;
  double duration = 1.0;
  double sample_rate = 16000.0;
  int n_partials = 1;
};

// Pitch 2 pi f0 e^{gamma t}; gamma is the pitch slope in nats per second.
FmModel ExponentialChirp(double f0_hz, double gamma, double duration,
                         double sample_rate, int n_partials);
FmModel ConstantPitch(double f0_hz, double duration, double sample_rate,
                      int n_partials);

// Real synthesis sum_k h(t, k xi) cos(k xi t).  When n_partials is set,
// partials at or above Nyquist are dropped and counted in truncated.
Signal GenTvFiltered(const HarmonicTvModel &m, size_t *truncated = nullptr);

// Real synthesis sum_k cos(k theta(t)); a partial is dropped when its
// peak instantaneous frequency k max theta' reaches Nyquist.
Signal GenFm(const FmModel &m, size_t *truncated = nullptr);

// Hann-windowed exponential chirps from f_lo to f_hi, one every period.
// ascending false reverses each event in time.
Signal GenChirpTrain(double f_lo_hz, double f_hi_hz, double event_s,
                     double period_s, double duration_s, double sample_rate,
                     bool ascending);

// Closed-form filter kernels sampled on a uniform grid, scaled by the
// grid step so a discrete convolution approximates the continuous one.
// Time-axis filters pair with e^{i w t} / 2 pi, quefrency-axis filters
// with e^{2 pi i nu u}.  Entry j holds the kernel at (j - half) steps.
std::vector<cplx> SampleTimeKernel(const AnalyticFilter &f, double dt,
                                   size_t half);
std::vector<cplx> SampleQuefKernel(const AnalyticFilter &f, double du,
                                   size_t half, bool mirrored);

// Predicted first order of the harmonic model: the wavelet response at
// the partial nearest each band center times the smoothed transfer
// magnitude of that band.  Bands whose bandwidth spans more than one
// partial are excluded.  Values sit on the coefficient frame grid.
struct TvS1Prediction {
  std::vector<size_t> bands;     // bank indices, descending center order
  std::vector<size_t> excluded;
  RealMatrix values;             // [n_frames x bands.size()]
};
TvS1Prediction PredictTvS1(const HarmonicTvModel &m, const FilterBank &bank,
                           size_t n_frames, double frame_hop);

// Predicted joint second order: two-dimensional wavelet moduli of the
// frequency-weighted transfer magnitude sampled on the full band axis,
// with the same reflected circular band padding the transform applies.
// Only channels up to beta_small cycles per octave are predicted; the
// overall scale is left unnormalized.
struct TvJointPrediction {
  std::vector<size_t> channels;    // joint channel indices included
  std::vector<size_t> excluded;
  std::vector<size_t> bands;       // bank1 indices, descending order
  std::vector<RealMatrix> values;  // per channel [out_frames x bands]
};
TvJointPrediction PredictTvJoint(const HarmonicTvModel &m,
                                 const FilterBank &bank1,
                                 const JointBank &jbank, double hop_seconds,
                                 size_t len, int oversampling,
                                 double beta_small = 0.5);

// Predicted first order of the FM model on the coefficient frame grid,
// and the pitch-variation rate theta''/theta' per frame in nats per
// second, which the joint ridge estimates.
struct FmPrediction {
  std::vector<size_t> bands;
  std::vector<size_t> excluded;
  RealMatrix s1;                 // [n_frames x bands.size()]
  std::vector<double> slope;     // nats/s per frame
};
FmPrediction PredictFm(const FmModel &m, const FilterBank &bank,
                       size_t n_frames, double frame_hop);

}  // namespace sct

#endif  // SCT_MODELS_HPP_
