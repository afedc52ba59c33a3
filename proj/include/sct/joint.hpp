// include/sct/joint.hpp

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

#ifndef SCT_JOINT_HPP_
#define SCT_JOINT_HPP_

#include <string>
#include <vector>

#include "sct/scattering.hpp"

namespace sct {

// One separable two-dimensional wavelet: a time-modulation band-pass
// from the envelope bank times an oriented quefrency profile.  A
// negative orientation mirrors the quefrency response onto negative
// bins, which makes the product wavelet sensitive to ridges that fall
// in log-frequency as time advances; beta_sign 0 is the quefrency
// low-pass paired with the same time filter.
struct JointChannel {
  size_t time_index = 0;  // filter index in the envelope bank
  double alpha = 0.0;     // time-modulation center, rad/s
  double beta = 0.0;      // quefrency center, cycles/octave
  int beta_sign = 0;
  std::vector<double> quef_response;
};

struct JointBank {
  FilterBank env_bank;
  FilterBank quef_bank;
  std::vector<JointChannel> channels;
  // Channels are grouped per time filter: first every negative
  // orientation in descending |beta|, then the quefrency low-pass,
  // then the positive orientations in descending |beta|.
  size_t ChannelsPerAlpha() const {
    return 2 * quef_bank.filters.size() + 1;
  }
};

JointBank BuildJointBank(const FilterBank &env_bank,
                         const FilterBank &quef_bank);

// Joint scattering of a scalogram: the whole time/log-frequency image
// runs through every separable wavelet, modulus, then averaging over
// time at scale T.  Output columns are grouped by first-layer band in
// descending center order, channels within a band in bank order.
SecondOrder JointScatter(const Scalogram &scal, const JointBank &bank);

// Same contract computed through an explicit two-dimensional spectrum
// with the filter built as an outer product.  Slower; used to validate
// the separable pass.
SecondOrder JointScatterDirect(const Scalogram &scal, const JointBank &bank);

// Littlewood-Paley weight of the joint family over its half-plane,
// after folding in the conjugate mirror of the real input image.  The
// covered region is the product of the envelope band and the set of
// quefrencies at the low-pass or inside the band-pass covered range.
struct JointFrameBounds {
  double min_covered = 0.0;
  double max_global = 0.0;
};

JointFrameBounds MeasureJointFrame(const JointBank &bank);

// Per frame and band, the strongest channel and the chirp slope it
// implies.  When the quefrency low-pass wins the cell carries no
// orientation: beta and slope stay zero.
struct RidgeMap {
  size_t frames = 0;
  std::vector<double> log_lambda1;      // descending, one per band
  RealMatrix alpha_star;                // [frames x bands], rad/s
  RealMatrix beta_star;                 // signed, cycles/octave
  RealMatrix value;                     // coefficient at the maximum
  RealMatrix slope;                     // nats/s, positive when rising
};

RidgeMap ExtractRidge(const ScatteringCoeffs &coeffs);

std::string RidgeCsv(const RidgeMap &map, double frame_hop_seconds);

}  // namespace sct

#endif  // SCT_JOINT_HPP_
