// include/sct/scalogram.hpp

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

#ifndef SCT_SCALOGRAM_HPP_
#define SCT_SCALOGRAM_HPP_

#include <string>

#include "sct/filterbank.hpp"

namespace sct {

enum class Padding {
  kReflect,   // mirror without repeating the edge sample
  kPeriodic,  // circular; requires the transform length to be a multiple
              // of the signal length
};

// Mirror extension index: maps any integer onto [0, n) with period 2n-2.
size_t ReflectIndex(long i, long n);

struct Padded {
  std::vector<double> data;
  size_t left = 0;    // offset of the first original sample
  size_t src_len = 0;
};

Padded PadSignal(const std::vector<double> &x, size_t n_fft, Padding mode);

// Transpose of PadSignal as a linear map: folds a padded-domain vector
// back onto the original support.
std::vector<double> PadAdjoint(const std::vector<double> &g, size_t src_len,
                               size_t left, Padding mode);

// Complex band outputs at full rate: column b holds x convolved with
// band b of the bank (frequency-domain product, no conjugation).
ComplexMatrix WaveletTransform(const Signal &x, const FilterBank &bank,
                               Padding mode);

// First-layer modulus image: values[frame][band] = |x * psi_b| sampled
// every hop samples, where hop = T_samples / 2^(oversampling+1).
struct Scalogram {
  RealMatrix values;                // [n_frames x n_bands]
  double sample_rate = 0.0;         // of the underlying signal
  size_t n_samples = 0;             // original signal length
  size_t hop = 0;                   // samples between frames
  int oversampling = 0;
  double support = 0.0;             // T in seconds
  int bins_per_octave = 0;
  Padding padding = Padding::kReflect;
  std::vector<double> log_centers;  // descending, log2 rad/s

  double FrameRate() const { return sample_rate / static_cast<double>(hop); }
};

Scalogram ComputeScalogram(const Signal &x, const FilterBank &bank,
                           int oversampling, Padding mode);

// CSV rows are frames (first column: time in seconds), columns are bands
// in descending center order.
std::string ScalogramCsv(const Scalogram &s);

// 8-bit binary PGM, one row per band from the highest center down,
// log-compressed with the floor eps * median(nonzero values).
std::string ScalogramPgm(const Scalogram &s, double eps);

}  // namespace sct

#endif  // SCT_SCALOGRAM_HPP_
