// include/sct/fft.hpp

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

#ifndef SCT_FFT_HPP_
#define SCT_FFT_HPP_

#include "sct/common.hpp"

namespace sct {

// In-place complex DFT, e^{-iwt} sign convention.  Plans are cached per
// length behind a mutex and created with deterministic flags, so results
// are reproducible run to run and safe to execute concurrently.
void FftInplace(cplx *data, size_t n);

// In-place inverse DFT, normalized by 1/n.
void IfftInplace(cplx *data, size_t n);

inline void FftInplace(std::vector<cplx> &v) { FftInplace(v.data(), v.size()); }
inline void IfftInplace(std::vector<cplx> &v) {
  IfftInplace(v.data(), v.size());
}

std::vector<cplx> Fft(const std::vector<double> &x);

}  // namespace sct

#endif  // SCT_FFT_HPP_
