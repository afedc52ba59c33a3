// include/sct/common.hpp

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

#ifndef SCT_COMMON_HPP_
#define SCT_COMMON_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sct {

// Error taxonomy.  Every failure escapes as one of these three; the C API
// maps them onto process exit codes (config 2, data 3, numeric 4).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

using cplx = std::complex<double>;

// Mono signal with its sample rate in Hz.
struct Signal {
  std::vector<double> samples;
  double sample_rate = 0.0;

  size_t size() const { return samples.size(); }
};

// Dense row-major matrix.  rows index time frames in most of the code,
// cols index filter bands or scattering paths.
struct RealMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double &at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

struct ComplexMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<cplx> data;

  ComplexMatrix() = default;
  ComplexMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c) {}

  cplx &at(size_t r, size_t c) { return data[r * cols + c]; }
  const cplx &at(size_t r, size_t c) const { return data[r * cols + c]; }
};

inline size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool IsPow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Worker count control.  0 means "decide from hardware"; the resolved
// value is always >= 1.  Results are identical for any thread count:
// parallel loops only ever write disjoint slices and every reduction is
// performed sequentially in index order.
void SetNumThreads(int n);
int GetNumThreads();

// Runs fn(i) for i in [0, n).  Static contiguous partition across the
// configured worker count.  Exceptions from workers are rethrown (first
// by index order) on the calling thread.
void ParallelFor(size_t n, const std::function<void(size_t)> &fn);

std::string VersionString();

}  // namespace sct

#endif  // SCT_COMMON_HPP_
