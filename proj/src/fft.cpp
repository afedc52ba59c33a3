// src/fft.cpp

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

#include "sct/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace sct {

namespace {

// FFTW_ESTIMATE keeps planning deterministic (no runtime measurement) and
// FFTW_UNALIGNED lets us execute on plain std::vector storage.
class PlanCache {
 public:
  fftw_plan Get(size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n);
    fftw_complex *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw NumericError("fftw plan creation failed");
    plans_[key] = p;
    return p;
  }

  ~PlanCache() {
    for (auto &kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<size_t, int>, fftw_plan> plans_;
};

PlanCache &Cache() {
  static PlanCache *cache = new PlanCache();
  return *cache;
}

}  // namespace

void FftInplace(cplx *data, size_t n) {
  if (n == 0) return;
  fftw_plan p = Cache().Get(n, FFTW_FORWARD);
  fftw_complex *buf = reinterpret_cast<fftw_complex *>(data);
  fftw_execute_dft(p, buf, buf);
}

void IfftInplace(cplx *data, size_t n) {
  if (n == 0) return;
  fftw_plan p = Cache().Get(n, FFTW_BACKWARD);
  fftw_complex *buf = reinterpret_cast<fftw_complex *>(data);
  fftw_execute_dft(p, buf, buf);
  double inv = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) data[i] *= inv;
}

std::vector<cplx> Fft(const std::vector<double> &x) {
  std::vector<cplx> v(x.begin(), x.end());
  FftInplace(v);
  return v;
}

}  // namespace sct
