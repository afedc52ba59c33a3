// include/sct/reconstruction.hpp

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

#ifndef SCT_RECONSTRUCTION_HPP_
#define SCT_RECONSTRUCTION_HPP_

#include <string>
#include <vector>

#include "sct/pipeline.hpp"

namespace sct {

struct ReconOptions {
  size_t max_iters = 300;
  double step0 = 0.0;  // 0 picks 0.1 * |x0| / |g0|
  double tol = 1e-3;   // relative coefficient distance for convergence
  unsigned seed = 1;
};

struct ReconResult {
  Signal signal;
  std::vector<double> history;  // relative distance per iteration
  size_t iterations = 0;
  bool converged = false;
  double final_distance = 0.0;
};

// Half the squared distance between the scattering of x and the target,
// with its gradient in x.  The optional forward output receives the
// coefficients of x for the plan's transform.
double ScatterLossGrad(const Plan &plan, const std::vector<double> &x,
                       const ScatteringCoeffs &target,
                       std::vector<double> *grad,
                       ScatteringCoeffs *forward = nullptr);

// Gradient descent from seeded noise with a step that grows on accepted
// iterations and halves on rejected ones.  The start is scaled so its
// coefficient energy matches the target, which the transform's
// homogeneity in the input makes exact.
ReconResult Reconstruct(const Plan &plan, const ScatteringCoeffs &target,
                        const ReconOptions &opts,
                        std::vector<std::string> *warnings);

}  // namespace sct

#endif  // SCT_RECONSTRUCTION_HPP_
