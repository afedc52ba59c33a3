// include/sct/pipeline.hpp

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

#ifndef SCT_PIPELINE_HPP_
#define SCT_PIPELINE_HPP_

#include <string>
#include <vector>

#include "sct/joint.hpp"

namespace sct {

struct AnalysisConfig {
  int q = 8;
  double t_ms = 32.0;
  double k_octaves = 4.0;
  int oversampling = 2;
  TransformKind transform = TransformKind::kJoint;
  Padding padding = Padding::kReflect;
  bool apply_log = false;
  double log_eps = 1e-3;
};

// Everything derived from a configuration and a signal geometry: the
// averaging support snapped to the frame grid, transform lengths, and
// the filter banks each stage needs.
struct Plan {
  AnalysisConfig cfg;
  double sample_rate = 0.0;
  size_t n_samples = 0;
  size_t t_samples = 0;  // multiple of 2^(oversampling + 1)
  double t_seconds = 0.0;
  size_t n_fft = 0;
  size_t hop = 0;
  size_t n_frames = 0;
  size_t n_env_fft = 0;
  FilterBank bank1;
  FilterBank env_bank;   // second-order transforms
  FilterBank quef_bank;  // transforms with a quefrency factor
  JointBank joint_bank;  // joint transform only
};

Plan BuildPlan(const AnalysisConfig &cfg, double sample_rate,
               size_t n_samples);

ScatteringCoeffs Analyze(const Plan &plan, const Signal &x,
                         std::vector<std::string> *warnings);

// Convenience wrapper building the plan for the signal at hand.
ScatteringCoeffs AnalyzeSignal(const AnalysisConfig &cfg, const Signal &x,
                               std::vector<std::string> *warnings);

}  // namespace sct

#endif  // SCT_PIPELINE_HPP_
