// src/pipeline.cpp

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

#include "sct/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace sct {

Plan BuildPlan(const AnalysisConfig &cfg, double sample_rate,
               size_t n_samples) {
  if (sample_rate <= 0.0) throw ConfigError("sample rate must be positive");
  if (n_samples == 0) throw DataError("cannot plan for an empty signal");
  if (cfg.t_ms <= 0.0) throw ConfigError("averaging support must be positive");
  if (cfg.oversampling < 0 || cfg.oversampling > 16) {
    throw ConfigError("oversampling must be between 0 and 16");
  }
  if (cfg.transform != TransformKind::kS1 && cfg.oversampling < 1) {
    // At oversampling 0 the frame rate is 2 / T and the envelope bank
    // has no room between its own averaging scale and that Nyquist.
    throw ConfigError("second-order transforms need oversampling >= 1");
  }
  if (cfg.apply_log && cfg.log_eps <= 0.0) {
    throw ConfigError("log-compression eps must be positive");
  }

  Plan plan;
  plan.cfg = cfg;
  plan.sample_rate = sample_rate;
  plan.n_samples = n_samples;

  // Snap the averaging support to the subsampling grid so frames land
  // at T / 2 exactly.
  size_t div = 1ULL << (cfg.oversampling + 1);
  auto t_raw = std::llround(cfg.t_ms / 1000.0 * sample_rate);
  auto units = std::llround(static_cast<double>(t_raw) /
                            static_cast<double>(div));
  plan.t_samples = static_cast<size_t>(std::max<long long>(1, units)) * div;
  plan.t_seconds = static_cast<double>(plan.t_samples) / sample_rate;
  plan.hop = plan.t_samples / div;
  plan.n_frames = (n_samples + plan.hop - 1) / plan.hop;

  if (cfg.padding == Padding::kPeriodic) {
    if (!IsPow2(n_samples)) {
      throw ConfigError("periodic analysis needs a power-of-two length");
    }
    plan.n_fft = n_samples;
  } else {
    plan.n_fft = NextPow2(std::max(2 * n_samples, 2 * plan.t_samples));
  }
  plan.bank1 = BuildTimeBank(sample_rate, cfg.q, plan.t_seconds, plan.n_fft);

  if (cfg.transform != TransformKind::kS1) {
    double env_rate = sample_rate / static_cast<double>(plan.hop);
    if (cfg.padding == Padding::kPeriodic) {
      if (n_samples % plan.hop != 0 || !IsPow2(n_samples / plan.hop)) {
        throw ConfigError(
            "periodic analysis needs a power-of-two frame count");
      }
      plan.n_env_fft = plan.n_frames;
    } else {
      plan.n_env_fft = NextPow2(2 * plan.n_frames);
    }
    plan.env_bank = BuildTimeBank(env_rate, 1, plan.t_seconds,
                                  plan.n_env_fft);
  }

  bool wants_quef = cfg.transform == TransformKind::kTimeFreq ||
                    cfg.transform == TransformKind::kJoint;
  if (wants_quef) {
    size_t n1 = plan.bank1.filters.size();
    if (n1 < 2) {
      throw ConfigError("quefrency transforms need >= 2 first-layer bands");
    }
    plan.quef_bank = BuildQuefrencyBank(cfg.q, cfg.k_octaves,
                                        NextPow2(2 * n1));
  }
  if (cfg.transform == TransformKind::kJoint) {
    plan.joint_bank = BuildJointBank(plan.env_bank, plan.quef_bank);
  }
  return plan;
}

ScatteringCoeffs Analyze(const Plan &plan, const Signal &x,
                         std::vector<std::string> *warnings) {
  if (x.size() != plan.n_samples) {
    throw ConfigError("signal length does not match the plan");
  }
  if (std::abs(x.sample_rate - plan.sample_rate) >
      1e-9 * plan.sample_rate) {
    throw ConfigError("signal rate does not match the plan");
  }

  Scalogram scal = ComputeScalogram(x, plan.bank1, plan.cfg.oversampling,
                                    plan.cfg.padding);

  ScatteringCoeffs out;
  out.kind = plan.cfg.transform;
  out.s1 = ComputeS1(scal);
  out.s1_log_centers = scal.log_centers;
  out.sample_rate = plan.sample_rate;
  out.n_samples = plan.n_samples;
  out.q = plan.cfg.q;
  out.t_support = plan.t_seconds;
  out.oversampling = plan.cfg.oversampling;
  out.padding = plan.cfg.padding;
  out.frame_hop_seconds = plan.t_seconds / 2.0;

  switch (plan.cfg.transform) {
    case TransformKind::kS1:
      break;
    case TransformKind::kTime: {
      SecondOrder so = TimeScatter(scal, plan.env_bank);
      out.s2 = std::move(so.s2);
      out.paths2 = std::move(so.paths);
      break;
    }
    case TransformKind::kTimeFreq: {
      SecondOrder st = TimeScatter(scal, plan.env_bank);
      SecondOrder sf = FreqScatter(out.s1, out.s1_log_centers,
                                   plan.quef_bank);
      out.k_octaves = plan.cfg.k_octaves;
      size_t rows = st.s2.rows;
      out.s2 = RealMatrix(rows, st.s2.cols + sf.s2.cols);
      for (size_t f = 0; f < rows; ++f) {
        for (size_t c = 0; c < st.s2.cols; ++c) {
          out.s2.at(f, c) = st.s2.at(f, c);
        }
        for (size_t c = 0; c < sf.s2.cols; ++c) {
          out.s2.at(f, st.s2.cols + c) = sf.s2.at(f, c);
        }
      }
      out.paths2 = std::move(st.paths);
      out.paths2.insert(out.paths2.end(), sf.paths.begin(), sf.paths.end());
      break;
    }
    case TransformKind::kJoint: {
      SecondOrder so = JointScatter(scal, plan.joint_bank);
      out.k_octaves = plan.cfg.k_octaves;
      out.s2 = std::move(so.s2);
      out.paths2 = std::move(so.paths);
      break;
    }
  }

  if (plan.cfg.apply_log) {
    LogCompress(&out, plan.cfg.log_eps, warnings);
  }
  return out;
}

ScatteringCoeffs AnalyzeSignal(const AnalysisConfig &cfg, const Signal &x,
                               std::vector<std::string> *warnings) {
  Plan plan = BuildPlan(cfg, x.sample_rate, x.size());
  return Analyze(plan, x, warnings);
}

}  // namespace sct
