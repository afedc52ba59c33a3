// src/reconstruction.cpp

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

#include "sct/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "sct/fft.hpp"

namespace sct {

namespace {

// Column layout of the coefficients a plan produces.  Paths depend only
// on the plan, so the target can be checked before any transform runs.
struct Geometry {
  size_t n1 = 0;
  size_t len = 0;         // scalogram frames
  size_t ratio = 1;       // frame subsampling
  size_t out_frames = 0;  // coefficient frames
  std::vector<std::vector<size_t>> eligible;  // second-layer bands per band
  std::vector<size_t> col_base;
  size_t time_cols = 0;
  size_t n_chq = 0;  // frequency-scattering channels per band
  size_t freq_cols = 0;
  size_t n_ch = 0;  // joint channels
  size_t s2_cols = 0;
};

Geometry MakeGeometry(const Plan &plan) {
  Geometry g;
  g.n1 = plan.bank1.filters.size();
  g.len = plan.n_frames;
  g.ratio = 1ULL << plan.cfg.oversampling;
  g.out_frames = (g.len + g.ratio - 1) / g.ratio;

  TransformKind kind = plan.cfg.transform;
  if (kind == TransformKind::kTime || kind == TransformKind::kTimeFreq) {
    double q1 = static_cast<double>(plan.bank1.bins_per_octave);
    g.eligible.resize(g.n1);
    g.col_base.resize(g.n1, 0);
    for (size_t b1 = 0; b1 < g.n1; ++b1) {
      g.col_base[b1] = g.time_cols;
      double lambda1 = std::pow(2.0, plan.bank1.log_centers[b1]);
      for (size_t b2 = 0; b2 < plan.env_bank.filters.size(); ++b2) {
        if (plan.env_bank.filters[b2].center < lambda1 / q1 * (1.0 - 1e-9)) {
          g.eligible[b1].push_back(b2);
          ++g.time_cols;
        }
      }
    }
  }
  if (kind == TransformKind::kTimeFreq) {
    g.n_chq = plan.quef_bank.filters.size() + 1;
    g.freq_cols = g.n1 * g.n_chq;
  }
  if (kind == TransformKind::kJoint) {
    g.n_ch = plan.joint_bank.channels.size();
  }
  g.s2_cols = kind == TransformKind::kJoint ? g.n1 * g.n_ch
                                            : g.time_cols + g.freq_cols;
  return g;
}

void CheckTarget(const Plan &plan, const Geometry &geo,
                 const ScatteringCoeffs &t) {
  if (t.kind != plan.cfg.transform) {
    throw ConfigError("target transform kind does not match the plan");
  }
  if (t.log_applied) {
    throw ConfigError(
        "reconstruction needs raw coefficients; recompute the target "
        "without log compression");
  }
  if (t.s1.rows != geo.out_frames || t.s1.cols != geo.n1) {
    throw ConfigError("target first-order shape does not match the plan");
  }
  if (geo.s2_cols == 0) {
    if (!t.s2.data.empty()) {
      throw ConfigError("target carries second-order rows the plan lacks");
    }
  } else if (t.s2.rows != geo.out_frames || t.s2.cols != geo.s2_cols) {
    throw ConfigError("target second-order shape does not match the plan");
  }
}

std::vector<ScatteringPath> MakePaths(const Plan &plan, const Geometry &geo) {
  std::vector<ScatteringPath> paths;
  switch (plan.cfg.transform) {
    case TransformKind::kS1:
      break;
    case TransformKind::kTime:
    case TransformKind::kTimeFreq:
      for (size_t b1 = 0; b1 < geo.n1; ++b1) {
        for (size_t b2 : geo.eligible[b1]) {
          ScatteringPath p;
          p.log_lambda1 = plan.bank1.log_centers[b1];
          p.log_lambda2 = std::log2(plan.env_bank.filters[b2].center);
          paths.push_back(p);
        }
      }
      if (plan.cfg.transform == TransformKind::kTimeFreq) {
        for (size_t b1 = 0; b1 < geo.n1; ++b1) {
          for (size_t c = 0; c < geo.n_chq; ++c) {
            ScatteringPath p;
            p.log_lambda1 = plan.bank1.log_centers[b1];
            p.is_freq = true;
            if (c + 1 < geo.n_chq) {
              p.beta = plan.quef_bank.filters[c].center;
              p.beta_sign = 1;
            }
            paths.push_back(p);
          }
        }
      }
      break;
    case TransformKind::kJoint:
      for (size_t b1 = 0; b1 < geo.n1; ++b1) {
        for (const auto &ch : plan.joint_bank.channels) {
          ScatteringPath p;
          p.log_lambda1 = plan.bank1.log_centers[b1];
          p.log_lambda2 = std::log2(ch.alpha);
          p.alpha = ch.alpha;
          p.beta = ch.beta;
          p.beta_sign = ch.beta_sign;
          p.is_joint = true;
          paths.push_back(p);
        }
      }
      break;
  }
  return paths;
}

// Everything the backward pass needs from the forward pass: the complex
// value feeding every modulus, and the pad offsets of each stage.
struct Trace {
  Padded pad;
  Averager av;
  std::vector<std::vector<cplx>> w;      // [n1][len] frame-grid values
  std::vector<std::vector<double>> env;  // their moduli
  RealMatrix s1;
  RealMatrix s2;
  size_t env_left = 0;        // envelope pad offset, second-order time
  std::vector<cplx> y_time;   // [time_cols * len], column-major
  size_t left_t = 0, left_q = 0;
  std::vector<cplx> v_joint;  // [(ci * n1 + u) * len + f]
  size_t left_fq = 0;
  std::vector<cplx> v_freq;   // [f * freq_cols + column]
};

cplx ModulusBackprop(double g, cplx z) {
  double a = std::abs(z);
  if (a == 0.0) return cplx(0.0, 0.0);
  return z * (g / a);
}

void ForwardLayer1(const Plan &plan, const Geometry &geo,
                   const std::vector<double> &x, Trace *tr) {
  tr->pad = PadSignal(x, plan.n_fft, plan.cfg.padding);
  std::vector<cplx> spec(tr->pad.data.begin(), tr->pad.data.end());
  FftInplace(spec);
  size_t n = plan.n_fft;
  tr->w.assign(geo.n1, {});
  tr->env.assign(geo.n1, {});
  ParallelFor(geo.n1, [&](size_t b) {
    std::vector<cplx> z(n);
    const auto &resp = plan.bank1.filters[b].response;
    for (size_t k = 0; k < n; ++k) z[k] = spec[k] * resp[k];
    IfftInplace(z);
    tr->w[b].resize(geo.len);
    tr->env[b].resize(geo.len);
    for (size_t f = 0; f < geo.len; ++f) {
      cplx v = z[tr->pad.left + f * plan.hop];
      tr->w[b][f] = v;
      tr->env[b][f] = std::abs(v);
    }
  });
}

void ForwardTimeOrder2(const Plan &plan, const Geometry &geo, Trace *tr) {
  size_t n_e = plan.env_bank.n_fft;
  tr->env_left = plan.cfg.padding == Padding::kPeriodic
                     ? 0
                     : (n_e - geo.len) / 2;
  tr->y_time.assign(geo.time_cols * geo.len, cplx(0.0, 0.0));
  ParallelFor(geo.n1, [&](size_t b1) {
    if (geo.eligible[b1].empty()) return;
    Padded p = PadSignal(tr->env[b1], n_e, plan.cfg.padding);
    std::vector<cplx> spec(p.data.begin(), p.data.end());
    FftInplace(spec);
    for (size_t j = 0; j < geo.eligible[b1].size(); ++j) {
      const auto &resp =
          plan.env_bank.filters[geo.eligible[b1][j]].response;
      std::vector<cplx> z(n_e);
      for (size_t k = 0; k < n_e; ++k) z[k] = spec[k] * resp[k];
      IfftInplace(z);
      size_t col = geo.col_base[b1] + j;
      std::vector<double> mod(geo.len);
      for (size_t f = 0; f < geo.len; ++f) {
        cplx v = z[p.left + f];
        tr->y_time[col * geo.len + f] = v;
        mod[f] = std::abs(v);
      }
      std::vector<double> sm = Subsample(Smooth(tr->av, mod), geo.ratio);
      for (size_t f = 0; f < geo.out_frames; ++f) tr->s2.at(f, col) = sm[f];
    }
  });
}

void ForwardFreqOrder2(const Plan &plan, const Geometry &geo, Trace *tr) {
  size_t n_q = plan.quef_bank.n_fft;
  tr->left_fq = (n_q - geo.n1) / 2;
  tr->v_freq.assign(geo.out_frames * geo.freq_cols, cplx(0.0, 0.0));
  ParallelFor(geo.out_frames, [&](size_t f) {
    std::vector<double> row(geo.n1);
    for (size_t b = 0; b < geo.n1; ++b) row[b] = tr->s1.at(f, geo.n1 - 1 - b);
    Padded p = PadSignal(row, n_q, Padding::kReflect);
    std::vector<cplx> spec(p.data.begin(), p.data.end());
    FftInplace(spec);
    for (size_t c = 0; c < geo.n_chq; ++c) {
      const auto &resp = c + 1 < geo.n_chq
                             ? plan.quef_bank.filters[c].response
                             : plan.quef_bank.lowpass.response;
      std::vector<cplx> z(n_q);
      for (size_t k = 0; k < n_q; ++k) z[k] = spec[k] * resp[k];
      IfftInplace(z);
      for (size_t b = 0; b < geo.n1; ++b) {
        size_t u = geo.n1 - 1 - b;
        cplx v = z[p.left + u];
        tr->v_freq[f * geo.freq_cols + b * geo.n_chq + c] = v;
        tr->s2.at(f, geo.time_cols + b * geo.n_chq + c) = std::abs(v);
      }
    }
  });
}

void ForwardJointOrder2(const Plan &plan, const Geometry &geo, Trace *tr) {
  const JointBank &bank = plan.joint_bank;
  size_t n_t = bank.env_bank.n_fft;
  size_t n_q = bank.quef_bank.n_fft;
  size_t per_alpha = bank.ChannelsPerAlpha();
  size_t n_alpha = bank.env_bank.filters.size();

  // Padded envelope image, bands ascending, time pad then reflect rows.
  std::vector<double> img(n_t * n_q, 0.0);
  {
    std::vector<std::vector<double>> cols(geo.n1);
    for (size_t u = 0; u < geo.n1; ++u) {
      std::vector<double> series(geo.len);
      for (size_t f = 0; f < geo.len; ++f) {
        series[f] = tr->env[geo.n1 - 1 - u][f];
      }
      Padded p = PadSignal(series, n_t, plan.cfg.padding);
      cols[u] = std::move(p.data);
      tr->left_t = p.left;
    }
    for (size_t t = 0; t < n_t; ++t) {
      std::vector<double> row(geo.n1);
      for (size_t u = 0; u < geo.n1; ++u) row[u] = cols[u][t];
      Padded p = PadSignal(row, n_q, Padding::kReflect);
      tr->left_q = p.left;
      std::copy(p.data.begin(), p.data.end(), img.begin() + t * n_q);
    }
  }

  std::vector<cplx> tspec(n_t * n_q);
  for (size_t i = 0; i < tspec.size(); ++i) tspec[i] = img[i];
  {
    std::vector<cplx> col(n_t);
    for (size_t u = 0; u < n_q; ++u) {
      for (size_t t = 0; t < n_t; ++t) col[t] = tspec[t * n_q + u];
      FftInplace(col);
      for (size_t t = 0; t < n_t; ++t) tspec[t * n_q + u] = col[t];
    }
  }

  tr->v_joint.assign(geo.n_ch * geo.n1 * geo.len, cplx(0.0, 0.0));
  ParallelFor(n_alpha, [&](size_t a) {
    const auto &tresp = bank.env_bank.filters[a].response;
    std::vector<cplx> y(n_t * n_q);
    {
      std::vector<cplx> col(n_t);
      for (size_t u = 0; u < n_q; ++u) {
        for (size_t t = 0; t < n_t; ++t) {
          col[t] = tspec[t * n_q + u] * tresp[t];
        }
        IfftInplace(col);
        for (size_t t = 0; t < n_t; ++t) y[t * n_q + u] = col[t];
      }
    }
    for (size_t t = 0; t < n_t; ++t) FftInplace(&y[t * n_q], n_q);

    std::vector<cplx> z(n_t * n_q);
    for (size_t c = 0; c < per_alpha; ++c) {
      size_t ci = a * per_alpha + c;
      const auto &qresp = bank.channels[ci].quef_response;
      for (size_t t = 0; t < n_t; ++t) {
        for (size_t u = 0; u < n_q; ++u) {
          z[t * n_q + u] = y[t * n_q + u] * qresp[u];
        }
        IfftInplace(&z[t * n_q], n_q);
      }
      for (size_t u = 0; u < geo.n1; ++u) {
        std::vector<double> mod(geo.len);
        for (size_t f = 0; f < geo.len; ++f) {
          cplx v = z[(tr->left_t + f) * n_q + tr->left_q + u];
          tr->v_joint[(ci * geo.n1 + u) * geo.len + f] = v;
          mod[f] = std::abs(v);
        }
        std::vector<double> sm = Subsample(Smooth(tr->av, mod), geo.ratio);
        size_t b1 = geo.n1 - 1 - u;
        for (size_t f = 0; f < geo.out_frames; ++f) {
          tr->s2.at(f, b1 * geo.n_ch + ci) = sm[f];
        }
      }
    }
  });
}

void ForwardPass(const Plan &plan, const Geometry &geo,
                 const std::vector<double> &x, Trace *tr) {
  ForwardLayer1(plan, geo, x, tr);
  tr->av = BuildAverager(geo.len, plan.sample_rate / plan.hop,
                         MakeAveragingLowpass(plan.bank1.support),
                         plan.cfg.padding);
  tr->s1 = RealMatrix(geo.out_frames, geo.n1);
  ParallelFor(geo.n1, [&](size_t b) {
    std::vector<double> sm = Subsample(Smooth(tr->av, tr->env[b]), geo.ratio);
    for (size_t f = 0; f < geo.out_frames; ++f) tr->s1.at(f, b) = sm[f];
  });
  tr->s2 = geo.s2_cols > 0 ? RealMatrix(geo.out_frames, geo.s2_cols)
                           : RealMatrix();
  if (geo.time_cols > 0) ForwardTimeOrder2(plan, geo, tr);
  if (geo.freq_cols > 0) ForwardFreqOrder2(plan, geo, tr);
  if (geo.n_ch > 0) ForwardJointOrder2(plan, geo, tr);
}

// Gradient of half the squared coefficient distance with respect to an
// S1 or S2 output column, pulled back to the scalogram frame grid.
std::vector<double> AveragerBackprop(const Trace &tr, const Geometry &geo,
                                     const RealMatrix &diff, size_t col) {
  std::vector<double> d(geo.out_frames);
  for (size_t f = 0; f < geo.out_frames; ++f) d[f] = diff.at(f, col);
  return SmoothAdjoint(tr.av, SubsampleAdjoint(d, geo.ratio, geo.len));
}

void BackwardFreqOrder2(const Plan &plan, const Geometry &geo,
                        const Trace &tr, const RealMatrix &d2,
                        RealMatrix *d1) {
  size_t n_q = plan.quef_bank.n_fft;
  ParallelFor(geo.out_frames, [&](size_t f) {
    std::vector<cplx> acc(n_q, cplx(0.0, 0.0));
    std::vector<cplx> embed(n_q);
    for (size_t c = 0; c < geo.n_chq; ++c) {
      std::fill(embed.begin(), embed.end(), cplx(0.0, 0.0));
      for (size_t b = 0; b < geo.n1; ++b) {
        size_t u = geo.n1 - 1 - b;
        double g = d2.at(f, geo.time_cols + b * geo.n_chq + c);
        cplx v = tr.v_freq[f * geo.freq_cols + b * geo.n_chq + c];
        embed[tr.left_fq + u] = ModulusBackprop(g, v);
      }
      FftInplace(embed);
      const auto &resp = c + 1 < geo.n_chq
                             ? plan.quef_bank.filters[c].response
                             : plan.quef_bank.lowpass.response;
      for (size_t k = 0; k < n_q; ++k) acc[k] += embed[k] * resp[k];
    }
    IfftInplace(acc);
    std::vector<double> full(n_q);
    for (size_t k = 0; k < n_q; ++k) full[k] = acc[k].real();
    std::vector<double> drow =
        PadAdjoint(full, geo.n1, tr.left_fq, Padding::kReflect);
    for (size_t u = 0; u < geo.n1; ++u) {
      d1->at(f, geo.n1 - 1 - u) += drow[u];
    }
  });
}

void BackwardTimeOrder2(const Plan &plan, const Geometry &geo,
                        const Trace &tr, const RealMatrix &d2,
                        std::vector<std::vector<double>> *de) {
  size_t n_e = plan.env_bank.n_fft;
  ParallelFor(geo.n1, [&](size_t b1) {
    if (geo.eligible[b1].empty()) return;
    std::vector<cplx> acc(n_e, cplx(0.0, 0.0));
    for (size_t j = 0; j < geo.eligible[b1].size(); ++j) {
      size_t col = geo.col_base[b1] + j;
      std::vector<double> dm = AveragerBackprop(tr, geo, d2, col);
      std::vector<cplx> dz(n_e, cplx(0.0, 0.0));
      for (size_t f = 0; f < geo.len; ++f) {
        dz[tr.env_left + f] =
            ModulusBackprop(dm[f], tr.y_time[col * geo.len + f]);
      }
      FftInplace(dz);
      const auto &resp =
          plan.env_bank.filters[geo.eligible[b1][j]].response;
      for (size_t k = 0; k < n_e; ++k) acc[k] += dz[k] * resp[k];
    }
    IfftInplace(acc);
    std::vector<double> full(n_e);
    for (size_t k = 0; k < n_e; ++k) full[k] = acc[k].real();
    std::vector<double> fold =
        PadAdjoint(full, geo.len, tr.env_left, plan.cfg.padding);
    for (size_t f = 0; f < geo.len; ++f) (*de)[b1][f] += fold[f];
  });
}

void BackwardJointOrder2(const Plan &plan, const Geometry &geo,
                         const Trace &tr, const RealMatrix &d2,
                         std::vector<std::vector<double>> *de) {
  const JointBank &bank = plan.joint_bank;
  size_t n_t = bank.env_bank.n_fft;
  size_t n_q = bank.quef_bank.n_fft;
  size_t per_alpha = bank.ChannelsPerAlpha();
  size_t n_alpha = bank.env_bank.filters.size();

  // The separable stages carry real symmetric spectra, so each stage is
  // its own adjoint and the backward image walks the forward stages in
  // reverse.  Channels and time filters accumulate in index order so the
  // result does not depend on the worker count.
  std::vector<cplx> colacc(n_t * n_q, cplx(0.0, 0.0));
  for (size_t a = 0; a < n_alpha; ++a) {
    std::vector<cplx> rowacc(n_t * n_q, cplx(0.0, 0.0));
    std::vector<cplx> eimg(n_t * n_q);
    for (size_t c = 0; c < per_alpha; ++c) {
      size_t ci = a * per_alpha + c;
      std::fill(eimg.begin(), eimg.end(), cplx(0.0, 0.0));
      for (size_t u = 0; u < geo.n1; ++u) {
        size_t b1 = geo.n1 - 1 - u;
        std::vector<double> dm =
            AveragerBackprop(tr, geo, d2, b1 * geo.n_ch + ci);
        for (size_t f = 0; f < geo.len; ++f) {
          cplx v = tr.v_joint[(ci * geo.n1 + u) * geo.len + f];
          eimg[(tr.left_t + f) * n_q + tr.left_q + u] =
              ModulusBackprop(dm[f], v);
        }
      }
      const auto &qresp = bank.channels[ci].quef_response;
      for (size_t t = tr.left_t; t < tr.left_t + geo.len; ++t) {
        FftInplace(&eimg[t * n_q], n_q);
        for (size_t u = 0; u < n_q; ++u) {
          rowacc[t * n_q + u] += eimg[t * n_q + u] * qresp[u];
        }
      }
    }
    for (size_t t = tr.left_t; t < tr.left_t + geo.len; ++t) {
      IfftInplace(&rowacc[t * n_q], n_q);
    }
    const auto &tresp = bank.env_bank.filters[a].response;
    std::vector<cplx> col(n_t);
    for (size_t u = 0; u < n_q; ++u) {
      for (size_t t = 0; t < n_t; ++t) col[t] = rowacc[t * n_q + u];
      FftInplace(col);
      for (size_t t = 0; t < n_t; ++t) {
        colacc[t * n_q + u] += col[t] * tresp[t];
      }
    }
  }
  {
    std::vector<cplx> col(n_t);
    for (size_t u = 0; u < n_q; ++u) {
      for (size_t t = 0; t < n_t; ++t) col[t] = colacc[t * n_q + u];
      IfftInplace(col);
      for (size_t t = 0; t < n_t; ++t) colacc[t * n_q + u] = col[t];
    }
  }

  // Fold the reflect pad of every row, then the time pad of every band.
  std::vector<std::vector<double>> rows_folded(n_t);
  std::vector<double> rrow(n_q);
  for (size_t t = 0; t < n_t; ++t) {
    for (size_t u = 0; u < n_q; ++u) rrow[u] = colacc[t * n_q + u].real();
    rows_folded[t] = PadAdjoint(rrow, geo.n1, tr.left_q, Padding::kReflect);
  }
  std::vector<double> tcol(n_t);
  for (size_t u = 0; u < geo.n1; ++u) {
    for (size_t t = 0; t < n_t; ++t) tcol[t] = rows_folded[t][u];
    std::vector<double> fold =
        PadAdjoint(tcol, geo.len, tr.left_t, plan.cfg.padding);
    size_t b1 = geo.n1 - 1 - u;
    for (size_t f = 0; f < geo.len; ++f) (*de)[b1][f] += fold[f];
  }
}

std::vector<double> BackwardPass(const Plan &plan, const Geometry &geo,
                                 const Trace &tr,
                                 const ScatteringCoeffs &target) {
  RealMatrix d1(geo.out_frames, geo.n1);
  for (size_t i = 0; i < d1.data.size(); ++i) {
    d1.data[i] = tr.s1.data[i] - target.s1.data[i];
  }
  RealMatrix d2(geo.out_frames, geo.s2_cols);
  for (size_t i = 0; i < d2.data.size(); ++i) {
    d2.data[i] = tr.s2.data[i] - target.s2.data[i];
  }

  // Frequency scattering reads the smoothed first order, so its gradient
  // joins the first-order term before the smoothing adjoint runs.
  if (geo.freq_cols > 0) BackwardFreqOrder2(plan, geo, tr, d2, &d1);

  std::vector<std::vector<double>> de(geo.n1,
                                      std::vector<double>(geo.len, 0.0));
  ParallelFor(geo.n1, [&](size_t b) {
    de[b] = AveragerBackprop(tr, geo, d1, b);
  });
  if (geo.time_cols > 0) BackwardTimeOrder2(plan, geo, tr, d2, &de);
  if (geo.n_ch > 0) BackwardJointOrder2(plan, geo, tr, d2, &de);

  // First layer, spectra accumulated in band order for determinism.
  size_t n = plan.n_fft;
  std::vector<cplx> acc(n, cplx(0.0, 0.0));
  std::vector<cplx> dz(n);
  for (size_t b = 0; b < geo.n1; ++b) {
    std::fill(dz.begin(), dz.end(), cplx(0.0, 0.0));
    for (size_t f = 0; f < geo.len; ++f) {
      dz[tr.pad.left + f * plan.hop] = ModulusBackprop(de[b][f], tr.w[b][f]);
    }
    FftInplace(dz);
    const auto &resp = plan.bank1.filters[b].response;
    for (size_t k = 0; k < n; ++k) acc[k] += dz[k] * resp[k];
  }
  IfftInplace(acc);
  std::vector<double> full(n);
  for (size_t k = 0; k < n; ++k) full[k] = acc[k].real();
  return PadAdjoint(full, plan.n_samples, tr.pad.left, plan.cfg.padding);
}

double HalfSquaredDistance(const Trace &tr, const ScatteringCoeffs &t) {
  double acc = 0.0;
  for (size_t i = 0; i < tr.s1.data.size(); ++i) {
    double d = tr.s1.data[i] - t.s1.data[i];
    acc += d * d;
  }
  for (size_t i = 0; i < tr.s2.data.size(); ++i) {
    double d = tr.s2.data[i] - t.s2.data[i];
    acc += d * d;
  }
  return 0.5 * acc;
}

double Norm2(const std::vector<double> &v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double CoeffEnergy(const ScatteringCoeffs &c) {
  double acc = 0.0;
  for (double v : c.s1.data) acc += v * v;
  for (double v : c.s2.data) acc += v * v;
  return acc;
}

void FillForward(const Plan &plan, const Geometry &geo, const Trace &tr,
                 ScatteringCoeffs *out) {
  out->kind = plan.cfg.transform;
  out->s1 = tr.s1;
  out->s2 = tr.s2;
  out->s1_log_centers = plan.bank1.log_centers;
  out->paths2 = MakePaths(plan, geo);
  out->sample_rate = plan.sample_rate;
  out->n_samples = plan.n_samples;
  out->q = plan.cfg.q;
  out->t_support = plan.t_seconds;
  out->oversampling = plan.cfg.oversampling;
  out->padding = plan.cfg.padding;
  out->frame_hop_seconds = plan.t_seconds / 2.0;
  if (plan.cfg.transform == TransformKind::kTimeFreq ||
      plan.cfg.transform == TransformKind::kJoint) {
    out->k_octaves = plan.cfg.k_octaves;
  }
  out->log_applied = false;
}

}  // namespace

double ScatterLossGrad(const Plan &plan, const std::vector<double> &x,
                       const ScatteringCoeffs &target,
                       std::vector<double> *grad, ScatteringCoeffs *forward) {
  if (x.size() != plan.n_samples) {
    throw ConfigError("signal length does not match the plan");
  }
  Geometry geo = MakeGeometry(plan);
  CheckTarget(plan, geo, target);
  for (double v : x) {
    if (!std::isfinite(v)) {
      if (grad != nullptr) grad->assign(x.size(), 0.0);
      return std::numeric_limits<double>::infinity();
    }
  }

  Trace tr;
  ForwardPass(plan, geo, x, &tr);
  if (forward != nullptr) FillForward(plan, geo, tr, forward);
  double loss = HalfSquaredDistance(tr, target);
  if (grad != nullptr) {
    if (std::isfinite(loss)) {
      *grad = BackwardPass(plan, geo, tr, target);
    } else {
      grad->assign(x.size(), 0.0);
    }
  }
  return loss;
}

ReconResult Reconstruct(const Plan &plan, const ScatteringCoeffs &target,
                        const ReconOptions &opts,
                        std::vector<std::string> *warnings) {
  if (opts.max_iters == 0) throw ConfigError("max_iters must be positive");
  if (opts.tol < 0.0) throw ConfigError("tolerance must be nonnegative");
  Geometry geo = MakeGeometry(plan);
  CheckTarget(plan, geo, target);

  double target_energy = CoeffEnergy(target);
  auto rel_dist = [&](double loss) {
    double d = std::sqrt(2.0 * loss);
    return target_energy > 0.0 ? d / std::sqrt(target_energy) : d;
  };

  // Seeded noise start, scaled so its coefficient energy matches the
  // target; the transform scales linearly with the input, so the match
  // is exact.  The raw engine output is mapped by hand to keep the start
  // identical across standard library implementations.
  std::mt19937 rng(opts.seed);
  std::vector<double> x(plan.n_samples);
  for (double &v : x) {
    v = 2.0 * (static_cast<double>(rng()) / 4294967295.0) - 1.0;
  }
  {
    ScatteringCoeffs f0;
    ScatterLossGrad(plan, x, target, nullptr, &f0);
    double e0 = CoeffEnergy(f0);
    if (e0 > 0.0 && target_energy > 0.0) {
      double scale = std::sqrt(target_energy / e0);
      for (double &v : x) v *= scale;
    }
  }

  std::vector<double> g;
  double loss = ScatterLossGrad(plan, x, target, &g);
  if (!std::isfinite(loss)) {
    throw NumericError("reconstruction start produces a non-finite loss");
  }
  double gn = Norm2(g);
  double step = opts.step0 > 0.0 ? opts.step0
                                 : (gn > 0.0 ? 0.1 * Norm2(x) / gn : 0.0);

  ReconResult res;
  double dist = rel_dist(loss);
  res.history.push_back(dist);

  size_t rejects = 0;
  std::vector<double> x_try(plan.n_samples), g_try;
  for (size_t it = 0; it < opts.max_iters; ++it) {
    if (dist <= opts.tol) {
      res.converged = true;
      break;
    }
    if (gn == 0.0) break;
    for (size_t i = 0; i < x.size(); ++i) x_try[i] = x[i] - step * g[i];
    double loss_try = ScatterLossGrad(plan, x_try, target, &g_try);
    if (std::isfinite(loss_try) && loss_try < loss) {
      x.swap(x_try);
      g.swap(g_try);
      loss = loss_try;
      gn = Norm2(g);
      dist = rel_dist(loss);
      step *= 1.1;
      rejects = 0;
    } else {
      step *= 0.5;
      ++rejects;
      if (rejects >= 80) {
        if (!std::isfinite(loss_try)) {
          throw NumericError(
              "reconstruction diverged: the step keeps producing "
              "non-finite losses");
        }
        if (warnings != nullptr) {
          warnings->push_back(
              "reconstruction stalled: step size collapsed without "
              "further improvement");
        }
        break;
      }
    }
    res.history.push_back(dist);
    res.iterations = it + 1;
  }
  if (dist <= opts.tol) res.converged = true;

  res.signal.samples = std::move(x);
  res.signal.sample_rate = plan.sample_rate;
  res.final_distance = dist;
  if (!res.converged && warnings != nullptr) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "reconstruction stopped after %zu iterations at relative "
                  "distance %.3g",
                  res.iterations, dist);
    warnings->push_back(buf);
  }
  return res;
}

}  // namespace sct
