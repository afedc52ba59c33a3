// src/joint.cpp

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

#include "sct/joint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sct/fft.hpp"

namespace sct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.6931471805599453;
constexpr double kGridTol = 1.0 - 1e-12;

void CheckBanks(const Scalogram &scal, const JointBank &bank) {
  double env_rate = scal.FrameRate();
  const FilterBank &eb = bank.env_bank;
  if (std::abs(eb.axis_rate - env_rate) > 1e-6 * env_rate) {
    throw ConfigError("envelope bank rate does not match the scalogram");
  }
  size_t len = scal.values.rows;
  size_t n_t = scal.padding == Padding::kPeriodic ? len : NextPow2(2 * len);
  if (eb.n_fft != n_t) {
    throw ConfigError("envelope bank transform length mismatch");
  }
  if (!eb.filters.empty() && eb.filters.front().center > kPi * env_rate) {
    throw ConfigError("scalogram hop too coarse for the envelope bank");
  }
  size_t n1 = scal.values.cols;
  if (n1 < 2) throw ConfigError("joint scattering needs >= 2 bands");
  if (bank.quef_bank.n_fft < NextPow2(2 * n1)) {
    throw ConfigError("quefrency bank transform length too short");
  }
}

// Padded image in row-major [n_t x n_q] layout with the scalogram block
// at (left_t, left_q), bands flipped to ascending log-frequency.
struct PaddedImage {
  std::vector<double> data;
  size_t n_t = 0, n_q = 0;
  size_t left_t = 0, left_q = 0;
};

PaddedImage PadImage(const Scalogram &scal, size_t n_t, size_t n_q) {
  size_t len = scal.values.rows;
  size_t n1 = scal.values.cols;
  PaddedImage img;
  img.n_t = n_t;
  img.n_q = n_q;
  img.data.assign(n_t * n_q, 0.0);

  // Pad every band along time first.
  std::vector<std::vector<double>> cols(n1);
  size_t left_t = 0;
  for (size_t u = 0; u < n1; ++u) {
    std::vector<double> series(len);
    for (size_t f = 0; f < len; ++f) {
      series[f] = scal.values.at(f, n1 - 1 - u);
    }
    Padded p = PadSignal(series, n_t, scal.padding);
    cols[u] = std::move(p.data);
    left_t = p.left;
  }
  img.left_t = left_t;

  // Then pad every row along the log-frequency axis by reflection.
  for (size_t t = 0; t < n_t; ++t) {
    std::vector<double> row(n1);
    for (size_t u = 0; u < n1; ++u) row[u] = cols[u][t];
    Padded p = PadSignal(row, n_q, Padding::kReflect);
    img.left_q = p.left;
    std::copy(p.data.begin(), p.data.end(), img.data.begin() + t * n_q);
  }
  return img;
}

std::vector<ScatteringPath> JointPaths(const Scalogram &scal,
                                       const JointBank &bank) {
  std::vector<ScatteringPath> paths;
  size_t n1 = scal.values.cols;
  paths.reserve(n1 * bank.channels.size());
  for (size_t b1 = 0; b1 < n1; ++b1) {
    for (const auto &ch : bank.channels) {
      ScatteringPath p;
      p.log_lambda1 = scal.log_centers[b1];
      p.log_lambda2 = std::log2(ch.alpha);
      p.alpha = ch.alpha;
      p.beta = ch.beta;
      p.beta_sign = ch.beta_sign;
      p.is_joint = true;
      paths.push_back(p);
    }
  }
  return paths;
}

// Modulus of one filtered image, averaged over time and subsampled,
// written into the output columns of every band for channel `ci`.
void AccumulateChannel(const std::vector<cplx> &z, const PaddedImage &img,
                       const Scalogram &scal, const Averager &av,
                       size_t ratio, size_t ci, size_t n_ch,
                       RealMatrix *out) {
  size_t len = scal.values.rows;
  size_t n1 = scal.values.cols;
  for (size_t u = 0; u < n1; ++u) {
    std::vector<double> mod(len);
    for (size_t f = 0; f < len; ++f) {
      mod[f] = std::abs(z[(img.left_t + f) * img.n_q + img.left_q + u]);
    }
    std::vector<double> sm = Subsample(Smooth(av, mod), ratio);
    size_t b1 = n1 - 1 - u;
    for (size_t f = 0; f < sm.size(); ++f) {
      out->at(f, b1 * n_ch + ci) = sm[f];
    }
  }
}

}  // namespace

JointBank BuildJointBank(const FilterBank &env_bank,
                         const FilterBank &quef_bank) {
  if (env_bank.quefrency_axis || !quef_bank.quefrency_axis) {
    throw ConfigError("joint bank needs a time bank and a quefrency bank");
  }
  if (env_bank.filters.empty() || quef_bank.filters.empty()) {
    throw ConfigError("joint bank needs nonempty factors");
  }
  JointBank jb;
  jb.env_bank = env_bank;
  jb.quef_bank = quef_bank;
  size_t n_q = quef_bank.n_fft;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (size_t a = 0; a < env_bank.filters.size(); ++a) {
    double alpha = env_bank.filters[a].center;
    // Negative orientations, then the low-pass, then positive.
    for (size_t i = 0; i < quef_bank.filters.size(); ++i) {
      JointChannel ch;
      ch.time_index = a;
      ch.alpha = alpha;
      ch.beta = quef_bank.filters[i].center;
      ch.beta_sign = -1;
      ch.quef_response.resize(n_q);
      const auto &r = quef_bank.filters[i].response;
      for (size_t j = 0; j < n_q; ++j) {
        ch.quef_response[j] = inv_sqrt2 * r[(n_q - j) % n_q];
      }
      jb.channels.push_back(std::move(ch));
    }
    {
      JointChannel ch;
      ch.time_index = a;
      ch.alpha = alpha;
      ch.beta = 0.0;
      ch.beta_sign = 0;
      ch.quef_response = quef_bank.lowpass.response;
      jb.channels.push_back(std::move(ch));
    }
    for (size_t i = 0; i < quef_bank.filters.size(); ++i) {
      JointChannel ch;
      ch.time_index = a;
      ch.alpha = alpha;
      ch.beta = quef_bank.filters[i].center;
      ch.beta_sign = 1;
      ch.quef_response.resize(n_q);
      const auto &r = quef_bank.filters[i].response;
      for (size_t j = 0; j < n_q; ++j) {
        ch.quef_response[j] = inv_sqrt2 * r[j];
      }
      jb.channels.push_back(std::move(ch));
    }
  }
  return jb;
}

SecondOrder JointScatter(const Scalogram &scal, const JointBank &bank) {
  CheckBanks(scal, bank);
  size_t len = scal.values.rows;
  size_t n1 = scal.values.cols;
  size_t n_t = bank.env_bank.n_fft;
  size_t n_q = bank.quef_bank.n_fft;
  size_t ratio = 1ULL << scal.oversampling;
  size_t out_frames = (len + ratio - 1) / ratio;
  size_t n_ch = bank.channels.size();

  PaddedImage img = PadImage(scal, n_t, n_q);
  Averager av = BuildAverager(len, scal.FrameRate(),
                              MakeAveragingLowpass(scal.support),
                              scal.padding);

  // Spectrum along time of every padded column, shared by all channels.
  std::vector<cplx> tspec(n_t * n_q);
  for (size_t t = 0; t < n_t; ++t) {
    for (size_t u = 0; u < n_q; ++u) {
      tspec[t * n_q + u] = img.data[t * n_q + u];
    }
  }
  {
    std::vector<cplx> col(n_t);
    for (size_t u = 0; u < n_q; ++u) {
      for (size_t t = 0; t < n_t; ++t) col[t] = tspec[t * n_q + u];
      FftInplace(col);
      for (size_t t = 0; t < n_t; ++t) tspec[t * n_q + u] = col[t];
    }
  }

  SecondOrder out;
  out.paths = JointPaths(scal, bank);
  out.s2 = RealMatrix(out_frames, n1 * n_ch);

  // Channels sharing a time filter reuse one analytic-in-time pass.
  size_t per_alpha = bank.ChannelsPerAlpha();
  size_t n_alpha = bank.env_bank.filters.size();
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
    // Rows to the quefrency spectrum once per time filter.
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
      AccumulateChannel(z, img, scal, av, ratio, ci, n_ch, &out.s2);
    }
  });
  return out;
}

SecondOrder JointScatterDirect(const Scalogram &scal, const JointBank &bank) {
  CheckBanks(scal, bank);
  size_t len = scal.values.rows;
  size_t n1 = scal.values.cols;
  size_t n_t = bank.env_bank.n_fft;
  size_t n_q = bank.quef_bank.n_fft;
  size_t ratio = 1ULL << scal.oversampling;
  size_t out_frames = (len + ratio - 1) / ratio;
  size_t n_ch = bank.channels.size();

  PaddedImage img = PadImage(scal, n_t, n_q);
  Averager av = BuildAverager(len, scal.FrameRate(),
                              MakeAveragingLowpass(scal.support),
                              scal.padding);

  // Full two-dimensional spectrum, rows first then columns.
  std::vector<cplx> spec(n_t * n_q);
  for (size_t i = 0; i < spec.size(); ++i) spec[i] = img.data[i];
  for (size_t t = 0; t < n_t; ++t) FftInplace(&spec[t * n_q], n_q);
  {
    std::vector<cplx> col(n_t);
    for (size_t u = 0; u < n_q; ++u) {
      for (size_t t = 0; t < n_t; ++t) col[t] = spec[t * n_q + u];
      FftInplace(col);
      for (size_t t = 0; t < n_t; ++t) spec[t * n_q + u] = col[t];
    }
  }

  SecondOrder out;
  out.paths = JointPaths(scal, bank);
  out.s2 = RealMatrix(out_frames, n1 * n_ch);

  ParallelFor(n_ch, [&](size_t ci) {
    const auto &ch = bank.channels[ci];
    const auto &tresp = bank.env_bank.filters[ch.time_index].response;
    std::vector<cplx> z(n_t * n_q);
    for (size_t t = 0; t < n_t; ++t) {
      for (size_t u = 0; u < n_q; ++u) {
        z[t * n_q + u] = spec[t * n_q + u] * (tresp[t] * ch.quef_response[u]);
      }
    }
    {
      std::vector<cplx> col(n_t);
      for (size_t u = 0; u < n_q; ++u) {
        for (size_t t = 0; t < n_t; ++t) col[t] = z[t * n_q + u];
        IfftInplace(col);
        for (size_t t = 0; t < n_t; ++t) z[t * n_q + u] = col[t];
      }
    }
    for (size_t t = 0; t < n_t; ++t) IfftInplace(&z[t * n_q], n_q);
    AccumulateChannel(z, img, scal, av, ratio, ci, n_ch, &out.s2);
  });
  return out;
}

JointFrameBounds MeasureJointFrame(const JointBank &bank) {
  const FilterBank &eb = bank.env_bank;
  const FilterBank &qb = bank.quef_bank;
  size_t n_t = eb.n_fft;
  size_t n_q = qb.n_fft;
  double step_t = eb.BinStep();
  double step_q = qb.BinStep();

  JointFrameBounds out;
  out.min_covered = 1e300;
  out.max_global = 0.0;

  // Weight of the quefrency factors per signed bin, and of the time
  // factors per positive bin; the separable family makes the total a
  // product of the two.
  std::vector<double> wq(n_q, 0.0);
  size_t per_alpha = bank.ChannelsPerAlpha();
  for (size_t c = 0; c < per_alpha; ++c) {
    const auto &r = bank.channels[c].quef_response;
    for (size_t l = 0; l < n_q; ++l) wq[l] += r[l] * r[l];
  }

  std::vector<double> wt(n_t, 0.0);
  for (const auto &f : eb.filters) {
    for (size_t k = 0; k < n_t; ++k) {
      wt[k] += f.response[k] * f.response[k];
    }
  }

  for (size_t k = 0; k <= n_t / 2; ++k) {
    double w = step_t * static_cast<double>(k);
    bool t_cov = w >= eb.covered_lo * kGridTol && w <= eb.covered_hi / kGridTol;
    for (size_t l = 0; l < n_q; ++l) {
      // Each grid point folds with its conjugate mirror; the mirror
      // lands where the analytic time filters vanish, so away from the
      // axes only one term survives.
      double b = 0.5 * (wt[k] * wq[l] +
                        wt[(n_t - k) % n_t] * wq[(n_q - l) % n_q]);
      out.max_global = std::max(out.max_global, b);
      double v = step_q * (l <= n_q / 2 ? static_cast<double>(l)
                                        : static_cast<double>(l) -
                                              static_cast<double>(n_q));
      double av = std::abs(v);
      bool q_cov = l == 0 || (av >= qb.covered_lo * kGridTol &&
                              av <= qb.covered_hi / kGridTol);
      if (t_cov && q_cov) out.min_covered = std::min(out.min_covered, b);
    }
  }
  if (out.min_covered > 1e299) out.min_covered = 0.0;
  return out;
}

RidgeMap ExtractRidge(const ScatteringCoeffs &coeffs) {
  if (coeffs.kind != TransformKind::kJoint) {
    throw ConfigError("ridge extraction needs joint coefficients");
  }
  size_t n1 = coeffs.s1_log_centers.size();
  if (n1 == 0 || coeffs.paths2.empty() || coeffs.paths2.size() % n1 != 0) {
    throw DataError("joint coefficient layout is inconsistent");
  }
  size_t n_ch = coeffs.paths2.size() / n1;
  size_t frames = coeffs.s2.rows;

  RidgeMap map;
  map.frames = frames;
  map.log_lambda1 = coeffs.s1_log_centers;
  map.alpha_star = RealMatrix(frames, n1);
  map.beta_star = RealMatrix(frames, n1);
  map.value = RealMatrix(frames, n1);
  map.slope = RealMatrix(frames, n1);

  for (size_t f = 0; f < frames; ++f) {
    for (size_t b1 = 0; b1 < n1; ++b1) {
      double best = 0.0;
      bool found = false;
      size_t best_c = 0;
      for (size_t c = 0; c < n_ch; ++c) {
        const ScatteringPath &p = coeffs.paths2[b1 * n_ch + c];
        if (!p.is_joint) {
          throw DataError("joint coefficient layout is inconsistent");
        }
        double v = coeffs.s2.at(f, b1 * n_ch + c);
        if (!found || v > best) {
          best = v;
          best_c = c;
          found = true;
        }
      }
      if (!found || best <= 0.0) continue;
      const ScatteringPath &p = coeffs.paths2[b1 * n_ch + best_c];
      map.alpha_star.at(f, b1) = p.alpha;
      map.value.at(f, b1) = best;
      if (p.beta_sign == 0) continue;
      double beta_signed = p.beta * static_cast<double>(p.beta_sign);
      map.beta_star.at(f, b1) = beta_signed;
      // Octaves per second of the dominant oriented wavelet, in nats.
      map.slope.at(f, b1) = -kLn2 * (p.alpha / (2.0 * kPi)) / beta_signed;
    }
  }
  return map;
}

std::string RidgeCsv(const RidgeMap &map, double frame_hop_seconds) {
  std::string out = "time,log_lambda1,alpha,beta,value,slope\n";
  char buf[160];
  for (size_t f = 0; f < map.frames; ++f) {
    for (size_t b = 0; b < map.log_lambda1.size(); ++b) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    static_cast<double>(f) * frame_hop_seconds,
                    map.log_lambda1[b], map.alpha_star.at(f, b),
                    map.beta_star.at(f, b), map.value.at(f, b),
                    map.slope.at(f, b));
      out += buf;
    }
  }
  return out;
}

}  // namespace sct
