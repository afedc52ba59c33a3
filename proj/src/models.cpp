// src/models.cpp

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

#include "sct/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace sct {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtLn2 = 0.8325546111576977;

// Mirror s into [0, d] with period 2 d.
double ReflectTime(double s, double d) {
  if (d <= 0.0) return 0.0;
  double p = std::fmod(s, 2.0 * d);
  if (p < 0.0) p += 2.0 * d;
  return p <= d ? p : 2.0 * d - p;
}

// Mirror index i into [0, n) without repeating the edge samples.
size_t ReflectIdx(long i, long n) {
  if (n == 1) return 0;
  long period = 2 * (n - 1);
  long p = i % period;
  if (p < 0) p += period;
  return static_cast<size_t>(p < n ? p : period - p);
}

size_t SampleCount(double duration, double sample_rate) {
  long n = std::lround(duration * sample_rate);
  return n < 1 ? 1 : static_cast<size_t>(n);
}

// Largest k with k step < limit.
int PartialsBelow(double limit, double step) {
  double r = limit / step * (1.0 - 1e-12);
  if (r < 1.0) return 0;
  return static_cast<int>(r);
}

void CheckTvModel(const HarmonicTvModel &m) {
  if (m.sample_rate <= 0.0 || m.duration <= 0.0) {
    throw ConfigError("model duration and sample rate must be positive");
  }
  if (m.xi <= 0.0) throw ConfigError("pitch must be positive");
  if (m.filter.width_hz <= 0.0) {
    throw ConfigError("formant width must be positive");
  }
  if (m.filter.formant_gain < 0.0 || m.filter.floor_gain < 0.0) {
    throw ConfigError("filter gains must be nonnegative");
  }
  if (m.n_partials < 0) throw ConfigError("partial count must be nonnegative");
}

void CheckFmModel(const FmModel &m, bool need_ddtheta) {
  if (m.sample_rate <= 0.0 || m.duration <= 0.0) {
    throw ConfigError("model duration and sample rate must be positive");
  }
  if (!m.theta || !m.dtheta) {
    throw ConfigError("phase and its derivative are required");
  }
  if (need_ddtheta && !m.ddtheta) {
    throw ConfigError("the second phase derivative is required");
  }
  if (m.n_partials < 1) throw ConfigError("at least one partial is required");
}

// The averaging window matching a low-pass of -3 dB width t_support:
// a unit-mass Gaussian with sigma_t = t_support / (2 sqrt(ln 2)).
struct TimeAverager {
  double sigma_w = 0.0;

  explicit TimeAverager(double t_support)
      : sigma_w(2.0 * kSqrtLn2 / t_support) {}

  double Weight(double t) const {
    return sigma_w / std::sqrt(2.0 * kPi) *
           std::exp(-0.5 * sigma_w * sigma_w * t * t);
  }
  double HalfWidth() const { return std::sqrt(80.0) / sigma_w; }
};

// v sampled with reflection at the signal edges, averaged around t.
template <typename F>
double SmoothedAt(const F &v, double t, double duration,
                  const TimeAverager &av, double ds) {
  long half = static_cast<long>(std::ceil(av.HalfWidth() / ds));
  double acc = 0.0;
  for (long j = -half; j <= half; ++j) {
    double s = t - static_cast<double>(j) * ds;
    acc += av.Weight(static_cast<double>(j) * ds) *
           v(ReflectTime(s, duration));
  }
  return acc * ds;
}

const AnalyticFilter &QuefFilterOf(const JointBank &jbank,
                                   const JointChannel &ch) {
  if (ch.beta_sign == 0) return jbank.quef_bank.lowpass;
  for (const AnalyticFilter &f : jbank.quef_bank.filters) {
    if (f.center == ch.beta) return f;
  }
  throw ConfigError("joint channel does not match its quefrency bank");
}

}  // namespace

double TvFilter::CenterHz(double t) const {
  double s = rate == 0.0 ? 0.5 : 1.0 / (1.0 + std::exp(-rate * (t - t_mid)));
  return f_start_hz + (f_end_hz - f_start_hz) * s;
}

double TvFilter::Eval(double t, double w) const {
  double sigma_w = 2.0 * kPi * width_hz;
  double d = w - 2.0 * kPi * CenterHz(t);
  return floor_gain + formant_gain * std::exp(-0.5 * d * d / (sigma_w * sigma_w));
}

FmModel ExponentialChirp(double f0_hz, double gamma, double duration,
                         double sample_rate, int n_partials) {
  if (f0_hz <= 0.0) throw ConfigError("start pitch must be positive");
  FmModel m;
  double w0 = 2.0 * kPi * f0_hz;
  if (gamma == 0.0) {
    m.theta = [w0](double t) { return w0 * t; };
    m.dtheta = [w0](double) { return w0; };
    m.ddtheta = [](double) { return 0.0; };
  } else {
    m.theta = [w0, gamma](double t) {
      return w0 / gamma * (std::exp(gamma * t) - 1.0);
    };
    m.dtheta = [w0, gamma](double t) { return w0 * std::exp(gamma * t); };
    m.ddtheta = [w0, gamma](double t) {
      return w0 * gamma * std::exp(gamma * t);
    };
  }
  m.duration = duration;
  m.sample_rate = sample_rate;
  m.n_partials = n_partials;
  return m;
}

FmModel ConstantPitch(double f0_hz, double duration, double sample_rate,
                      int n_partials) {
  return ExponentialChirp(f0_hz, 0.0, duration, sample_rate, n_partials);
}

Signal GenTvFiltered(const HarmonicTvModel &m, size_t *truncated) {
  CheckTvModel(m);
  size_t n = SampleCount(m.duration, m.sample_rate);
  int below = PartialsBelow(kPi * m.sample_rate, m.xi);
  int k_use = m.n_partials == 0 ? below : std::min(m.n_partials, below);
  if (truncated != nullptr) {
    *truncated = m.n_partials == 0
                     ? 0
                     : static_cast<size_t>(m.n_partials - k_use);
  }
  Signal out;
  out.sample_rate = m.sample_rate;
  out.samples.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / m.sample_rate;
    double acc = 0.0;
    for (int k = 1; k <= k_use; ++k) {
      double w = static_cast<double>(k) * m.xi;
      acc += m.filter.Eval(t, w) * std::cos(w * t);
    }
    out.samples[i] = acc;
  }
  return out;
}

Signal GenFm(const FmModel &m, size_t *truncated) {
  CheckFmModel(m, false);
  size_t n = SampleCount(m.duration, m.sample_rate);
  double max_dth = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = m.dtheta(static_cast<double>(i) / m.sample_rate);
    if (d <= 0.0) throw ConfigError("pitch must stay positive");
    max_dth = std::max(max_dth, d);
  }
  int k_use = std::min(m.n_partials, PartialsBelow(kPi * m.sample_rate, max_dth));
  if (truncated != nullptr) {
    *truncated = static_cast<size_t>(m.n_partials - k_use);
  }
  Signal out;
  out.sample_rate = m.sample_rate;
  out.samples.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double th = m.theta(static_cast<double>(i) / m.sample_rate);
    double acc = 0.0;
    for (int k = 1; k <= k_use; ++k) {
      acc += std::cos(static_cast<double>(k) * th);
    }
    out.samples[i] = acc;
  }
  return out;
}

Signal GenChirpTrain(double f_lo_hz, double f_hi_hz, double event_s,
                     double period_s, double duration_s, double sample_rate,
                     bool ascending) {
  if (f_lo_hz <= 0.0 || f_hi_hz <= 0.0) {
    throw ConfigError("chirp endpoints must be positive");
  }
  if (event_s <= 0.0 || period_s <= 0.0 || duration_s <= 0.0 ||
      sample_rate <= 0.0) {
    throw ConfigError("chirp train times must be positive");
  }
  size_t n = SampleCount(duration_s, sample_rate);
  // The event snaps to the sample grid so every repetition is computed
  // from the same local offsets.
  long ev = static_cast<long>(event_s * sample_rate * (1.0 + 1e-12));
  if (ev < 2) throw ConfigError("chirp event is shorter than two samples");
  double ev_s = static_cast<double>(ev) / sample_rate;
  double gamma = std::log(f_hi_hz / f_lo_hz) / ev_s;
  double w0 = 2.0 * kPi * f_lo_hz;
  Signal out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0);
  for (size_t event = 0;; ++event) {
    long n0 = std::lround(static_cast<double>(event) * period_s * sample_rate);
    if (n0 >= static_cast<long>(n)) break;
    for (long j = 0; j <= ev; ++j) {
      long idx = n0 + j;
      if (idx < 0 || idx >= static_cast<long>(n)) continue;
      double win =
          0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(j) /
                               static_cast<double>(ev));
      double tau = static_cast<double>(ascending ? j : ev - j) / sample_rate;
      double phase = gamma == 0.0
                         ? w0 * tau
                         : w0 / gamma * (std::exp(gamma * tau) - 1.0);
      out.samples[static_cast<size_t>(idx)] += win * std::cos(phase);
    }
  }
  return out;
}

std::vector<cplx> SampleTimeKernel(const AnalyticFilter &f, double dt,
                                   size_t half) {
  std::vector<cplx> out(2 * half + 1);
  double scale = f.amplitude * f.sigma / std::sqrt(2.0 * kPi) * dt;
  double sg = 0.0, so = 0.0;
  for (size_t j = 0; j < out.size(); ++j) {
    double t = (static_cast<double>(j) - static_cast<double>(half)) * dt;
    double g = std::exp(-0.5 * f.sigma * f.sigma * t * t);
    out[j] = scale * g * std::polar(1.0, f.center * t);
    sg += g;
    so += g * std::cos(f.center * t);
  }
  // The correction weight is defined by a vanishing zero-frequency
  // response; enforcing that on the sample grid keeps a wide envelope
  // filter from leaking the huge static part of the field through.
  double corr = f.dc_corr == 0.0 ? 0.0 : so / sg;
  for (size_t j = 0; j < out.size(); ++j) {
    double t = (static_cast<double>(j) - static_cast<double>(half)) * dt;
    out[j] -= scale * corr * std::exp(-0.5 * f.sigma * f.sigma * t * t);
  }
  return out;
}

std::vector<cplx> SampleQuefKernel(const AnalyticFilter &f, double du,
                                   size_t half, bool mirrored) {
  std::vector<cplx> out(2 * half + 1);
  double scale = f.amplitude * f.sigma * std::sqrt(2.0 * kPi) * du;
  double sg = 0.0, so = 0.0;
  for (size_t j = 0; j < out.size(); ++j) {
    double u = (static_cast<double>(j) - static_cast<double>(half)) * du;
    double g = std::exp(-2.0 * kPi * kPi * f.sigma * f.sigma * u * u);
    sg += g;
    so += g * std::cos(2.0 * kPi * f.center * u);
    cplx v = scale * g * std::polar(1.0, 2.0 * kPi * f.center * u);
    out[j] = mirrored ? std::conj(v) : v;
  }
  double corr = f.dc_corr == 0.0 ? 0.0 : so / sg;
  for (size_t j = 0; j < out.size(); ++j) {
    double u = (static_cast<double>(j) - static_cast<double>(half)) * du;
    out[j] -= scale * corr *
              std::exp(-2.0 * kPi * kPi * f.sigma * f.sigma * u * u);
  }
  return out;
}

TvS1Prediction PredictTvS1(const HarmonicTvModel &m, const FilterBank &bank,
                           size_t n_frames, double frame_hop) {
  CheckTvModel(m);
  if (n_frames == 0 || frame_hop <= 0.0) {
    throw ConfigError("prediction needs a frame grid");
  }
  if (bank.support <= 0.0 || bank.quefrency_axis) {
    throw ConfigError("prediction needs a signal-axis bank");
  }
  TvS1Prediction out;
  for (size_t b = 0; b < bank.filters.size(); ++b) {
    const AnalyticFilter &f = bank.filters[b];
    // One partial in the band: the filter must be narrower than the
    // partial spacing, and some partial must fall near its center.
    double width = f.shape == FilterShape::kGeometric
                       ? f.center / bank.bins_per_octave
                       : f.Bandwidth3db();
    long k = std::lround(f.center / m.xi);
    if (width >= m.xi || k < 1) {
      out.excluded.push_back(b);
    } else {
      out.bands.push_back(b);
    }
  }
  out.values = RealMatrix(n_frames, out.bands.size());
  TimeAverager av(bank.support);
  double ds = frame_hop / 8.0;
  for (size_t col = 0; col < out.bands.size(); ++col) {
    const AnalyticFilter &f = bank.filters[out.bands[col]];
    long k = std::lround(f.center / m.xi);
    double partial = static_cast<double>(k) * m.xi;
    // Real cosines put half of each partial's amplitude on the analytic
    // side, hence the 0.5.
    double gain = 0.5 * f.Eval(partial);
    auto h_mag = [&](double s) { return m.filter.Eval(s, f.center); };
    for (size_t fr = 0; fr < n_frames; ++fr) {
      double t = static_cast<double>(fr) * frame_hop;
      out.values.at(fr, col) = gain * SmoothedAt(h_mag, t, m.duration, av, ds);
    }
  }
  return out;
}

TvJointPrediction PredictTvJoint(const HarmonicTvModel &m,
                                 const FilterBank &bank1,
                                 const JointBank &jbank, double hop_seconds,
                                 size_t len, int oversampling,
                                 double beta_small) {
  CheckTvModel(m);
  if (len == 0 || hop_seconds <= 0.0 || oversampling < 0) {
    throw ConfigError("prediction needs a frame grid");
  }
  TvJointPrediction out;
  size_t nb = bank1.filters.size();
  if (nb < 2) throw ConfigError("prediction needs a band grid");
  size_t n_q = jbank.quef_bank.n_fft;
  if (n_q < NextPow2(2 * nb)) {
    throw ConfigError("quefrency bank transform length too short");
  }
  for (size_t b = 0; b < nb; ++b) out.bands.push_back(b);

  // Frequency-weighted transfer magnitude on the fine frame grid, bands
  // ascending in center so the quefrency axis points upward, extended
  // by reflection to the quefrency transform length the way the
  // transform pads its band axis.
  size_t left_q = (n_q - nb) / 2;
  std::vector<double> h(len * n_q);
  for (size_t i = 0; i < len; ++i) {
    double t = static_cast<double>(i) * hop_seconds;
    std::vector<double> row(nb);
    for (size_t r = 0; r < nb; ++r) {
      double w = bank1.filters[nb - 1 - r].center;
      row[r] = w * m.filter.Eval(t, w);
    }
    for (size_t j = 0; j < n_q; ++j) {
      long src = static_cast<long>(j) - static_cast<long>(left_q);
      h[i * n_q + j] = row[ReflectIdx(src, static_cast<long>(nb))];
    }
  }

  double du = 1.0 / static_cast<double>(bank1.bins_per_octave);
  double dt = hop_seconds;
  size_t sub = static_cast<size_t>(1) << oversampling;
  size_t out_frames = (len + sub - 1) / sub;
  TimeAverager av(jbank.env_bank.support);
  long sm_half = static_cast<long>(std::ceil(av.HalfWidth() / dt));

  std::vector<double> pre(len * nb);
  std::vector<cplx> g(len * nb);
  for (size_t ci = 0; ci < jbank.channels.size(); ++ci) {
    const JointChannel &ch = jbank.channels[ci];
    if (std::abs(ch.beta) > beta_small * (1.0 + 1e-9)) {
      out.excluded.push_back(ci);
      continue;
    }
    out.channels.push_back(ci);

    const AnalyticFilter &qf = QuefFilterOf(jbank, ch);
    const AnalyticFilter &tf = jbank.env_bank.filters[ch.time_index];
    size_t hq = static_cast<size_t>(
        std::ceil(std::sqrt(40.0) / (std::sqrt(2.0) * kPi * qf.sigma) / du));
    size_t ht = static_cast<size_t>(std::ceil(std::sqrt(80.0) / tf.sigma / dt));
    std::vector<cplx> kq = SampleQuefKernel(qf, du, hq, ch.beta_sign < 0);
    std::vector<cplx> kt = SampleTimeKernel(tf, dt, ht);
    if (ch.beta_sign != 0) {
      for (cplx &v : kq) v *= 1.0 / std::sqrt(2.0);
    }

    for (size_t i = 0; i < len; ++i) {
      for (size_t r = 0; r < nb; ++r) {
        cplx acc = 0.0;
        for (size_t v = 0; v < kq.size(); ++v) {
          long src = static_cast<long>(left_q + r) -
                     (static_cast<long>(v) - static_cast<long>(hq));
          src %= static_cast<long>(n_q);
          if (src < 0) src += static_cast<long>(n_q);
          acc += h[i * n_q + static_cast<size_t>(src)] * kq[v];
        }
        g[i * nb + r] = acc;
      }
    }
    for (size_t i = 0; i < len; ++i) {
      for (size_t r = 0; r < nb; ++r) {
        cplx acc = 0.0;
        for (size_t j = 0; j < kt.size(); ++j) {
          long src = static_cast<long>(i) - (static_cast<long>(j) -
                                             static_cast<long>(ht));
          acc += g[ReflectIdx(src, static_cast<long>(len)) * nb + r] * kt[j];
        }
        pre[i * nb + r] = std::abs(acc);
      }
    }

    RealMatrix values(out_frames, nb);
    for (size_t fo = 0; fo < out_frames; ++fo) {
      long center = static_cast<long>(fo * sub);
      for (size_t r = 0; r < nb; ++r) {
        double acc = 0.0;
        for (long j = -sm_half; j <= sm_half; ++j) {
          acc += av.Weight(static_cast<double>(j) * dt) *
                 pre[ReflectIdx(center - j, static_cast<long>(len)) * nb + r];
        }
        // Columns go back to descending center order, matching the
        // coefficient layout.
        values.at(fo, nb - 1 - r) = acc * dt;
      }
    }
    out.values.push_back(std::move(values));
  }
  return out;
}

FmPrediction PredictFm(const FmModel &m, const FilterBank &bank,
                       size_t n_frames, double frame_hop) {
  CheckFmModel(m, true);
  if (n_frames == 0 || frame_hop <= 0.0) {
    throw ConfigError("prediction needs a frame grid");
  }
  if (bank.support <= 0.0 || bank.quefrency_axis) {
    throw ConfigError("prediction needs a signal-axis bank");
  }
  size_t n = SampleCount(m.duration, m.sample_rate);
  double max_dth = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = m.dtheta(static_cast<double>(i) / m.sample_rate);
    if (d <= 0.0) throw ConfigError("pitch must stay positive");
    max_dth = std::max(max_dth, d);
  }
  FmPrediction out;
  for (size_t b = 0; b < bank.filters.size(); ++b) {
    const AnalyticFilter &f = bank.filters[b];
    double width = f.shape == FilterShape::kGeometric
                       ? f.center / bank.bins_per_octave
                       : f.Bandwidth3db();
    if (width >= max_dth) {
      out.excluded.push_back(b);
    } else {
      out.bands.push_back(b);
    }
  }
  out.s1 = RealMatrix(n_frames, out.bands.size());
  out.slope.resize(n_frames);
  TimeAverager av(bank.support);
  double ds = frame_hop / 8.0;
  for (size_t col = 0; col < out.bands.size(); ++col) {
    const AnalyticFilter &f = bank.filters[out.bands[col]];
    auto resp = [&](double s) {
      double dth = m.dtheta(s);
      long k = std::lround(f.center / dth);
      if (k < 0) k = 0;
      if (k > m.n_partials) k = m.n_partials;
      return f.Eval(static_cast<double>(k) * dth);
    };
    for (size_t fr = 0; fr < n_frames; ++fr) {
      double t = static_cast<double>(fr) * frame_hop;
      out.s1.at(fr, col) = 0.5 * SmoothedAt(resp, t, m.duration, av, ds);
    }
  }
  for (size_t fr = 0; fr < n_frames; ++fr) {
    double t = ReflectTime(static_cast<double>(fr) * frame_hop, m.duration);
    out.slope[fr] = m.ddtheta(t) / m.dtheta(t);
  }
  return out;
}

}  // namespace sct
