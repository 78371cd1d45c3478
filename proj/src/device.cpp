#include "memant/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memant/errors.hpp"

namespace memant::device {

namespace {

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive");
}

}  // namespace

DeviceState clamp_state(double x) noexcept { return {std::clamp(x, 0.0, 1.0)}; }

void LinearParams::validate() const {
  if (!(g_on > g_off && g_off > 0.0)) throw ArgumentError("linear device: need G_on > G_off > 0");
}

void DriftRelaxParams::validate() const {
  if (!(xi >= 0.0)) throw ArgumentError("drift-relax device: xi must be non-negative");
}

void ThresholdParams::validate() const {
  if (!(r_off > r_on && r_on > 0.0)) throw ArgumentError("threshold device: need R_off > R_on > 0");
  if (!(v_tn < 0.0 && v_tp > 0.0)) throw ArgumentError("threshold device: need V_tn < 0 < V_tp");
  if (!(beta_p > 0.0 && beta_n > 0.0)) throw ArgumentError("threshold device: betas must be positive");
}

double conductance(double x, const LinearParams& p) noexcept {
  return p.g_on * x + p.g_off * (1.0 - x);
}

double resistance(double x, const ThresholdParams& p) noexcept {
  return p.r_off * (1.0 - x) + p.r_on * x;
}

double state_for_resistance(double r, const ThresholdParams& p) noexcept {
  return (p.r_off - r) / (p.r_off - p.r_on);
}

double threshold_rate(double v, const ThresholdParams& p) noexcept {
  if (v > p.v_tp) return p.beta_p * (v - p.v_tp);
  if (v < p.v_tn) {
    return p.literal_negative_sign ? -p.beta_n * (v - p.v_tn) : p.beta_n * (v - p.v_tn);
  }
  return 0.0;
}

DeviceState step_threshold(DeviceState s, double v, double dt, const ThresholdParams& p) {
  require_dt(dt);
  const double rate = threshold_rate(v, p);
  if (rate == 0.0) return s;
  return clamp_state(s.x + rate * dt);
}

DeviceState step_drift_relax(DeviceState s, double current, double dt, const DriftRelaxParams& p) {
  require_dt(dt);
  return clamp_state(s.x + (p.k * current - p.xi * s.x) * dt);
}

DeviceState step_linear(DeviceState s, double current, double dt, const LinearParams& p) {
  require_dt(dt);
  return clamp_state(s.x + p.k * current * dt);
}

std::vector<TracePoint> iv_sweep(const ThresholdParams& p, std::span<const WaveformSample> wave,
                                 double x0, double dt_max) {
  require_dt(dt_max);
  for (std::size_t k = 1; k < wave.size(); ++k) {
    if (!(wave[k].t > wave[k - 1].t)) {
      throw ArgumentError("iv_sweep: waveform time must be strictly increasing (sample " +
                          std::to_string(k) + ")");
    }
  }
  std::vector<TracePoint> trace;
  trace.reserve(wave.size());
  DeviceState s = clamp_state(x0);
  auto record = [&](const WaveformSample& w) {
    trace.push_back({w.t, w.v, w.v / resistance(s.x, p), s.x});
  };
  if (wave.empty()) return trace;
  record(wave.front());
  for (std::size_t k = 1; k < wave.size(); ++k) {
    const WaveformSample a = wave[k - 1];
    const WaveformSample b = wave[k];
    const double span = b.t - a.t;
    const auto steps = static_cast<long>(std::ceil(span / dt_max - 1e-9));
    const double h = span / static_cast<double>(std::max(1L, steps));
    for (long n = 0; n < std::max(1L, steps); ++n) {
      const double frac = static_cast<double>(n) / static_cast<double>(std::max(1L, steps));
      s = step_threshold(s, a.v + (b.v - a.v) * frac, h, p);
    }
    record(b);
  }
  return trace;
}

std::vector<WaveformSample> triangular_sweep(double amplitude, double slew_rate, double sample_dt) {
  if (!(slew_rate > 0.0)) throw ArgumentError("triangular_sweep: slew rate must be positive");
  require_dt(sample_dt);
  const double a = std::abs(amplitude);
  const double quarter = a / slew_rate;
  const double period = 4.0 * quarter;
  std::vector<WaveformSample> wave;
  if (a == 0.0) {
    wave.push_back({0.0, 0.0});
    wave.push_back({sample_dt, 0.0});
    return wave;
  }
  const auto n = static_cast<long>(std::llround(period / sample_dt));
  wave.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = period * static_cast<double>(k) / static_cast<double>(n);
    double v;
    if (t <= quarter) v = slew_rate * t;
    else if (t <= 3.0 * quarter) v = a - slew_rate * (t - quarter);
    else v = -a + slew_rate * (t - 3.0 * quarter);
    wave.push_back({t, v});
  }
  // Pin the zero crossings exactly so the pinched-loop property is testable.
  wave.front().v = 0.0;
  wave.back().v = 0.0;
  if (n % 2 == 0) wave[static_cast<std::size_t>(n / 2)].v = 0.0;
  return wave;
}

}  // namespace memant::device
