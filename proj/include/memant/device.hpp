#pragma once

// Memristor models. All three share a dimensionless internal state x that is
// hard-clamped to [0, 1]:
//   linear drift        G(x) = G_on x + G_off (1 - x),  dx/dt = K I
//   drift + relaxation  dx/dt = K I - xi x
//   threshold (voltage) dx/dt = f(V_m),  R(x) = R_off (1 - x) + R_on x
// Integration is explicit Euler.

#include <span>
#include <vector>

namespace memant::device {

struct DeviceState {
  double x = 0.0;
};

DeviceState clamp_state(double x) noexcept;

struct LinearParams {
  double g_on = 1e-3;   // S
  double g_off = 1e-6;  // S
  double k = 1.0;       // 1/(A s)

  void validate() const;
};

struct DriftRelaxParams {
  double k = 1.0;   // 1/(A s)
  double xi = 0.0;  // 1/s

  void validate() const;
};

/// Defaults are the fitted silver atomic-switch device.
struct ThresholdParams {
  double r_off = 1e6;     // ohm
  double r_on = 400.0;    // ohm
  double v_tp = 80e-3;    // V
  double v_tn = -35e-3;   // V
  double beta_p = 19.6e3; // 1/(V s)
  double beta_n = 17.5e3; // 1/(V s)
  /// Use the negative branch exactly as printed, -beta_n (V - V_tn), which
  /// drives x upward for both polarities. Off by default so that negative
  /// voltages RESET the device.
  bool literal_negative_sign = false;

  void validate() const;
};

double conductance(double x, const LinearParams& p) noexcept;
double resistance(double x, const ThresholdParams& p) noexcept;

/// Inverse of resistance(): the state giving resistance r (unclamped).
double state_for_resistance(double r, const ThresholdParams& p) noexcept;

/// dx/dt of the threshold model at device voltage v.
double threshold_rate(double v, const ThresholdParams& p) noexcept;

DeviceState step_threshold(DeviceState s, double v, double dt, const ThresholdParams& p);
DeviceState step_drift_relax(DeviceState s, double current, double dt, const DriftRelaxParams& p);
DeviceState step_linear(DeviceState s, double current, double dt, const LinearParams& p);

struct WaveformSample {
  double t = 0.0;  // s
  double v = 0.0;  // V
};

struct TracePoint {
  double t = 0.0;
  double v = 0.0;
  double i = 0.0;
  double x = 0.0;
};

/// Drives the threshold model along a piecewise-linear voltage waveform,
/// sub-stepping so no Euler step exceeds dt_max. One trace point per
/// waveform sample, with I = V / R(x). Throws ArgumentError if time is not
/// strictly increasing.
std::vector<TracePoint> iv_sweep(const ThresholdParams& p, std::span<const WaveformSample> wave,
                                 double x0, double dt_max = 10e-9);

/// 0 -> +amplitude -> -amplitude -> 0 at a constant slew rate (V/s),
/// sampled every sample_dt.
std::vector<WaveformSample> triangular_sweep(double amplitude, double slew_rate, double sample_dt);

}  // namespace memant::device
