#include "memant/array_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "memant/errors.hpp"

namespace memant::array {

using device::DeviceState;
using device::ThresholdParams;

namespace {

long substeps(double duration, double dt_max) {
  return std::max(1L, static_cast<long>(std::ceil(duration / dt_max - 1e-9)));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(what) + " must be positive");
}

}  // namespace

ArrayState::ArrayState(int width, int height, ThresholdParams params, double r_ds_)
    : cells(width, height, DeviceState{0.0}), device(params), r_ds(r_ds_) {
  device.validate();
  if (!(r_ds >= 0.0)) throw ArgumentError("R_ds must be non-negative");
}

Grid<double> ArrayState::resistance_map() const {
  Grid<double> r(width(), height(), 0.0);
  auto src = cells.values();
  auto dst = r.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = device::resistance(src[k].x, device);
  return r;
}

// --- energy -----------------------------------------------------------------

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::init: return "init";
    case Stage::traversal: return "traversal";
    case Stage::read: return "read";
    case Stage::reset: return "reset";
  }
  return "?";
}

void EnergyLedger::record(Stage stage, double joules, std::uint64_t pulses) {
  if (!(joules >= 0.0) || !std::isfinite(joules)) {
    throw ArgumentError("energy ledger: event energy must be finite and non-negative");
  }
  if (pulses == 0) throw ArgumentError("energy ledger: an event stands for at least one pulse");
  Account& a = accounts_[static_cast<std::size_t>(stage)];
  const double per = joules / static_cast<double>(pulses);
  if (a.events == 0) {
    a.min_per_pulse = per;
    a.max_per_pulse = per;
  } else {
    a.min_per_pulse = std::min(a.min_per_pulse, per);
    a.max_per_pulse = std::max(a.max_per_pulse, per);
  }
  a.joules += joules;
  a.pulses += pulses;
  a.events += 1;
}

void EnergyLedger::merge(const EnergyLedger& other) {
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const Account& b = other.accounts_[s];
    if (b.events == 0) continue;
    Account& a = accounts_[s];
    if (a.events == 0) {
      a.min_per_pulse = b.min_per_pulse;
      a.max_per_pulse = b.max_per_pulse;
    } else {
      a.min_per_pulse = std::min(a.min_per_pulse, b.min_per_pulse);
      a.max_per_pulse = std::max(a.max_per_pulse, b.max_per_pulse);
    }
    a.joules += b.joules;
    a.pulses += b.pulses;
    a.events += b.events;
  }
}

double EnergyLedger::total() const noexcept {
  double t = 0.0;
  for (const auto& a : accounts_) t += a.joules;
  return t;
}

// --- initialization ---------------------------------------------------------

void InitParams::validate(const ThresholdParams& dev) const {
  require_positive(v_dd, "init: V_dd");
  if (pulse <= SimTime::zero()) throw ArgumentError("init: pulse duration must be positive");
  if (pulses_per_direction < 1) throw ArgumentError("init: pulses per direction must be at least 1");
  require_positive(dt_max, "init: dt_max");
  if (!(r_band_low > dev.r_on && r_band_high > r_band_low && dev.r_off > r_band_high)) {
    throw ArgumentError("init: resistance band must satisfy R_on < low < high < R_off");
  }
  require_positive(max_budget_multiple, "init: calibration cap");
}

DriveResult drive_device(DeviceState s, double v_supply, double duration, double r_ds,
                         const ThresholdParams& dev, double dt_max) {
  DriveResult out{s, 0.0};
  if (duration <= 0.0) return out;
  const long n = substeps(duration, dt_max);
  const double h = duration / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    const double r = device::resistance(out.state.x, dev);
    const double i = v_supply / (r + r_ds);
    out.energy += std::abs(v_supply * i) * h;
    out.state = device::step_threshold(out.state, i * r, h, dev);
  }
  return out;
}

namespace {

// Smallest drive time from x = 0 that brings R down to `target`.
double time_to_reach(double target, double t_cap, const InitParams& p, const ThresholdParams& dev,
                     double r_ds) {
  auto r_after = [&](double t) {
    return device::resistance(drive_device({0.0}, p.v_dd, t, r_ds, dev, p.dt_max).state.x, dev);
  };
  if (r_after(t_cap) > target) {
    throw CalibrationError("init calibration: " + std::to_string(target) +
                           " ohm not reached within " + std::to_string(t_cap) + " s at V_dd = " +
                           std::to_string(p.v_dd) + " V");
  }
  double lo = 0.0;
  double hi = t_cap;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (r_after(mid) > target) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace

InitCalibration calibrate_init(const InitParams& params, const ThresholdParams& dev, double r_ds) {
  dev.validate();
  params.validate(dev);
  const double v_low = params.v_dd * params.r_band_low / (params.r_band_low + r_ds);
  if (!(v_low > dev.v_tp)) {
    throw CalibrationError("init calibration: device voltage at the low band end (" +
                           std::to_string(v_low) + " V) does not exceed V_tp");
  }
  const double budget = to_seconds(params.budget());
  const double cap = budget * params.max_budget_multiple;
  InitCalibration cal;
  cal.t_high_r = time_to_reach(params.r_band_high, cap, params, dev, r_ds);
  cal.t_low_r = time_to_reach(params.r_band_low, cap, params, dev, r_ds);
  cal.gain = cal.t_low_r / budget;
  return cal;
}

double programming_time(double eta, const InitCalibration& cal, Encoding encoding) noexcept {
  const double e = std::clamp(eta, 0.0, 1.0);
  const double w = encoding == Encoding::inverse ? 1.0 - e : e;
  return cal.t_high_r + (cal.t_low_r - cal.t_high_r) * w;
}

void init_array(ArrayState& state, const imaging::HeuristicMap& eta, const InitParams& params,
                EnergyLedger& ledger, aco::Execution exec) {
  if (!state.cells.same_shape(eta)) throw ArgumentError("init_array: heuristic map shape mismatch");
  for (const auto& c : state.cells.values()) {
    if (c.x != 0.0) throw ArgumentError("init_array: every device must be reset (x = 0) first");
  }
  const InitCalibration cal = calibrate_init(params, state.device, state.r_ds);
  const auto n = static_cast<long>(state.cells.size());
  std::vector<double> energy(static_cast<std::size_t>(n), 0.0);
  auto cells = state.cells.values();
  auto etas = eta.values();
  const ThresholdParams dev = state.device;
  const double r_ds = state.r_ds;
#pragma omp parallel for schedule(dynamic, 64) if (exec == aco::Execution::parallel)
  for (long k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double t_on = programming_time(etas[idx], cal, params.encoding);
    const DriveResult d = drive_device(cells[idx], params.v_dd, t_on, r_ds, dev, params.dt_max);
    cells[idx] = d.state;
    energy[idx] = d.energy;
  }
  const auto pulses = static_cast<std::uint64_t>(2 * params.pulses_per_direction);
  for (double e : energy) ledger.record(Stage::init, e, pulses);
  state.clock += params.budget();
}

// --- traversal --------------------------------------------------------------

PhasePlan plan_phases(int width, int height, int length, aco::Pattern pattern) {
  if (length < 2) throw ArgumentError("plan_phases: L must be at least 2, got " + std::to_string(length));
  if (pattern != aco::Pattern::hv_only) {
    throw ArgumentError("plan_phases: the array only realizes the hv-only pattern");
  }
  if (width <= 0 || height <= 0) throw ArgumentError("plan_phases: dimensions must be positive");
  PhasePlan plan;
  plan.length = length;
  for (int o = 0; o < 2; ++o) {
    const auto orient = o == 0 ? Orientation::horizontal : Orientation::vertical;
    const int along = orient == Orientation::horizontal ? width : height;
    const int across = orient == Orientation::horizontal ? height : width;
    for (int p = 0; p < length; ++p) {
      Phase ph;
      ph.orientation = orient;
      ph.offset = p;
      for (int line = 0; line < across; ++line) {
        for (int start = p; start < along; start += length) {
          const int span = std::min(length, along - start);
          if (span < 2) continue;
          PixelGroup g;
          g.nodes.reserve(static_cast<std::size_t>(span));
          for (int k = 0; k < span; ++k) {
            g.nodes.push_back(orient == Orientation::horizontal ? Node{line, start + k}
                                                                : Node{start + k, line});
          }
          ph.groups.push_back(std::move(g));
        }
      }
      plan.phases.push_back(std::move(ph));
    }
  }
  return plan;
}

void PulseParams::validate() const {
  require_positive(i_update, "pulse: I_update");
  if (t_pulse <= SimTime::zero()) throw ArgumentError("pulse: t_pulse must be positive");
  require_positive(dt_max, "pulse: dt_max");
  if (!(periphery_energy >= 0.0)) throw ArgumentError("pulse: periphery energy must be non-negative");
}

NodeSolution solve_group(std::span<const double> r_device, std::span<const double> r_series,
                         double i_source) {
  if (r_device.empty()) throw ArgumentError("solve_group: empty group");
  if (r_device.size() != r_series.size()) throw ArgumentError("solve_group: size mismatch");
  double g_total = 0.0;
  for (std::size_t b = 0; b < r_device.size(); ++b) g_total += 1.0 / (r_device[b] + r_series[b]);
  NodeSolution s;
  s.v_node = i_source / g_total;
  s.v_device.resize(r_device.size());
  s.current.resize(r_device.size());
  for (std::size_t b = 0; b < r_device.size(); ++b) {
    const double rb = r_device[b] + r_series[b];
    s.current[b] = s.v_node / rb;
    s.v_device[b] = s.v_node * r_device[b] / rb;
  }
  return s;
}

std::vector<double> series_resistance(std::size_t members, double r_ds, Topology topology) {
  std::vector<double> r(members, r_ds);
  if (topology == Topology::chained) {
    const double center = (static_cast<double>(members) - 1.0) / 2.0;
    for (std::size_t k = 0; k < members; ++k) {
      r[k] = std::abs(static_cast<double>(k) - center) * r_ds;
    }
  }
  return r;
}

double apply_pulse(ArrayState& state, const PixelGroup& group, const PulseParams& pulse) {
  if (group.nodes.empty()) throw ArgumentError("apply_pulse: empty group");
  const std::size_t m = group.nodes.size();
  const std::vector<double> series = series_resistance(m, state.r_ds, pulse.topology);
  std::vector<double> r(m);
  const double duration = to_seconds(pulse.t_pulse);
  const long n = substeps(duration, pulse.dt_max);
  const double h = duration / static_cast<double>(n);
  double energy = 0.0;
  for (long step = 0; step < n; ++step) {
    for (std::size_t b = 0; b < m; ++b) {
      r[b] = device::resistance(state.cells[group.nodes[b]].x, state.device);
    }
    const NodeSolution sol = solve_group(r, series, pulse.i_update);
    energy += sol.v_node * pulse.i_update * h;
    for (std::size_t b = 0; b < m; ++b) {
      DeviceState& cell = state.cells[group.nodes[b]];
      cell = device::step_threshold(cell, sol.v_device[b], h, state.device);
    }
  }
  return energy;
}

std::vector<double> apply_phase(ArrayState& state, const Phase& phase, const PulseParams& pulse,
                                aco::Execution exec) {
  const auto n = static_cast<long>(phase.groups.size());
  std::vector<double> energy(phase.groups.size(), 0.0);
#pragma omp parallel for schedule(static) if (exec == aco::Execution::parallel)
  for (long g = 0; g < n; ++g) {
    const auto idx = static_cast<std::size_t>(g);
    energy[idx] = apply_pulse(state, phase.groups[idx], pulse);
  }
  return energy;
}

std::vector<ResistanceSnapshot> run_traversal(ArrayState& state, const PhasePlan& plan,
                                              int iterations, const PulseParams& pulse,
                                              EnergyLedger& ledger,
                                              std::span<const int> snapshot_phases,
                                              aco::Execution exec) {
  if (iterations < 0) throw ArgumentError("run_traversal: iterations must be non-negative");
  pulse.validate();
  std::vector<ResistanceSnapshot> snaps;
  auto wanted = [&](int done) {
    return std::find(snapshot_phases.begin(), snapshot_phases.end(), done) != snapshot_phases.end();
  };
  if (wanted(0)) snaps.push_back({0, state.clock, state.resistance_map()});
  int done = 0;
  for (int it = 0; it < iterations; ++it) {
    for (const Phase& phase : plan.phases) {
      const std::vector<double> e = apply_phase(state, phase, pulse, exec);
      for (std::size_t g = 0; g < e.size(); ++g) {
        const std::size_t members = phase.groups[g].nodes.size();
        ledger.record(Stage::traversal, e[g] + pulse.periphery_energy * static_cast<double>(members),
                      members);
      }
      state.clock += pulse.t_pulse;
      ++done;
      if (wanted(done)) snaps.push_back({done, state.clock, state.resistance_map()});
    }
  }
  return snaps;
}

// --- read-out and reset -----------------------------------------------------

Grid<double> readout(ArrayState& state, const ReadParams& params, EnergyLedger& ledger) {
  if (!(params.v_device > state.device.v_tn && params.v_device < state.device.v_tp)) {
    throw ConfigError("readout: device-side read voltage " + std::to_string(params.v_device) +
                      " V is outside the dead zone (" + std::to_string(state.device.v_tn) + ", " +
                      std::to_string(state.device.v_tp) + ")");
  }
  if (params.duration <= SimTime::zero()) throw ArgumentError("readout: duration must be positive");
  if (!(params.periphery_energy >= 0.0)) {
    throw ArgumentError("readout: periphery energy must be non-negative");
  }
  Grid<double> r = state.resistance_map();
  const double t = to_seconds(params.duration);
  for (double ohms : r.values()) {
    ledger.record(Stage::read, params.v_device * params.v_device / ohms * t + params.periphery_energy);
  }
  state.clock += params.duration * state.height();
  return r;
}

void reset_array(ArrayState& state, const ResetParams& params, EnergyLedger& ledger,
                 aco::Execution exec) {
  require_positive(params.v_reset, "reset: V_reset");
  require_positive(params.dt_max, "reset: dt_max");
  const ThresholdParams dev = state.device;
  const double duration = to_seconds(params.duration);
  const double v = -params.v_reset;
  if (!(v < dev.v_tn) || !(dev.beta_n * std::abs(v - dev.v_tn) * duration >= 1.0)) {
    throw ConfigError("reset: pulse of " + std::to_string(params.v_reset) + " V for " +
                      std::to_string(duration) + " s cannot bring x = 1 to x = 0");
  }
  Grid<DeviceState> next = state.cells;
  const auto n = static_cast<long>(next.size());
  std::vector<double> energy(next.size(), 0.0);
  auto cells = next.values();
  const double r_ds = state.r_ds;
#pragma omp parallel for schedule(dynamic, 64) if (exec == aco::Execution::parallel)
  for (long k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const DriveResult d = drive_device(cells[idx], v, duration, r_ds, dev, params.dt_max);
    cells[idx] = d.state;
    energy[idx] = d.energy;
  }
  for (const auto& c : next.values()) {
    if (c.x != 0.0) {
      throw ConfigError("reset: a device remained at x = " + std::to_string(c.x) + " after the pulse");
    }
  }
  state.cells = std::move(next);
  for (double e : energy) ledger.record(Stage::reset, e);
  state.clock += params.duration;
}

// --- report -----------------------------------------------------------------

EnergyReport energy_report(const EnergyLedger& ledger, std::size_t pixels, int init_pulses,
                           int iterations, int length, const ReportedRanges& ranges) {
  if (pixels == 0) throw ArgumentError("energy_report: pixel count must be positive");
  EnergyReport r;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const auto& a = ledger.account(static_cast<Stage>(s));
    r.stage_joules[s] = a.joules;
    r.stage_pulses[s] = a.pulses;
    r.stage_min_per_pulse[s] = a.min_per_pulse;
    r.stage_max_per_pulse[s] = a.max_per_pulse;
  }
  r.total = ledger.total();
  r.per_pixel = r.total / static_cast<double>(pixels);
  const double traversal_pulses = static_cast<double>(iterations) * 2.0 * length;
  r.band_low = init_pulses * ranges.init_pulse[0] + traversal_pulses * ranges.traversal_pulse[0] +
               ranges.read[0] + ranges.reset[0];
  r.band_high = init_pulses * ranges.init_pulse[1] + traversal_pulses * ranges.traversal_pulse[1] +
                ranges.read[1] + ranges.reset[1];
  return r;
}

std::string format_report(const EnergyReport& report, const ReportedRanges& ranges) {
  std::ostringstream os;
  char buf[160];
  os << "stage      pulses        joules           min/pulse        max/pulse\n";
  for (std::size_t s = 0; s < kStageCount; ++s) {
    if (report.stage_pulses[s] == 0) continue;
    std::snprintf(buf, sizeof buf, "%-10s %-13llu %-16.9g %-16.9g %-16.9g\n",
                  stage_name(static_cast<Stage>(s)),
                  static_cast<unsigned long long>(report.stage_pulses[s]), report.stage_joules[s],
                  report.stage_min_per_pulse[s], report.stage_max_per_pulse[s]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "total_joules %.9g\nper_pixel_joules %.9g\n", report.total,
                report.per_pixel);
  os << buf;
  std::snprintf(buf, sizeof buf, "ledger_band_joules [%.9g, %.9g]\n", report.band_low,
                report.band_high);
  os << buf;
  std::snprintf(buf, sizeof buf, "reported_per_pixel_joules %.9g\narea_um2 %.2f\n",
                ranges.per_pixel_energy, ranges.area_um2);
  os << buf;
  return os.str();
}

// --- pipeline ---------------------------------------------------------------

HardwareRun simulate_hardware(const imaging::HeuristicMap& eta, const HardwareConfig& config,
                              aco::Execution exec) {
  if (config.iterations < 0) throw ArgumentError("iterations must be non-negative");
  const PhasePlan plan = plan_phases(eta.width(), eta.height(), config.length);
  config.pulse.validate();

  HardwareRun run;
  ArrayState state(eta.width(), eta.height(), config.device, config.r_ds);
  run.calibration = calibrate_init(config.init, config.device, config.r_ds);
  init_array(state, eta, config.init, run.ledger, exec);
  run.initial_resistance = state.resistance_map();

  std::vector<int> phases;
  const int per_iter = 2 * config.length;
  for (int it : config.snapshot_iterations) {
    if (it < 0 || it > config.iterations) {
      throw ArgumentError("snapshot iteration " + std::to_string(it) + " outside [0, iterations]");
    }
    phases.push_back(it * per_iter);
  }
  const SimTime before = state.clock;
  run.snapshots = run_traversal(state, plan, config.iterations, config.pulse, run.ledger, phases, exec);
  run.traversal_time = state.clock - before;

  run.final_resistance = readout(state, config.read, run.ledger);
  reset_array(state, config.reset, run.ledger, exec);
  run.total_time = state.clock;
  run.report = energy_report(run.ledger, eta.size(), 2 * config.init.pulses_per_direction,
                             config.iterations, config.length);
  return run;
}

}  // namespace memant::array
