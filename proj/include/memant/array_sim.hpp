#pragma once

// Behavioral simulator of the memristive pixel array.
//
// Every pixel holds one threshold memristor behind switches of on-resistance
// R_ds. A run is: time-encoded initialization from the heuristic map, a
// number of traversal iterations (2L phases of disjoint pixel groups, each
// group pulsed by a shared current source), a non-destructive read and a
// reverse-polarity reset. Device physics is integrated with explicit Euler
// sub-steps; energy is booked per stage in an EnergyLedger.

#include <array>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "memant/aco.hpp"
#include "memant/device.hpp"
#include "memant/grid.hpp"
#include "memant/imaging.hpp"

namespace memant::array {

/// Simulated time, integer picoseconds.
using SimTime = std::chrono::duration<std::int64_t, std::pico>;

constexpr SimTime from_seconds(double s) {
  return SimTime(static_cast<std::int64_t>(s * 1e12 + (s >= 0 ? 0.5 : -0.5)));
}
constexpr double to_seconds(SimTime t) { return static_cast<double>(t.count()) * 1e-12; }

struct ArrayState {
  Grid<device::DeviceState> cells;
  device::ThresholdParams device;
  double r_ds = 1e3;  ///< switch on-resistance, ohm
  SimTime clock{0};

  ArrayState() = default;
  ArrayState(int width, int height, device::ThresholdParams params = {}, double r_ds = 1e3);

  int width() const noexcept { return cells.width(); }
  int height() const noexcept { return cells.height(); }
  Grid<double> resistance_map() const;
};

// --- energy ---------------------------------------------------------------

enum class Stage : std::size_t { init = 0, traversal, read, reset };
inline constexpr std::size_t kStageCount = 4;
const char* stage_name(Stage s) noexcept;

/// Per-stage accumulators. Each recorded event carries its energy and the
/// number of per-pixel pulses it stands for, so per-pulse extremes can be
/// checked against reported ranges.
class EnergyLedger {
 public:
  struct Account {
    double joules = 0.0;
    std::uint64_t pulses = 0;
    std::uint64_t events = 0;
    double min_per_pulse = 0.0;
    double max_per_pulse = 0.0;
  };

  void record(Stage stage, double joules, std::uint64_t pulses = 1);
  void merge(const EnergyLedger& other);

  const Account& account(Stage s) const noexcept { return accounts_[static_cast<std::size_t>(s)]; }
  double total() const noexcept;

 private:
  std::array<Account, kStageCount> accounts_{};
};

// --- initialization ---------------------------------------------------------

enum class Encoding {
  inverse,  ///< no contrast -> lowest resistance (G_ini proportional to 1/eta)
  direct,   ///< endpoints swapped
};

struct InitParams {
  double v_dd = 1.05;
  SimTime pulse = from_seconds(2e-6);
  int pulses_per_direction = 2;
  double r_band_low = 12.5e3;
  double r_band_high = 150e3;
  double dt_max = 10e-9;
  Encoding encoding = Encoding::inverse;
  /// Longest drive the calibration search may ask for, in pulse budgets.
  double max_budget_multiple = 1e3;

  SimTime budget() const noexcept { return pulse * (2 * pulses_per_direction); }
  void validate(const device::ThresholdParams& dev) const;
};

/// Drive times from the reset state that land exactly on the band ends.
struct InitCalibration {
  double t_low_r = 0.0;   ///< s, reaches r_band_low
  double t_high_r = 0.0;  ///< s, reaches r_band_high
  double gain = 0.0;      ///< t_low_r / pulse budget
};

/// Bisection on a single device driven at V_dd through one switch. Throws
/// CalibrationError when the band cannot be reached.
InitCalibration calibrate_init(const InitParams& params, const device::ThresholdParams& dev,
                               double r_ds);

/// Drive time for heuristic value eta under the chosen encoding.
double programming_time(double eta, const InitCalibration& cal, Encoding encoding) noexcept;

/// Result of driving one device at a fixed supply through its switch.
struct DriveResult {
  device::DeviceState state;
  double energy = 0.0;  ///< J drawn from the supply
};

/// Explicit-Euler drive of one device in series with r_ds for `duration`.
DriveResult drive_device(device::DeviceState s, double v_supply, double duration, double r_ds,
                         const device::ThresholdParams& dev, double dt_max);

/// Requires every device at x = 0. Advances the clock by the pulse budget.
void init_array(ArrayState& state, const imaging::HeuristicMap& eta, const InitParams& params,
                EnergyLedger& ledger, aco::Execution exec = aco::Execution::parallel);

// --- traversal --------------------------------------------------------------

enum class Orientation { horizontal, vertical };

struct PixelGroup {
  std::vector<Node> nodes;
};

struct Phase {
  Orientation orientation = Orientation::horizontal;
  int offset = 0;  ///< group starts are congruent to this modulo L
  std::vector<PixelGroup> groups;
};

struct PhasePlan {
  int length = 0;
  std::vector<Phase> phases;  ///< L horizontal phases, then L vertical
};

/// Throws ArgumentError for L < 2 or a pattern other than hv_only.
PhasePlan plan_phases(int width, int height, int length, aco::Pattern pattern = aco::Pattern::hv_only);

enum class Topology {
  symmetric,  ///< each member behind its own switch
  chained,    ///< shared switches; member k sits |k - center| switches from the source
};

struct PulseParams {
  double i_update = 6e-6;
  SimTime t_pulse = from_seconds(1e-6);
  double dt_max = 10e-9;
  Topology topology = Topology::symmetric;
  /// State-independent energy per pixel per update pulse (current source
  /// bias and switch drivers), booked on top of the device-side energy.
  double periphery_energy = 9e-12;

  void validate() const;
};

/// Single-node solve for one group: the current source feeds parallel
/// branches of (memristor + series switch resistance).
struct NodeSolution {
  double v_node = 0.0;
  std::vector<double> v_device;
  std::vector<double> current;
};

NodeSolution solve_group(std::span<const double> r_device, std::span<const double> r_series,
                         double i_source);

/// Series switch resistance seen by each member under a topology.
std::vector<double> series_resistance(std::size_t members, double r_ds, Topology topology);

/// Pulses one group for t_pulse. Returns the device-side energy
/// (integral of V_node I_update dt). Throws ArgumentError for an empty group.
double apply_pulse(ArrayState& state, const PixelGroup& group, const PulseParams& pulse);

struct ResistanceSnapshot {
  int phases_done = 0;
  SimTime clock{0};
  Grid<double> resistance;
};

/// Runs iterations x 2L phases. Groups of a phase are independent; phases
/// are sequential. Snapshots are taken when the completed phase count is in
/// `snapshot_phases`.
std::vector<ResistanceSnapshot> run_traversal(ArrayState& state, const PhasePlan& plan,
                                              int iterations, const PulseParams& pulse,
                                              EnergyLedger& ledger,
                                              std::span<const int> snapshot_phases = {},
                                              aco::Execution exec = aco::Execution::parallel);

/// One phase: every group pulsed once. Per-group device energies are
/// returned in group order.
std::vector<double> apply_phase(ArrayState& state, const Phase& phase, const PulseParams& pulse,
                                aco::Execution exec);

// --- read-out and reset -----------------------------------------------------

struct ReadParams {
  double v_device = 50e-3;  ///< voltage the read transistor leaves across the device
  SimTime duration = from_seconds(5e-9);
  double periphery_energy = 4.5e-15;  ///< per pixel read (bit-line and sensing)
};

/// Row-by-row read: the clock advances by duration per row. Throws
/// ConfigError if the read voltage leaves the dead zone.
Grid<double> readout(ArrayState& state, const ReadParams& params, EnergyLedger& ledger);

struct ResetParams {
  double v_reset = 1.05;  ///< magnitude; applied with negative polarity
  SimTime duration = from_seconds(132e-6);
  double dt_max = 10e-9;
};

/// Throws ConfigError when beta_n |V - V_tn| duration < 1 or any device is
/// left above x = 0; the state is untouched in that case.
void reset_array(ArrayState& state, const ResetParams& params, EnergyLedger& ledger,
                 aco::Execution exec = aco::Execution::parallel);

// --- report -----------------------------------------------------------------

/// Per-event energy ranges reported for the fabricated design.
struct ReportedRanges {
  std::array<double, 2> init_pulse{6e-12, 132e-12};
  std::array<double, 2> traversal_pulse{9e-12, 15e-12};
  std::array<double, 2> read{4.5e-15, 75e-15};
  std::array<double, 2> reset{205e-12, 400e-12};
  double per_pixel_energy = 0.819e-9;
  double area_um2 = 37.22;
};

struct EnergyReport {
  std::array<double, kStageCount> stage_joules{};
  std::array<std::uint64_t, kStageCount> stage_pulses{};
  std::array<double, kStageCount> stage_min_per_pulse{};
  std::array<double, kStageCount> stage_max_per_pulse{};
  double total = 0.0;
  double per_pixel = 0.0;
  double band_low = 0.0;   ///< analytic per-pixel band from the reported ranges
  double band_high = 0.0;
};

/// init_pulses per pixel, traversal pulses per pixel = iterations x 2L.
EnergyReport energy_report(const EnergyLedger& ledger, std::size_t pixels, int init_pulses,
                           int iterations, int length, const ReportedRanges& ranges = {});

std::string format_report(const EnergyReport& report, const ReportedRanges& ranges = {});

// --- full pipeline ----------------------------------------------------------

struct HardwareConfig {
  device::ThresholdParams device;
  double r_ds = 1e3;
  InitParams init;
  int length = 3;
  int iterations = 10;
  PulseParams pulse;
  ReadParams read;
  ResetParams reset;
  std::vector<int> snapshot_iterations;  ///< iterations at which to capture R
};

struct HardwareRun {
  InitCalibration calibration;
  Grid<double> initial_resistance;
  std::vector<ResistanceSnapshot> snapshots;
  Grid<double> final_resistance;
  SimTime traversal_time{0};
  SimTime total_time{0};
  EnergyLedger ledger;
  EnergyReport report;
};

HardwareRun simulate_hardware(const imaging::HeuristicMap& eta, const HardwareConfig& config,
                              aco::Execution exec = aco::Execution::parallel);

}  // namespace memant::array
