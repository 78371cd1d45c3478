// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Reference values that can be derived are recomputed here
// by small independent oracles rather than read back from the library.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "memant/aco.hpp"
#include "memant/array_sim.hpp"
#include "memant/csv.hpp"
#include "memant/device.hpp"
#include "memant/dynamics.hpp"
#include "memant/errors.hpp"
#include "memant/imaging.hpp"

namespace fs = std::filesystem;
using namespace memant;

namespace {

int g_failed = 0;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void verdict(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s  [%2d] %s | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Self-avoiding walks of `steps` moves on the unbounded square lattice.
long count_walks(int steps) {
  std::set<std::pair<int, int>> seen{{0, 0}};
  std::function<long(int, int, int)> go = [&](int r, int c, int left) -> long {
    if (left == 0) return 1;
    long n = 0;
    const int dr[] = {0, 0, 1, -1}, dc[] = {1, -1, 0, 0};
    for (int k = 0; k < 4; ++k) {
      const std::pair<int, int> next{r + dr[k], c + dc[k]};
      if (!seen.insert(next).second) continue;
      n += go(next.first, next.second, left - 1);
      seen.erase(next);
    }
    return n;
  };
  return go(0, 0, steps);
}

// --- 1 -------------------------------------------------------------------------

void path_set_cardinality() {
  const Stopwatch sw;
  bool ok = true;
  std::string detail;
  const int n = 15;
  const Node mid{7, 7};
  for (int length = 1; length <= 5; ++length) {
    const auto count = static_cast<long>(aco::enumerate_paths(mid, length, aco::Pattern::full, n, n).paths.size());
    const long oracle = count_walks(length);
    const long bound = 4 * static_cast<long>(std::pow(3, length - 1));
    ok = ok && count == oracle && count <= bound;
    if (length == 1) ok = ok && count == 4;
    if (length == 2) ok = ok && count == 12;
    detail += "L" + std::to_string(length) + "=" + std::to_string(count) + "/" + std::to_string(oracle) + " ";
  }
  const double t = sw.seconds();
  ok = ok && t < 1.0;
  verdict(1, "path-set cardinality", ok, detail + "(library/oracle), " + fmt("%.3f s", t));
}

// --- 2 and 3 -----------------------------------------------------------------

Grid<double> worked_example_eta() {
  Grid<double> eta(9, 9, 1.0);
  for (int c = 6; c <= 8; ++c) eta(4, c) = 10.0;
  eta(7, 4) = 5.0;
  eta(8, 4) = 15.0;
  return eta;
}

void worked_example_lengths() {
  const Grid<double> eta = worked_example_eta();
  const aco::PathSet rays = aco::enumerate_paths({4, 4}, 4, aco::Pattern::hv_only, 9, 9);
  // Directions are enumerated right, left, down, up.
  const double expected[] = {1.3, 4.0, 2.2667, 4.0};
  const char* names[] = {"right", "left", "down", "up"};
  bool ok = rays.paths.size() == 4;
  std::string detail;
  for (std::size_t k = 0; ok && k < 4; ++k) {
    const double le = aco::path_length(aco::scored_nodes(rays.paths[k], false), eta, 0.01);
    ok = ok && std::abs(le - expected[k]) <= 1e-3;
    detail += std::string(names[k]) + "=" + fmt("%.5f", le) + " ";
  }
  verdict(2, "worked-example path lengths", ok, detail);
}

void two_path_probability() {
  auto probability = [](double le_right, double le_down) {
    Grid<double> eta(2, 2, 0.0);
    eta(0, 1) = 1.0 / le_right;
    eta(1, 0) = 1.0 / le_down;
    const aco::PathSet set = aco::enumerate_paths({0, 0}, 1, aco::Pattern::full, 2, 2);
    aco::AcoParams p;
    p.alpha = p.beta = 1.0;
    return aco::path_probabilities(set, Grid<double>(2, 2, 0.01), eta, p)[0];
  };
  const double rounded = probability(1.3, 2.266);
  const double oracle = (1 / 1.3) / (1 / 1.3 + 1 / 2.266);
  const double exact_geometry = probability(1.3, 2.0 + 0.2 + 1.0 / 15);
  const bool ok = std::abs(rounded - 0.6354) <= 1e-4 && std::abs(rounded - oracle) <= 1e-12;
  verdict(3, "two-path probability", ok,
          "p_right=" + fmt("%.6f", rounded) + " with lengths 1.3/2.266 (oracle " + fmt("%.6f", oracle) +
              "); unrounded down length gives " + fmt("%.6f", exact_geometry));
}

// --- 4 -------------------------------------------------------------------------

void fluid_correspondence() {
  using namespace dynamics;
  const Stopwatch sw;
  const Trajectory a = aco_fluid(reference_aco_pair(), 20.0, 1e-3);
  const double t_aco = sw.seconds();
  const Stopwatch sw2;
  const Trajectory m = memristive_fluid(reference_memristive_pair(), 2.0, 1e-4);
  const double t_mem = sw2.seconds();

  bool ok = t_aco < 1.0 && t_mem < 1.0;
  std::string detail;
  try {
    const WinnerReport w = compare_winner(a, m);
    const double aco_ratio = a.s2.back() / a.s1.back();
    ok = ok && w.first_winner == 1 && w.second_winner == 1 && aco_ratio <= 0.05 &&
         std::abs(m.s2.back() - 1.0) <= 0.1;
    detail = "winners " + std::to_string(w.first_winner.value_or(0)) + "/" +
             std::to_string(w.second_winner.value_or(0)) + ", aco loser/winner " + fmt("%.2e", aco_ratio) +
             ", memristive loser Gn " + fmt("%.4f", m.s2.back());
  } catch (const ConvergenceError& e) {
    ok = false;
    detail = e.what();
  }

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> le(0.5, 5.0);
  int agree = 0, trials = 0;
  while (trials < 100) {
    const double l1 = le(rng), l2 = le(rng);
    if (std::abs(l1 - l2) < 0.05 * std::max(l1, l2)) continue;
    ++trials;
    AcoFluidConfig ac;
    ac.le1 = l1;
    ac.le2 = l2;
    MemristiveFluidConfig mc;
    mc.g_off1 = 1 / l1;
    mc.g_off2 = 1 / l2;
    mc.g_on1 = 1000 * mc.g_off1;
    mc.g_on2 = 1000 * mc.g_off2;
    try {
      const WinnerReport w = compare_winner(aco_fluid(ac, 40.0, 1e-3), memristive_fluid(mc, 2.0, 1e-4));
      const int shorter = l1 < l2 ? 1 : 2;
      if (w.agree && w.first_winner == shorter) ++agree;
    } catch (const ConvergenceError&) {
    }
  }
  ok = ok && agree == 100;
  verdict(4, "fluid correspondence", ok,
          detail + ", " + fmt("%.3f", t_aco) + "+" + fmt("%.3f s", t_mem) + ", random pairs agreeing " +
              std::to_string(agree) + "/100");
}

// --- 5 -------------------------------------------------------------------------

double triangle_wave(double t, double a, double slew) {
  const double q = a / slew;
  if (t <= q) return slew * t;
  if (t <= 3 * q) return a - slew * (t - q);
  return -a + slew * (t - 3 * q);
}

// Forward Euler at a fixed step on the analytic waveform, threshold model as
// in the device table.
double fine_x(double a, double slew, double t_end, double dt, double x0 = 0.0) {
  const double v_tp = 80e-3, v_tn = -35e-3, bp = 19.6e3, bn = 17.5e3;
  double x = x0;
  const long steps = std::lround(t_end / dt);
  for (long k = 0; k < steps; ++k) {
    const double v = triangle_wave(static_cast<double>(k) * dt, a, slew);
    const double rate = v > v_tp ? bp * (v - v_tp) : (v < v_tn ? bn * (v - v_tn) : 0.0);
    x = std::clamp(x + rate * dt, 0.0, 1.0);
  }
  return x;
}

void device_model() {
  const device::ThresholdParams p;
  const double a = 0.2, slew = 1000.0, dt_max = 10e-9;
  const auto wave = device::triangular_sweep(a, slew, 1e-6);
  const auto trace = device::iv_sweep(p, wave, 0.0, dt_max);

  bool pinched = true;
  for (const auto& pt : trace) {
    if (pt.v == 0.0 && pt.i != 0.0) pinched = false;
  }

  std::vector<device::WaveformSample> dead;
  for (int k = 0; k <= 2000; ++k) {
    const double t = k * 1e-6;
    const double s = std::sin(2 * M_PI * t / 1e-3);
    dead.push_back({t, s > 0 ? 0.0799 * s : 0.0349 * s});
  }
  bool still = true;
  for (double x0 : {0.0, 0.42, 1.0}) {
    for (const auto& pt : device::iv_sweep(p, dead, x0, dt_max)) still = still && pt.x == x0;
  }

  const double period = 4 * a / slew;
  const double oracle_half = fine_x(a, slew, period / 2, dt_max / 1000);
  const double oracle_full = fine_x(a, slew, period, dt_max / 1000);
  const double err_half = std::abs(trace[wave.size() / 2].x - oracle_half);
  const double err_full = std::abs(trace.back().x - oracle_full);
  // A smaller sweep from mid-range ends away from both clamps.
  const auto small = device::triangular_sweep(0.1, slew, 1e-6);
  const double x_small = device::iv_sweep(p, small, 0.5, dt_max).back().x;
  const double err_small = std::abs(x_small - fine_x(0.1, slew, 4 * 0.1 / slew, dt_max / 1000, 0.5));
  const bool ok = pinched && still && err_half < 1e-3 && err_full < 1e-3 && err_small < 1e-3;
  verdict(5, "device model", ok,
          std::string("pinched ") + (pinched ? "yes" : "no") + ", dead zone still " + (still ? "yes" : "no") +
              ", |x - x_fine| half " + fmt("%.1e", err_half) + " full " + fmt("%.1e", err_full) +
              ", 0.1 V sweep from 0.5 " + fmt("%.1e", err_small) + " (x " + fmt("%.4f", x_small) + ")");
}

// --- 6 and 9 -------------------------------------------------------------------

double colony_f1(const imaging::GrayImage& img, const imaging::EdgeMask& truth, const aco::AcoParams& p,
                 imaging::EdgeMask* mask_out = nullptr) {
  const aco::AcoResult res = aco::run_aco(img, p);
  imaging::EdgeMask mask = aco::threshold_edges(res.snapshots.back().tau, {});
  const double f1 = imaging::score_f1(mask, truth).f1;
  if (mask_out) *mask_out = std::move(mask);
  return f1;
}

void colony_edges() {
  const Stopwatch sw;
  const int n = 32;
  const imaging::Scene sc = imaging::synth_shapes(n, n, imaging::default_scene(n, n));
  aco::AcoParams p = aco::edge_preset();
  const bool setting_ok = p.length == 4 && p.alpha == 1.0 && p.beta == 1.0 && p.rho == 0.001 &&
                          p.iterations <= 50;
  const double clean = colony_f1(sc.image, sc.truth, p);

  // A spike is isolated when no other spike lies within Chebyshev distance 2
  // and the nearest true edge pixel is at least 3 away.
  auto near_truth = [&](int r, int c) {
    for (int dr = -2; dr <= 2; ++dr) {
      for (int dc = -2; dc <= 2; ++dc) {
        const int rr = r + dr, cc = c + dc;
        if (rr >= 0 && cc >= 0 && rr < n && cc < n && sc.truth(rr, cc)) return true;
      }
    }
    return false;
  };
  double sum = 0.0, worst = 1.0;
  int below = 0, isolated = 0, survived = 0;
  const int seeds = 100;
  for (int seed = 1; seed <= seeds; ++seed) {
    p.seed = static_cast<std::uint64_t>(seed);
    const imaging::GrayImage noisy = imaging::add_spike_noise(sc.image, 0.1, p.seed);
    imaging::EdgeMask mask;
    const double f1 = colony_f1(noisy, sc.truth, p, &mask);
    sum += f1;
    worst = std::min(worst, f1);
    below += f1 < 0.85 ? 1 : 0;
    auto spike = [&](int r, int c) {
      return r >= 0 && c >= 0 && r < n && c < n && noisy(r, c) != sc.image(r, c);
    };
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!spike(r, c) || near_truth(r, c)) continue;
        bool alone = true;
        for (int dr = -2; dr <= 2 && alone; ++dr) {
          for (int dc = -2; dc <= 2 && alone; ++dc) {
            if ((dr || dc) && spike(r + dr, c + dc)) alone = false;
          }
        }
        if (!alone) continue;
        ++isolated;
        survived += mask(r, c) ? 1 : 0;
      }
    }
  }
  const double mean = sum / seeds;
  const double t = sw.seconds();
  const bool ok = setting_ok && clean >= 0.9 && mean >= 0.85 && survived == 0 && t < 30.0;
  verdict(6, "colony edge detection", ok,
          "clean F1 " + fmt("%.4f", clean) + "; 10% spikes over " + std::to_string(seeds) + " seeds: mean F1 " +
              fmt("%.4f", mean) + ", min " + fmt("%.4f", worst) + ", " + std::to_string(below) +
              " below 0.85, isolated spikes surviving " + std::to_string(survived) + "/" +
              std::to_string(isolated) + "; " + fmt("%.1f s", t));
}

void noise_robustness() {
  const int n = 32;
  const imaging::Scene sc = imaging::synth_shapes(n, n, imaging::default_scene(n, n));
  aco::AcoParams p = aco::edge_preset();
  p.seed = 7;
  const double clean = colony_f1(sc.image, sc.truth, p);
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    worst = std::min(worst, colony_f1(imaging::add_uniform_noise(sc.image, 0.3, seed), sc.truth, p));
  }
  const bool ok = worst >= 0.8 * clean;
  verdict(9, "noise robustness", ok,
          "clean F1 " + fmt("%.4f", clean) + ", worst F1 at 30% uniform noise over 10 seeds " + fmt("%.4f", worst) +
              " (needs >= " + fmt("%.4f", 0.8 * clean) + ")");
}

// --- 7 and 8 -------------------------------------------------------------------

void hardware() {
  using namespace array;
  const Stopwatch sw;
  const int n = 64;
  const imaging::Scene sc = imaging::synth_shapes(n, n, imaging::default_scene(n, n));
  const HardwareConfig config;
  const HardwareRun run = simulate_hardware(imaging::compute_heuristics(sc.image), config);
  const double t = sw.seconds();

  // Per-pixel band: 4 init pulses, 2L x iterations traversal pulses, one read
  // and one reset, each at the ends of its per-event range.
  const ReportedRanges rr;
  const double traversal_pulses = 2.0 * config.length * config.iterations;
  const double band_low = 4 * rr.init_pulse[0] + traversal_pulses * rr.traversal_pulse[0] + rr.read[0] + rr.reset[0];
  const double band_high = 4 * rr.init_pulse[1] + traversal_pulses * rr.traversal_pulse[1] + rr.read[1] + rr.reset[1];

  const EnergyReport& rep = run.report;
  const bool timing = run.traversal_time == from_seconds(60e-6) && run.traversal_time.count() == 60'000'000;
  const bool band = rep.per_pixel >= band_low && rep.per_pixel <= band_high && band_low <= 0.819e-9 &&
                    band_high >= 0.819e-9 && std::abs(rep.band_low - band_low) < 1e-15 &&
                    std::abs(rep.band_high - band_high) < 1e-15;
  const std::array<std::array<double, 2>, kStageCount> ranges{rr.init_pulse, rr.traversal_pulse, rr.read, rr.reset};
  bool stages = true;
  std::string stage_detail;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const double lo = rep.stage_min_per_pulse[s], hi = rep.stage_max_per_pulse[s];
    stages = stages && rep.stage_pulses[s] > 0 && lo >= ranges[s][0] && hi <= ranges[s][1];
    stage_detail += std::string(stage_name(static_cast<Stage>(s))) + " [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "] ";
  }
  verdict(7, "hardware timing and energy", timing && band && stages,
          "traversal " + std::to_string(run.traversal_time.count()) + " ps, per-pixel " +
              fmt("%.4g nJ", rep.per_pixel * 1e9) + " in [" + fmt("%.4g", band_low * 1e9) + ", " +
              fmt("%.4g", band_high * 1e9) + "] nJ, per pulse J: " + stage_detail);

  const double f_high = imaging::score_f1(aco::threshold_edges(run.final_resistance, {}), sc.truth).f1;
  const double f_low = imaging::score_f1(aco::threshold_edges_below(run.final_resistance, {}), sc.truth).f1;
  const double best = std::max(f_high, f_low);
  verdict(8, "hardware edge separability", best >= 0.8 && t < 120.0,
          "F1 edges-high " + fmt("%.4f", f_high) + ", edges-low " + fmt("%.4f", f_low) + ", " + fmt("%.1f s", t));
}

// --- 10 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  const auto bytes = io::read_file(p);
  return std::string(bytes.begin(), bytes.end());
}

std::string without_out_line(const std::string& manifest) {
  std::string out;
  std::size_t pos = 0;
  while (pos < manifest.size()) {
    const std::size_t nl = manifest.find('\n', pos);
    const std::string line = manifest.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos + 1);
    if (line.rfind("out=", 0) != 0) out += line;
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / ("memant_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cli = MEMANT_CLI_PATH;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"aco", "aco --snapshots 0,3 --seed 11"},
      {"aco_stochastic", "aco --mode stochastic --L 3 --iters 5 --seed 5"},
      {"hw", "hw --size 24 --snapshots 0,5"},
      {"twopath", "twopath --preset fig9"},
      {"device", "device --slew 1000"},
      {"noise", "noise --kind spike --levels 0,0.1 --seed 3"},
  };
  bool ok = true;
  int files = 0;
  std::string detail;
  for (const auto& [name, args] : runs) {
    const fs::path a = root / (name + "_a"), b = root / (name + "_b");
    const std::string first = "\"" + cli + "\" " + args + " --out \"" + a.string() + "\" > /dev/null 2>&1";
    const std::string again = "\"" + cli + "\" " + args.substr(0, args.find(' ')) + " --config \"" +
                              (a / "manifest.txt").string() + "\" --out \"" + b.string() + "\" > /dev/null 2>&1";
    if (std::system(first.c_str()) != 0 || std::system(again.c_str()) != 0) {
      ok = false;
      detail += name + ": command failed; ";
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      bool same = fs::exists(other);
      if (same) {
        std::string x = slurp(entry.path()), y = slurp(other);
        if (entry.path().filename() == "manifest.txt") {
          x = without_out_line(x);
          y = without_out_line(y);
        }
        same = x == y;
      }
      ++files;
      if (!same) {
        ok = false;
        detail += name + "/" + entry.path().filename().string() + " differs; ";
      }
    }
    const auto count = [](const fs::path& d) {
      return std::distance(fs::directory_iterator(d), fs::directory_iterator{});
    };
    if (count(a) != count(b)) {
      ok = false;
      detail += name + ": file sets differ; ";
    }
  }
  fs::remove_all(root);
  verdict(10, "determinism from manifest", ok,
          detail + std::to_string(files) + " files compared across " + std::to_string(runs.size()) + " commands");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{
      path_set_cardinality, worked_example_lengths, two_path_probability, fluid_correspondence, device_model,
      colony_edges,         hardware,               noise_robustness,     determinism};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("FAIL  unexpected exception: %s\n", e.what());
      ++g_failed;
    }
  }
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
