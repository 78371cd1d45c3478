// memant: command-line experiments for the edge-detection colony, the
// memristive array simulator, the two-path fluid models and the device model.
//
// Every subcommand accepts --config FILE (key=value lines, # comments). Keys
// are the long flag names; flags given on the command line win. Each run
// writes manifest.txt into its output directory holding the resolved
// configuration, so `memant <cmd> --config out/manifest.txt --out other`
// reproduces the outputs.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
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

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kCalibration = 4, kConvergence = 5 };

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct ConfigEntry {
  std::string key;
  std::string value;
};

std::vector<ConfigEntry> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::vector<ConfigEntry> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    out.push_back({trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1))});
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    int v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      throw ArgumentError(key + ": '" + item + "' is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      throw ArgumentError(key + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

/// Binds options to variables and remembers how to print each resolved
/// value into the manifest.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    if constexpr (std::is_same_v<T, double>) {
      printers_.push_back({key, [&var] { return io::format_double(var); }});
    } else if constexpr (std::is_same_v<T, std::string>) {
      printers_.push_back({key, [&var] { return var; }});
    } else {
      printers_.push_back({key, [&var] { return std::to_string(var); }});
    }
    return app_->add_option("--" + key, var, help);
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    printers_.push_back({key, [&var] { return std::string(var ? "true" : "false"); }});
    return app_->add_flag("--" + key, var, help);
  }

  CLI::Option* choice(const std::string& key, std::string& var, std::vector<std::string> allowed,
                      const std::string& help) {
    return add(key, var, help)->check(CLI::IsMember(std::move(allowed)));
  }

  std::string manifest() const {
    std::string out = "command=" + app_->get_name() + "\n";
    for (const auto& [key, print] : printers_) out += key + "=" + print() + "\n";
    return out;
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> printers_;
};

// --- shared option groups ---------------------------------------------------

struct SceneOptions {
  std::string image;
  std::string truth;
  int size = 32;

  void bind(Options& o) {
    o.add("image", image, "input PGM; empty renders the synthetic two-region scene");
    o.add("truth", truth, "reference edge mask PGM (nonzero = edge) for a given image");
    o.add("size", size, "side of the synthetic scene")->check(CLI::Range(4, 4096));
  }

  /// Loaded image and, when available, its ground-truth mask.
  std::pair<imaging::GrayImage, std::optional<imaging::EdgeMask>> load() const {
    if (image.empty()) {
      imaging::Scene sc = imaging::synth_shapes(size, size, imaging::default_scene(size, size));
      return {std::move(sc.image), std::move(sc.truth)};
    }
    const auto bytes = io::read_file(image);
    imaging::GrayImage img = imaging::load_pgm(bytes);
    if (truth.empty()) return {std::move(img), std::nullopt};
    const imaging::GrayImage t = imaging::load_pgm(io::read_file(truth));
    if (!t.same_shape(img)) throw ArgumentError("truth: mask shape differs from the image");
    imaging::EdgeMask mask(t.width(), t.height(), 0);
    for (std::size_t k = 0; k < t.size(); ++k) mask.values()[k] = t.values()[k] ? 1 : 0;
    return {std::move(img), std::move(mask)};
  }
};

aco::Threshold parse_threshold(const std::string& text) {
  if (text == "otsu") return {};
  const auto v = parse_double_list("threshold", text);
  if (v.size() != 1) throw ArgumentError("threshold: expected 'otsu' or a number");
  return {aco::Threshold::Method::fixed, v[0]};
}

struct AcoOptions {
  aco::AcoParams p = aco::edge_preset();
  std::string pattern = "full";
  std::string mode = "fluid";
  std::string evaporation = "on-update";
  std::string snapshots;
  std::string threshold = "otsu";

  void bind(Options& o) {
    o.add("L", p.length, "traversal length");
    o.add("alpha", p.alpha, "pheromone exponent");
    o.add("beta", p.beta, "heuristic exponent");
    o.add("rho", p.rho, "forget rate");
    o.add("q", p.q, "deposit constant");
    o.add("nu", p.nu, "deposit scale");
    o.add("tau0", p.tau0, "initial pheromone");
    o.add("iters", p.iterations, "colony iterations");
    o.add("eta-floor", p.eta_floor, "lower clamp of the heuristic inside path lengths");
    o.flag("include-origin", p.include_origin, "score the origin pixel with its walk");
    o.choice("pattern", pattern, {"full", "hv-only"}, "walk pattern");
    o.choice("mode", mode, {"stochastic", "fluid"}, "one sampled walk per ant, or expected-value updates");
    o.choice("evaporation", evaporation, {"on-update", "global"}, "where the forget rate is applied");
    o.add("snapshots", snapshots, "comma-separated iterations to save (final is always saved)");
    o.add("threshold", threshold, "'otsu' or a fixed pheromone level");
  }

  aco::AcoParams resolve(std::uint64_t seed) const {
    aco::AcoParams r = p;
    r.seed = seed;
    r.pattern = pattern == "full" ? aco::Pattern::full : aco::Pattern::hv_only;
    r.mode = mode == "fluid" ? aco::Mode::fluid : aco::Mode::stochastic;
    r.evaporation = evaporation == "global" ? aco::Evaporation::global : aco::Evaporation::on_update;
    r.snapshots = parse_int_list("snapshots", snapshots);
    r.snapshots.push_back(r.iterations);
    r.validate();
    if (r.pattern == aco::Pattern::hv_only && r.length > 4) {
      std::cerr << "warning: L = " << r.length
                << " with hv-only walks; straight walks longer than 4 have a blurring effect on the "
                   "detected edges\n";
    }
    return r;
  }
};

struct HwOptions {
  array::HardwareConfig c;
  double pulse_us = 1.0;
  std::string topology = "symmetric";
  std::string encoding = "inverse";
  std::string snapshots;
  std::string threshold = "otsu";
  bool invert = false;

  void bind(Options& o) {
    o.add("L", c.length, "group length");
    o.add("iters", c.iterations, "traversal iterations");
    o.add("i-update", c.pulse.i_update, "update current per group, A");
    o.add("pulse-us", pulse_us, "update pulse width, microseconds");
    o.add("r-ds", c.r_ds, "switch on-resistance, ohm");
    o.add("vdd", c.init.v_dd, "initialization supply, V");
    o.add("r-band-low", c.init.r_band_low, "initialized resistance for no contrast, ohm");
    o.add("r-band-high", c.init.r_band_high, "initialized resistance for full contrast, ohm");
    o.choice("topology", topology, {"symmetric", "chained"}, "switch arrangement inside a group");
    o.choice("encoding", encoding, {"inverse", "direct"}, "heuristic to resistance mapping");
    o.add("snapshots", snapshots, "comma-separated iterations whose resistance map is saved");
    o.add("threshold", threshold, "'otsu' or a fixed resistance, ohm");
    o.flag("invert", invert, "mark low-resistance pixels as edges");
  }

  array::HardwareConfig resolve() const {
    array::HardwareConfig r = c;
    r.pulse.t_pulse = array::from_seconds(pulse_us * 1e-6);
    r.pulse.topology = topology == "chained" ? array::Topology::chained : array::Topology::symmetric;
    r.init.encoding = encoding == "direct" ? array::Encoding::direct : array::Encoding::inverse;
    r.snapshot_iterations = parse_int_list("snapshots", snapshots);
    return r;
  }

  imaging::EdgeMask mask(const Grid<double>& resistance) const {
    const aco::Threshold t = parse_threshold(threshold);
    return invert ? aco::threshold_edges_below(resistance, t) : aco::threshold_edges(resistance, t);
  }
};

// --- output helpers ---------------------------------------------------------

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void text(const std::string& name, std::string_view body) const {
    io::write_file_atomic(dir_ / name, body);
  }
  void pgm(const std::string& name, const imaging::Bytes& bytes) const {
    io::write_file_atomic(dir_ / name, std::span<const unsigned char>(bytes.data(), bytes.size()));
  }

 private:
  fs::path dir_;
};

std::string grid_csv(const Grid<double>& g) {
  std::string out;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (c) out += ',';
      out += io::format_double(g(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string f1_text(const std::optional<imaging::F1Score>& s) {
  if (!s) return "n/a";
  return io::format_double(s->f1);
}

// --- commands -----------------------------------------------------------------

struct Common {
  std::string out;
  std::uint64_t seed = 7;
  std::string config;

  void bind(Options& o, CLI::App* app, const std::string& default_out) {
    out = default_out;
    o.add("out", out, "output directory");
    o.add("seed", seed, "random seed");
    app->add_option("--config", config, "key=value file; command-line flags take precedence");
  }
};

struct AcoCommand {
  Common common;
  SceneOptions scene;
  AcoOptions aco;

  int run(const Options& opts) const {
    const aco::AcoParams params = aco.resolve(common.seed);
    const auto [img, truth] = scene.load();
    const Output out(common.out);
    out.text("manifest.txt", opts.manifest());

    const aco::AcoResult res = aco::run_aco(img, params);
    const aco::Threshold threshold = parse_threshold(aco.threshold);
    out.pgm("input.pgm", imaging::save_pgm(img));
    out.pgm("eta.pgm", imaging::save_pgm(res.eta));
    if (truth) out.pgm("truth.pgm", imaging::save_pgm(*truth));

    io::CsvWriter trace({"iteration", "tau_min", "tau_max", "tau_mean", "edge_pixels", "f1"});
    std::optional<imaging::F1Score> final_score;
    for (const auto& snap : res.snapshots) {
      const auto v = snap.tau.values();
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      double sum = 0.0;
      for (double x : v) sum += x;
      const imaging::EdgeMask mask = aco::threshold_edges(snap.tau, threshold);
      std::size_t edges = 0;
      for (auto m : mask.values()) edges += m ? 1 : 0;
      std::optional<imaging::F1Score> score;
      if (truth) score = imaging::score_f1(mask, *truth);
      trace.row({std::to_string(snap.iteration), io::format_double(*lo), io::format_double(*hi),
                 io::format_double(sum / static_cast<double>(v.size())), std::to_string(edges),
                 f1_text(score)});
      out.pgm("tau_iter" + std::to_string(snap.iteration) + ".pgm", imaging::save_pgm(snap.tau));
      if (&snap == &res.snapshots.back()) {
        out.pgm("edges.pgm", imaging::save_pgm(mask));
        final_score = score;
      }
    }
    out.text("trace.csv", trace.text());
    std::cout << "iterations " << params.iterations << "\nf1 " << f1_text(final_score) << '\n';
    return kOk;
  }
};

struct HwCommand {
  Common common;
  SceneOptions scene{.image = {}, .truth = {}, .size = 64};
  HwOptions hw;

  int run(const Options& opts) const {
    const array::HardwareConfig config = hw.resolve();
    const auto [img, truth] = scene.load();
    const Output out(common.out);
    out.text("manifest.txt", opts.manifest());

    const array::HardwareRun run = array::simulate_hardware(imaging::compute_heuristics(img), config);
    const imaging::EdgeMask mask = hw.mask(run.final_resistance);
    out.pgm("r_init.pgm", imaging::save_pgm(run.initial_resistance));
    for (const auto& snap : run.snapshots) {
      const int it = snap.phases_done / (2 * config.length);
      out.pgm("r_iter" + std::to_string(it) + ".pgm", imaging::save_pgm(snap.resistance));
    }
    out.pgm("r_final.pgm", imaging::save_pgm(run.final_resistance));
    out.text("r_final.csv", grid_csv(run.final_resistance));
    out.pgm("edges.pgm", imaging::save_pgm(mask));
    if (truth) out.pgm("truth.pgm", imaging::save_pgm(*truth));

    std::optional<imaging::F1Score> score;
    if (truth) score = imaging::score_f1(mask, *truth);

    io::CsvWriter energy({"stage", "pulses", "joules"});
    for (std::size_t s = 0; s < array::kStageCount; ++s) {
      if (run.report.stage_pulses[s] == 0) continue;
      energy.row({array::stage_name(static_cast<array::Stage>(s)),
                  std::to_string(run.report.stage_pulses[s]),
                  io::format_double(run.report.stage_joules[s])});
    }
    out.text("energy.csv", energy.text());

    std::string report = array::format_report(run.report);
    report += "traversal_time_s " + io::format_double(array::to_seconds(run.traversal_time)) + "\n";
    report += "total_time_s " + io::format_double(array::to_seconds(run.total_time)) + "\n";
    report += "init_gain " + io::format_double(run.calibration.gain) + "\n";
    report += "f1 " + f1_text(score) + "\n";
    out.text("report.txt", report);
    std::cout << report;
    return kOk;
  }
};

struct TwoPathCommand {
  Common common;
  std::string preset = "auto";
  dynamics::AcoFluidConfig aco = dynamics::reference_aco_pair();
  dynamics::MemristiveFluidConfig mem = dynamics::reference_memristive_pair();
  double ratio = 1000.0;
  double t_aco = 20.0, dt_aco = 1e-3, t_mem = 2.0, dt_mem = 1e-4;
  bool reciprocal = false;
  CLI::Option* le1_opt = nullptr;
  CLI::Option* le2_opt = nullptr;

  void bind(Options& o) {
    o.choice("preset", preset, {"auto", "fig9", "custom"},
             "fig9: reference parameter sets; custom: conductances from --le1/--le2; auto: fig9 unless a "
             "length is given");
    le1_opt = o.add("le1", aco.le1, "length of path 1");
    le2_opt = o.add("le2", aco.le2, "length of path 2");
    o.add("ratio", ratio, "G_on / G_off of both branches in custom mode");
    o.add("gamma", aco.gamma, "ant arrival rate");
    o.add("rho", aco.rho, "forget rate");
    o.add("k", mem.k, "memristive drift constant");
    o.add("xi", mem.xi, "memristive relaxation rate");
    o.add("i0", mem.i0, "source current");
    o.add("t-aco", t_aco, "colony integration horizon");
    o.add("dt-aco", dt_aco, "colony step");
    o.add("t-mem", t_mem, "memristive integration horizon");
    o.add("dt-mem", dt_mem, "memristive step");
    o.flag("reciprocal", reciprocal, "fig9 with inverse-length conductances");
  }

  int run(const Options& opts) {
    if (preset == "auto") preset = (le1_opt->count() || le2_opt->count()) ? "custom" : "fig9";
    dynamics::AcoFluidConfig a = aco;
    dynamics::MemristiveFluidConfig m = mem;
    if (preset == "fig9") {
      const dynamics::MemristiveFluidConfig base = dynamics::reference_memristive_pair(reciprocal);
      m.g_off1 = base.g_off1;
      m.g_off2 = base.g_off2;
      m.g_on1 = base.g_on1;
      m.g_on2 = base.g_on2;
    } else {
      m.g_off1 = 1.0 / a.le1;
      m.g_off2 = 1.0 / a.le2;
      m.g_on1 = ratio * m.g_off1;
      m.g_on2 = ratio * m.g_off2;
    }
    const Output out(common.out);
    out.text("manifest.txt", opts.manifest());

    const dynamics::Trajectory ta = dynamics::aco_fluid(a, t_aco, dt_aco);
    const dynamics::Trajectory tm = dynamics::memristive_fluid(m, t_mem, dt_mem);
    auto csv = [](const dynamics::Trajectory& t, const char* s1, const char* s2) {
      io::CsvWriter w({"t", s1, s2});
      for (std::size_t k = 0; k < t.t.size(); ++k) {
        const double row[] = {t.t[k], t.s1[k], t.s2[k]};
        w.row(row);
      }
      return w.text();
    };
    out.text("aco.csv", csv(ta, "tau1", "tau2"));
    out.text("memristive.csv", csv(tm, "gn1", "gn2"));

    const dynamics::WinnerReport w = dynamics::compare_winner(ta, tm);
    auto name = [](const std::optional<int>& v) { return v ? "path " + std::to_string(*v) : std::string("tie"); };
    std::string report;
    report += "aco_winner " + name(w.first_winner) + "\n";
    report += "memristive_winner " + name(w.second_winner) + "\n";
    report += "agreement " + std::string(w.agree ? "true" : "false") + "\n";
    report += "aco_final " + io::format_double(ta.s1.back()) + " " + io::format_double(ta.s2.back()) + "\n";
    report += "memristive_final " + io::format_double(tm.s1.back()) + " " + io::format_double(tm.s2.back()) + "\n";
    report += "aco_loser_ratio " + io::format_double(w.first_ratio) + "\n";
    out.text("report.txt", report);
    std::cout << report;
    return kOk;
  }
};

struct DeviceCommand {
  Common common;
  device::ThresholdParams p;
  double amplitude = 0.2;
  double slew = 200.0;
  double sample_dt = 1e-6;
  double x0 = 0.0;
  double dt_max = 10e-9;

  void bind(Options& o) {
    o.add("amplitude", amplitude, "peak sweep voltage, V");
    o.add("slew", slew, "sweep slew rate, V/s");
    o.add("sample-dt", sample_dt, "waveform sample spacing, s");
    o.add("x0", x0, "initial state");
    o.add("dt-max", dt_max, "largest integration sub-step, s");
    o.add("v-tp", p.v_tp, "positive threshold, V");
    o.add("v-tn", p.v_tn, "negative threshold, V");
    o.add("beta-p", p.beta_p, "positive drift constant, 1/(V s)");
    o.add("beta-n", p.beta_n, "negative drift constant, 1/(V s)");
    o.add("r-on", p.r_on, "on resistance, ohm");
    o.add("r-off", p.r_off, "off resistance, ohm");
    o.flag("literal-sign", p.literal_negative_sign, "negative-branch rate with the sign as printed");
  }

  int run(const Options& opts) const {
    p.validate();
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw ArgumentError("x0 must lie in [0, 1]");
    const auto wave = device::triangular_sweep(amplitude, slew, sample_dt);
    const auto trace = device::iv_sweep(p, wave, x0, dt_max);
    const Output out(common.out);
    out.text("manifest.txt", opts.manifest());
    io::CsvWriter w({"t", "v", "i", "x"});
    for (const auto& pt : trace) {
      const double row[] = {pt.t, pt.v, pt.i, pt.x};
      w.row(row);
    }
    out.text("iv.csv", w.text());
    std::cout << "samples " << trace.size() << "\nfinal_x " << io::format_double(trace.back().x) << '\n';
    return kOk;
  }
};

struct NoiseCommand {
  Common common;
  SceneOptions scene;
  AcoOptions aco;
  HwOptions hw;
  std::string pipeline = "aco";
  std::string kind = "uniform";
  std::string levels = "0,0.1,0.2,0.3";

  void bind(Options& o) {
    o.choice("pipeline", pipeline, {"aco", "hw"}, "edge detector to evaluate");
    o.choice("kind", kind, {"uniform", "spike"}, "noise model");
    o.add("levels", levels, "comma-separated noise levels, ascending");
    o.flag("hw-invert", hw.invert, "hw pipeline: mark low-resistance pixels as edges");
    aco.bind(o);
  }

  int run(const Options& opts) const {
    const std::vector<double> lv = parse_double_list("levels", levels);
    if (lv.empty() || !std::is_sorted(lv.begin(), lv.end())) {
      throw ArgumentError("levels must be a non-empty ascending list");
    }
    const auto [img, truth] = scene.load();
    if (!truth) throw ArgumentError("truth: the noise sweep needs a reference mask");
    const aco::AcoParams params = aco.resolve(common.seed);
    const Output out(common.out);
    out.text("manifest.txt", opts.manifest());

    io::CsvWriter w({"level", "precision", "recall", "f1"});
    for (double level : lv) {
      const imaging::GrayImage noisy = kind == "uniform" ? imaging::add_uniform_noise(img, level, common.seed)
                                                         : imaging::add_spike_noise(img, level, common.seed);
      imaging::EdgeMask mask;
      if (pipeline == "aco") {
        const aco::AcoResult res = aco::run_aco(noisy, params);
        mask = aco::threshold_edges(res.snapshots.back().tau, parse_threshold(aco.threshold));
      } else {
        // The array runs with its own defaults; the colony options do not apply.
        const array::HardwareRun run = array::simulate_hardware(imaging::compute_heuristics(noisy), hw.resolve());
        mask = hw.mask(run.final_resistance);
      }
      const imaging::F1Score s = imaging::score_f1(mask, *truth);
      const double row[] = {level, s.precision, s.recall, s.f1};
      w.row(row);
      std::cout << "level " << io::format_double(level) << " f1 " << io::format_double(s.f1) << '\n';
    }
    out.text("noise.csv", w.text());
    return kOk;
  }
};

/// Splices config-file entries in front of the command-line flags so that
/// later (command-line) occurrences win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) return args;
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> out{args[0]};
  for (const auto& e : read_config(path)) {
    if (e.key == "command") {
      if (e.value != args[0]) {
        throw ConfigError("config file is for command '" + e.value + "', not '" + args[0] + "'");
      }
      continue;
    }
    if (e.value.empty()) continue;  // options that accept an empty value default to it
    out.push_back("--" + e.key + "=" + e.value);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ant-colony edge detection and memristive array experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  AcoCommand aco_cmd;
  CLI::App* aco_app = app.add_subcommand("aco", "run the edge-detection colony on an image");
  Options aco_opts(aco_app);
  aco_cmd.common.bind(aco_opts, aco_app, "out/aco");
  aco_cmd.scene.bind(aco_opts);
  aco_cmd.aco.bind(aco_opts);

  HwCommand hw_cmd;
  CLI::App* hw_app = app.add_subcommand("hw", "simulate the memristive pixel array");
  Options hw_opts(hw_app);
  hw_cmd.common.bind(hw_opts, hw_app, "out/hw");
  hw_cmd.scene.bind(hw_opts);
  hw_cmd.hw.bind(hw_opts);

  TwoPathCommand tp_cmd;
  CLI::App* tp_app = app.add_subcommand("twopath", "two-path colony and memristive fluid models");
  Options tp_opts(tp_app);
  tp_cmd.common.bind(tp_opts, tp_app, "out/twopath");
  tp_cmd.bind(tp_opts);

  DeviceCommand dev_cmd;
  CLI::App* dev_app = app.add_subcommand("device", "I-V sweep of the threshold memristor");
  Options dev_opts(dev_app);
  dev_cmd.common.bind(dev_opts, dev_app, "out/device");
  dev_cmd.bind(dev_opts);

  NoiseCommand noise_cmd;
  CLI::App* noise_app = app.add_subcommand("noise", "F1 against noise level");
  Options noise_opts(noise_app);
  noise_cmd.common.bind(noise_opts, noise_app, "out/noise");
  noise_cmd.scene.bind(noise_opts);
  noise_cmd.bind(noise_opts);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*aco_app) return aco_cmd.run(aco_opts);
    if (*hw_app) return hw_cmd.run(hw_opts);
    if (*tp_app) return tp_cmd.run(tp_opts);
    if (*dev_app) return dev_cmd.run(dev_opts);
    if (*noise_app) return noise_cmd.run(noise_opts);
    return kConfig;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kCalibration;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    // Unreadable inputs, malformed images and failed writes.
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}
