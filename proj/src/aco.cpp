#include "memant/aco.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace memant::aco {

namespace {

// Keeps tau strictly positive when a fluid update over-evaporates a node
// shared by many origins.
constexpr double kTauFloor = 1e-300;

constexpr std::array<Node, 4> kDirections = {{{0, 1}, {0, -1}, {1, 0}, {-1, 0}}};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ArgumentError(field + ": " + what);
}

void walk(Path& current, int remaining, int width, int height, std::vector<Path>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  const Node at = current.back();
  for (const Node d : kDirections) {
    const Node next{at.row + d.row, at.col + d.col};
    if (next.row < 0 || next.col < 0 || next.row >= height || next.col >= width) continue;
    if (std::find(current.begin(), current.end(), next) != current.end()) continue;
    current.push_back(next);
    walk(current, remaining - 1, width, height, out);
    current.pop_back();
  }
}

}  // namespace

void AcoParams::validate() const {
  require(std::isfinite(alpha), "alpha", "must be finite");
  require(std::isfinite(beta), "beta", "must be finite");
  require(rho >= 0.0 && rho < 1.0, "rho", "must lie in [0, 1)");
  require(std::isfinite(q) && q >= 0.0, "Q", "must be finite and non-negative");
  require(std::isfinite(nu) && nu >= 0.0, "nu", "must be finite and non-negative");
  require(std::isfinite(tau0) && tau0 > 0.0, "tau0", "must be positive");
  require(std::isfinite(eta_floor) && eta_floor > 0.0, "eta_floor", "must be positive");
  require(length >= 1, "L", "traversal length must be at least 1");
  require(iterations >= 0, "iterations", "must be non-negative");
  for (int s : snapshots) {
    require(s >= 0 && s <= iterations, "snapshots",
            "iteration " + std::to_string(s) + " outside [0, " + std::to_string(iterations) + "]");
  }
}

AcoParams edge_preset() {
  AcoParams p;
  p.length = 4;
  p.iterations = 10;
  p.mode = Mode::fluid;
  p.pattern = Pattern::full;
  p.include_origin = true;
  p.eta_floor = 0.03;
  p.tau0 = 30.0;
  return p;
}

PathSet enumerate_paths(Node origin, int length, Pattern pattern, int width, int height) {
  require(length >= 1, "L", "traversal length must be at least 1");
  require(origin.row >= 0 && origin.col >= 0 && origin.row < height && origin.col < width,
          "origin", "outside the image");
  PathSet set{origin, length, pattern, {}};
  if (pattern == Pattern::hv_only) {
    for (const Node d : kDirections) {
      Path p{origin};
      for (int k = 1; k <= length; ++k) p.push_back({origin.row + k * d.row, origin.col + k * d.col});
      const Node last = p.back();
      if (last.row >= 0 && last.col >= 0 && last.row < height && last.col < width) {
        set.paths.push_back(std::move(p));
      }
    }
    return set;
  }
  Path current{origin};
  walk(current, length, width, height, set.paths);
  return set;
}

std::size_t path_set_bound(int length) {
  std::size_t bound = 4;
  for (int k = 1; k < length; ++k) bound *= 3;
  return bound;
}

std::span<const Node> scored_nodes(const Path& path, bool include_origin) noexcept {
  std::span<const Node> all(path);
  return include_origin || all.empty() ? all : all.subspan(1);
}

double path_length(std::span<const Node> nodes, const Grid<double>& eta, double eta_floor) {
  double le = 0.0;
  for (const Node n : nodes) le += 1.0 / std::max(eta[n], eta_floor);
  return le;
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  std::vector<double> p(log_weights.size());
  if (p.empty()) return p;
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double sum = 0.0;
  if (std::isfinite(top)) {
    for (std::size_t m = 0; m < p.size(); ++m) {
      p[m] = std::exp(log_weights[m] - top);
      sum += p[m];
    }
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& v : p) v /= sum;
  return p;
}

namespace {

double log_weight(std::span<const Node> nodes, const Grid<double>& tau, const Grid<double>& eta,
                  const AcoParams& params, double& le_out) {
  double log_tau = 0.0;
  for (const Node n : nodes) log_tau += std::log(tau[n]);
  le_out = path_length(nodes, eta, params.eta_floor);
  double w = 0.0;
  if (params.alpha != 0.0) w += params.alpha * log_tau;
  if (params.beta != 0.0) w -= params.beta * std::log(le_out);
  return w;
}

}  // namespace

std::vector<double> path_probabilities(const PathSet& set, const Grid<double>& tau,
                                       const Grid<double>& eta, const AcoParams& params) {
  if (set.paths.empty()) throw ArgumentError("path_probabilities: empty path set");
  std::vector<double> logw(set.paths.size());
  for (std::size_t m = 0; m < set.paths.size(); ++m) {
    double le = 0.0;
    logw[m] = log_weight(scored_nodes(set.paths[m], params.include_origin), tau, eta, params, le);
  }
  return normalize_log_weights(logw);
}

std::size_t select_path(std::span<const double> dist, Rng& rng) {
  if (dist.empty()) throw ArgumentError("select_path: empty distribution");
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ArgumentError("select_path: probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ArgumentError("select_path: probabilities sum to " + std::to_string(sum));
  }
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t m = 0; m < dist.size(); ++m) {
    if (dist[m] <= 0.0) continue;
    last_positive = m;
    acc += dist[m];
    if (u < acc) return m;
  }
  return last_positive;
}

void deposit(Grid<double>& tau, std::span<const Node> nodes, double rho, double nu, double q,
             double le) {
  const double amount = nu * q / le;
  for (const Node n : nodes) tau[n] = (1.0 - rho) * tau[n] + amount;
}

// --- Colony ---------------------------------------------------------------

Colony::Colony(imaging::HeuristicMap eta, AcoParams params)
    : eta_(std::move(eta)), params_(std::move(params)) {
  params_.validate();
  tau_ = PheromoneMap(eta_.width(), eta_.height(), params_.tau0);
  origins_.reserve(eta_.size());
  for (int r = 0; r < eta_.height(); ++r) {
    for (int c = 0; c < eta_.width(); ++c) origins_.push_back({r, c});
  }
  // Path shapes are translation invariant; border origins keep the subset
  // that stays in bounds, which preserves the depth-first order.
  const int span = 2 * params_.length + 1;
  const PathSet interior =
      enumerate_paths({params_.length, params_.length}, params_.length, params_.pattern, span, span);
  for (const Path& p : interior.paths) {
    std::vector<Node> rel;
    rel.reserve(p.size());
    for (const Node n : p) rel.push_back({n.row - params_.length, n.col - params_.length});
    offsets_.push_back(std::move(rel));
  }
  rng_.seed(params_.seed);
}

void Colony::set_origins(std::vector<Node> origins) {
  for (const Node n : origins) {
    if (!eta_.contains(n)) throw ArgumentError("origins: node outside the image");
  }
  origins_ = std::move(origins);
}

PathSet Colony::paths_from(Node origin) const {
  PathSet set{origin, params_.length, params_.pattern, {}};
  for (const auto& rel : offsets_) {
    Path p;
    p.reserve(rel.size());
    bool inside = true;
    for (const Node d : rel) {
      const Node n{origin.row + d.row, origin.col + d.col};
      if (!eta_.contains(n)) {
        inside = false;
        break;
      }
      p.push_back(n);
    }
    if (inside) set.paths.push_back(std::move(p));
  }
  return set;
}

void Colony::step(Execution exec) {
  if (params_.mode == Mode::stochastic) {
    step_stochastic();
  } else {
    step_fluid(exec);
  }
  ++iteration_;
}

void Colony::step_stochastic() {
  const bool global = params_.evaporation == Evaporation::global;
  if (global) {
    for (double& t : tau_.values()) t *= (1.0 - params_.rho);
  }
  const double rho = global ? 0.0 : params_.rho;
  for (const Node origin : origins_) {
    const PathSet set = paths_from(origin);
    if (set.paths.empty()) continue;
    const auto dist = path_probabilities(set, tau_, eta_, params_);
    const Path& chosen = set.paths[select_path(dist, rng_)];
    const auto nodes = scored_nodes(chosen, params_.include_origin);
    deposit(tau_, nodes, rho, params_.nu, params_.q, path_length(nodes, eta_, params_.eta_floor));
  }
}

namespace {

struct OriginUpdate {
  PathSet set;
  std::vector<double> prob;
  std::vector<double> le;
};

}  // namespace

void Colony::step_fluid(Execution exec) {
  // Phase 1: every origin's distribution from the iteration-start map. This is
  // the data-parallel part; phase 2 scatters in origin order so the serial and
  // parallel kernels produce identical bits.
  std::vector<OriginUpdate> updates(origins_.size());
  const auto count = static_cast<std::ptrdiff_t>(origins_.size());
  auto evaluate = [&](std::ptrdiff_t k) {
    OriginUpdate& u = updates[static_cast<std::size_t>(k)];
    u.set = paths_from(origins_[static_cast<std::size_t>(k)]);
    if (u.set.paths.empty()) return;
    std::vector<double> logw(u.set.paths.size());
    u.le.resize(u.set.paths.size());
    for (std::size_t m = 0; m < u.set.paths.size(); ++m) {
      logw[m] = log_weight(scored_nodes(u.set.paths[m], params_.include_origin), tau_, eta_,
                           params_, u.le[m]);
    }
    u.prob = normalize_log_weights(logw);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < count; ++k) evaluate(k);
  } else {
    for (std::ptrdiff_t k = 0; k < count; ++k) evaluate(k);
  }

  const bool global = params_.evaporation == Evaporation::global;
  const double nu_q = params_.nu * params_.q;
  Grid<double> delta(tau_.width(), tau_.height(), 0.0);
  for (const OriginUpdate& u : updates) {
    for (std::size_t m = 0; m < u.set.paths.size(); ++m) {
      const double p = u.prob[m];
      const double gain = nu_q / u.le[m];
      for (const Node n : scored_nodes(u.set.paths[m], params_.include_origin)) {
        delta[n] += global ? p * gain : p * (gain - params_.rho * tau_[n]);
      }
    }
  }
  auto t = tau_.values();
  auto d = delta.values();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double base = global ? (1.0 - params_.rho) * t[k] : t[k];
    t[k] = std::max(base + d[k], kTauFloor);
  }
}

AcoResult run_aco(const imaging::HeuristicMap& eta, const AcoParams& params, Execution exec) {
  params.validate();
  std::vector<int> wanted = params.snapshots;
  if (wanted.empty()) wanted.push_back(params.iterations);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  AcoResult result{eta, {}};
  Colony colony(eta, params);
  auto next = wanted.begin();
  for (int it = 0;; ++it) {
    if (next != wanted.end() && *next == it) {
      result.snapshots.push_back({it, colony.tau()});
      ++next;
    }
    if (it == params.iterations) break;
    colony.step(exec);
  }
  return result;
}

AcoResult run_aco(const imaging::GrayImage& img, const AcoParams& params) {
  return run_aco(imaging::compute_heuristics(img), params);
}

// --- thresholding -----------------------------------------------------------

double otsu_threshold(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  constexpr int kBins = 256;
  std::array<double, kBins> hist{};
  for (double v : values) {
    const int b = std::min(kBins - 1, static_cast<int>((v - lo) / range * kBins));
    hist[static_cast<std::size_t>(b)] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += b * hist[static_cast<std::size_t>(b)];

  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kBins - 1; ++b) {
    w0 += hist[static_cast<std::size_t>(b)];
    sum0 += b * hist[static_cast<std::size_t>(b)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return lo + range * static_cast<double>(best_bin + 1) / kBins;
}

namespace {

double resolve_threshold(const Grid<double>& map, const Threshold& method) {
  return method.method == Threshold::Method::fixed ? method.value : otsu_threshold(map.values());
}

}  // namespace

imaging::EdgeMask threshold_edges(const Grid<double>& map, const Threshold& method) {
  imaging::EdgeMask mask(map.width(), map.height(), 0);
  const double t = resolve_threshold(map, method);
  if (std::isnan(t)) return mask;
  auto src = map.values();
  auto dst = mask.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] >= t ? 1 : 0;
  return mask;
}

imaging::EdgeMask threshold_edges_below(const Grid<double>& map, const Threshold& method) {
  imaging::EdgeMask mask(map.width(), map.height(), 0);
  const double t = resolve_threshold(map, method);
  if (std::isnan(t)) return mask;
  auto src = map.values();
  auto dst = mask.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] < t ? 1 : 0;
  return mask;
}

}  // namespace memant::aco
