#pragma once

// Ant-colony edge detection on a pixel graph: path-set enumeration,
// traversal probabilities, pheromone deposit and the colony main loop.
//
// Pheromone lives on pixels. An ant starting at every pixel chooses one
// self-avoiding horizontal/vertical walk of L steps per iteration. A path's
// pheromone is the product of its node pheromones and its length is the sum
// of inverse heuristics, both taken over the "scored" nodes of the walk:
// the L nodes after the origin by default, all L+1 with include_origin.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "memant/grid.hpp"
#include "memant/imaging.hpp"

namespace memant::aco {

enum class Pattern {
  full,     ///< every self-avoiding walk
  hv_only,  ///< the four straight rays
};

enum class Mode {
  stochastic,  ///< one sampled path per origin, deposited immediately
  fluid,       ///< expected update: every path weighted by its probability
};

enum class Evaporation {
  on_update,  ///< (1 - rho) applies only to nodes being deposited on
  global,     ///< (1 - rho) applies to every node once per iteration
};

using Path = std::vector<Node>;

struct PathSet {
  Node origin;
  int length = 1;
  Pattern pattern = Pattern::full;
  std::vector<Path> paths;
};

struct PheromoneMap : Grid<double> {
  using Grid::Grid;
};

struct AcoParams {
  double alpha = 1.0;
  double beta = 1.0;
  double rho = 0.001;
  double q = 1.0;
  double nu = 1.0;
  double tau0 = 0.01;
  int length = 4;
  int iterations = 10;
  Pattern pattern = Pattern::full;
  Mode mode = Mode::stochastic;
  Evaporation evaporation = Evaporation::on_update;
  double eta_floor = 0.01;
  bool include_origin = false;
  std::uint64_t seed = 0;
  /// Iterations (0..iterations) at which to capture the map. Empty means
  /// only the final iteration.
  std::vector<int> snapshots;

  /// Throws ArgumentError naming the first offending field.
  void validate() const;
};

/// Settings used for edge maps of noisy synthetic scenes: expected-value
/// updates over every walk, the origin scored with the walk, a large
/// initial pheromone to damp early positive feedback.
AcoParams edge_preset();

using Rng = std::mt19937_64;

/// Depth-first enumeration in direction order right, left, down, up.
/// Throws ArgumentError for length < 1 or an origin outside the image.
PathSet enumerate_paths(Node origin, int length, Pattern pattern, int width, int height);

/// Upper bound on the path-set size for an unobstructed origin.
std::size_t path_set_bound(int length);

/// The nodes of `path` that carry pheromone and length.
std::span<const Node> scored_nodes(const Path& path, bool include_origin) noexcept;

/// Le = sum over nodes of 1 / max(eta, eta_floor).
double path_length(std::span<const Node> nodes, const Grid<double>& eta, double eta_floor);

/// p_m proportional to (prod tau)^alpha * (1/Le_m)^beta, evaluated in log
/// space. Falls back to uniform if every weight is degenerate.
std::vector<double> path_probabilities(const PathSet& set, const Grid<double>& tau,
                                       const Grid<double>& eta, const AcoParams& params);

/// Normalizes log-weights into a distribution (max-shifted).
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

/// Draws an index from `dist`. Throws ArgumentError unless the entries are
/// non-negative and sum to 1 within 1e-9.
std::size_t select_path(std::span<const double> dist, Rng& rng);

/// tau <- (1 - rho) tau + nu Q / Le on every listed node.
void deposit(Grid<double>& tau, std::span<const Node> nodes, double rho, double nu, double q,
             double le);

enum class Execution { serial, parallel };

/// Mutable colony state. run_aco drives it; tests and benchmarks step it
/// directly to compare the serial and OpenMP kernels.
class Colony {
 public:
  Colony(imaging::HeuristicMap eta, AcoParams params);

  /// Restricts which pixels launch ants (default: all, row-major).
  void set_origins(std::vector<Node> origins);

  /// One full iteration over all origins.
  void step(Execution exec = Execution::parallel);

  const PheromoneMap& tau() const noexcept { return tau_; }
  const imaging::HeuristicMap& eta() const noexcept { return eta_; }
  int iteration() const noexcept { return iteration_; }

 private:
  void step_stochastic();
  void step_fluid(Execution exec);
  PathSet paths_from(Node origin) const;

  imaging::HeuristicMap eta_;
  AcoParams params_;
  PheromoneMap tau_;
  std::vector<Node> origins_;
  std::vector<std::vector<Node>> offsets_;  // interior path set, relative to origin
  Rng rng_;
  int iteration_ = 0;
};

struct Snapshot {
  int iteration = 0;
  PheromoneMap tau;
};

struct AcoResult {
  imaging::HeuristicMap eta;
  std::vector<Snapshot> snapshots;
};

/// Computes the heuristic map and runs the colony, capturing snapshots.
AcoResult run_aco(const imaging::GrayImage& img, const AcoParams& params);

AcoResult run_aco(const imaging::HeuristicMap& eta, const AcoParams& params,
                  Execution exec = Execution::parallel);

struct Threshold {
  enum class Method { fixed, otsu };
  Method method = Method::otsu;
  double value = 0.0;  ///< used by fixed
};

/// Otsu threshold over a 256-bin histogram spanning [min, max]. Returns the
/// smallest value classified as foreground; NaN for a constant input.
double otsu_threshold(std::span<const double> values);

/// Marks values >= threshold. A constant map under Otsu gives an empty mask.
imaging::EdgeMask threshold_edges(const Grid<double>& map, const Threshold& method);

/// Marks values < threshold (for maps where edges are the low population).
imaging::EdgeMask threshold_edges_below(const Grid<double>& map, const Threshold& method);

}  // namespace memant::aco
