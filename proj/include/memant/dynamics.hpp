#pragma once

// Two-path fluid models. An ant colony with a constant arrival rate gamma
// choosing between two paths, and two memristive branches sharing a current
// source, are both integrated as coupled ODE pairs so their winners can be
// compared.
//
//   colony:     dtau_i/dt  = -gamma rho tau_i + p_i gamma nu Q / Le_i
//               p_i        = tau_i^alpha Le_i^-beta / sum_j tau_j^alpha Le_j^-beta
//   memristive: dGn_i/dt   = -xi (Gn_i - 1)
//                            + K I0 (G_on,i / G_off,i - 1) Gn_i G_off,i / sum_j Gn_j G_off,j

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memant::dynamics {

struct AcoFluidConfig {
  double le1 = 1.3;
  double le2 = 2.266;
  double gamma = 20.0;
  double rho = 1.0;
  double nu = 1.0;
  double q = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double tau1_0 = 0.01;
  double tau2_0 = 0.01;

  void validate() const;
};

struct MemristiveFluidConfig {
  double g_off1 = 2.266;
  double g_off2 = 1.3;
  double g_on1 = 2200.0;
  double g_on2 = 1300.0;
  double i0 = 1.0;
  double k = 0.01;
  double xi = 50.0;
  double gn1_0 = 1.0;
  double gn2_0 = 1.0;

  void validate() const;
};

struct Trajectory {
  std::string name;
  std::vector<double> t;
  std::vector<double> s1;
  std::vector<double> s2;
};

/// The single-ant worked example: hv-only walks of length 4 from the center
/// of a small noisy image.
struct WorkedExample {
  double le_up = 0.0;
  double le_left = 0.0;
  double le_right = 0.0;
  double le_down = 0.0;
  double g_off_up = 0.0;
  double g_off_left = 0.0;
  double g_off_right = 0.0;
  double g_off_down = 0.0;
  double tau0 = 0.01;
  double tau_path0 = 0.0;  ///< tau0^4: product over the four scored nodes
  AcoFluidConfig aco;      ///< path 1 = right, path 2 = down
  MemristiveFluidConfig memristive;
};

/// Heuristic levels of the example: white 1, grey 5, 10, 15.
WorkedExample two_path_from_example(double tau0 = 0.01);

/// Reference two-path parameter sets (lengths 1.3 and 2.266).
AcoFluidConfig reference_aco_pair();
/// `reciprocal` swaps the reference G_off values (2.266, 1.3) for the
/// inverse-length ones (1/1.3, 1/2.266) keeping the same on/off ratios.
MemristiveFluidConfig reference_memristive_pair(bool reciprocal = false);

/// Positivity floor applied to tau after each step.
inline constexpr double kTauFloor = 1e-12;

std::array<double, 2> aco_rhs(const AcoFluidConfig& c, double tau1, double tau2);
std::array<double, 2> memristive_rhs(const MemristiveFluidConfig& c, double gn1, double gn2);

/// Explicit Euler with step dt until T; every step is recorded.
Trajectory aco_fluid(const AcoFluidConfig& c, double t_end, double dt);
Trajectory memristive_fluid(const MemristiveFluidConfig& c, double t_end, double dt);

/// I1 = I0 G1 / (G1 + G2), I2 = I0 - I1. Throws ArgumentError when both
/// conductances are zero.
std::pair<double, double> current_divider(double g1, double g2, double i0);

/// Largest relative change of either state over the last 10% of the run,
/// scaled by the larger final state.
double tail_variation(const Trajectory& tr);

/// 1 or 2, or nullopt for a tie (final states equal to 1e-9 relative).
std::optional<int> winner(const Trajectory& tr);

struct WinnerReport {
  std::optional<int> first_winner;
  std::optional<int> second_winner;
  bool agree = false;
  double first_ratio = 0.0;   ///< loser / winner final value
  double second_ratio = 0.0;
};

/// Throws ConvergenceError naming the trajectory whose tail variation is
/// above `tolerance`.
WinnerReport compare_winner(const Trajectory& a, const Trajectory& b, double tolerance = 1e-4);

}  // namespace memant::dynamics
