#include "memant/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "memant/errors.hpp"

namespace memant::dynamics {

void AcoFluidConfig::validate() const {
  if (!(le1 > 0.0 && le2 > 0.0)) throw ArgumentError("aco_fluid: path lengths must be positive");
  if (!(gamma > 0.0)) throw ArgumentError("aco_fluid: gamma must be positive");
  if (!(tau1_0 > 0.0 && tau2_0 > 0.0)) throw ArgumentError("aco_fluid: initial tau must be positive");
}

void MemristiveFluidConfig::validate() const {
  if (!(g_on1 > g_off1 && g_off1 > 0.0 && g_on2 > g_off2 && g_off2 > 0.0)) {
    throw ArgumentError("memristive_fluid: need G_on > G_off > 0 on both branches");
  }
  if (!(gn1_0 >= 1.0 && gn2_0 >= 1.0)) {
    throw ArgumentError("memristive_fluid: initial normalized conductance must be >= 1");
  }
}

WorkedExample two_path_from_example(double tau0) {
  constexpr double eta0 = 1.0, eta1 = 5.0, eta2 = 10.0, eta3 = 15.0;
  WorkedExample ex;
  ex.le_up = 4.0 / eta0;
  ex.le_left = 4.0 / eta0;
  ex.le_right = 1.0 / eta0 + 3.0 / eta2;
  ex.le_down = 2.0 / eta0 + 1.0 / eta1 + 1.0 / eta3;
  ex.g_off_up = 1.0 / ex.le_up;
  ex.g_off_left = 1.0 / ex.le_left;
  ex.g_off_right = 1.0 / ex.le_right;
  ex.g_off_down = 1.0 / ex.le_down;
  ex.tau0 = tau0;
  ex.tau_path0 = std::pow(tau0, 4);

  ex.aco.le1 = ex.le_right;
  ex.aco.le2 = ex.le_down;
  ex.aco.tau1_0 = ex.tau_path0;
  ex.aco.tau2_0 = ex.tau_path0;

  ex.memristive = reference_memristive_pair(true);
  ex.memristive.g_off1 = ex.g_off_right;
  ex.memristive.g_off2 = ex.g_off_down;
  ex.memristive.g_on1 = 1000.0 * ex.g_off_right;
  ex.memristive.g_on2 = 1000.0 * ex.g_off_down;
  return ex;
}

AcoFluidConfig reference_aco_pair() { return AcoFluidConfig{}; }

MemristiveFluidConfig reference_memristive_pair(bool reciprocal) {
  MemristiveFluidConfig c;
  if (reciprocal) {
    const double r1 = c.g_on1 / c.g_off1;
    const double r2 = c.g_on2 / c.g_off2;
    c.g_off1 = 1.0 / 1.3;
    c.g_off2 = 1.0 / 2.266;
    c.g_on1 = r1 * c.g_off1;
    c.g_on2 = r2 * c.g_off2;
  }
  return c;
}

std::array<double, 2> aco_rhs(const AcoFluidConfig& c, double tau1, double tau2) {
  const double w1 = std::pow(tau1, c.alpha) * std::pow(1.0 / c.le1, c.beta);
  const double w2 = std::pow(tau2, c.alpha) * std::pow(1.0 / c.le2, c.beta);
  const double sum = w1 + w2;
  const double p1 = sum > 0.0 ? w1 / sum : 0.5;
  const double p2 = sum > 0.0 ? w2 / sum : 0.5;
  const double g = c.gamma;
  return {-g * c.rho * tau1 + p1 * g * c.nu * c.q / c.le1,
          -g * c.rho * tau2 + p2 * g * c.nu * c.q / c.le2};
}

std::array<double, 2> memristive_rhs(const MemristiveFluidConfig& c, double gn1, double gn2) {
  const double share_den = gn1 * c.g_off1 + gn2 * c.g_off2;
  const double drive = c.k * c.i0;
  return {-c.xi * (gn1 - 1.0) + drive * (c.g_on1 / c.g_off1 - 1.0) * gn1 * c.g_off1 / share_den,
          -c.xi * (gn2 - 1.0) + drive * (c.g_on2 / c.g_off2 - 1.0) * gn2 * c.g_off2 / share_den};
}

namespace {

template <typename Rhs, typename Clamp>
Trajectory integrate(std::string name, double s1, double s2, double t_end, double dt, Rhs rhs,
                     Clamp clamp) {
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  if (!(t_end >= dt)) throw ArgumentError("T must be at least dt");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  Trajectory tr{std::move(name), {}, {}, {}};
  tr.t.reserve(steps + 1);
  tr.s1.reserve(steps + 1);
  tr.s2.reserve(steps + 1);
  tr.t.push_back(0.0);
  tr.s1.push_back(s1);
  tr.s2.push_back(s2);
  for (std::size_t n = 1; n <= steps; ++n) {
    const auto d = rhs(s1, s2);
    s1 = clamp(0, s1 + dt * d[0]);
    s2 = clamp(1, s2 + dt * d[1]);
    tr.t.push_back(static_cast<double>(n) * dt);
    tr.s1.push_back(s1);
    tr.s2.push_back(s2);
  }
  return tr;
}

}  // namespace

Trajectory aco_fluid(const AcoFluidConfig& c, double t_end, double dt) {
  c.validate();
  return integrate(
      "aco", c.tau1_0, c.tau2_0, t_end, dt,
      [&](double a, double b) { return aco_rhs(c, a, b); },
      [](int, double v) { return std::max(v, kTauFloor); });
}

Trajectory memristive_fluid(const MemristiveFluidConfig& c, double t_end, double dt) {
  c.validate();
  const double top1 = c.g_on1 / c.g_off1;
  const double top2 = c.g_on2 / c.g_off2;
  return integrate(
      "memristive", c.gn1_0, c.gn2_0, t_end, dt,
      [&](double a, double b) { return memristive_rhs(c, a, b); },
      [=](int branch, double v) { return std::clamp(v, 1.0, branch == 0 ? top1 : top2); });
}

std::pair<double, double> current_divider(double g1, double g2, double i0) {
  const double total = g1 + g2;
  if (!(total > 0.0)) throw ArgumentError("current_divider: total conductance must be positive");
  const double i1 = i0 * g1 / total;
  return {i1, i0 - i1};
}

double tail_variation(const Trajectory& tr) {
  if (tr.t.empty()) return 0.0;
  const double t_end = tr.t.back();
  const double f1 = tr.s1.back();
  const double f2 = tr.s2.back();
  const double scale = std::max(std::abs(f1), std::abs(f2));
  double worst = 0.0;
  for (std::size_t n = tr.t.size(); n-- > 0;) {
    if (tr.t[n] < 0.9 * t_end) break;
    worst = std::max({worst, std::abs(tr.s1[n] - f1), std::abs(tr.s2[n] - f2)});
  }
  return scale > 0.0 ? worst / scale : worst;
}

std::optional<int> winner(const Trajectory& tr) {
  const double a = tr.s1.back();
  const double b = tr.s2.back();
  if (std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b))) return std::nullopt;
  return a > b ? 1 : 2;
}

namespace {

double loser_ratio(const Trajectory& tr) {
  const double a = tr.s1.back();
  const double b = tr.s2.back();
  const double hi = std::max(a, b);
  return hi > 0.0 ? std::min(a, b) / hi : 1.0;
}

}  // namespace

WinnerReport compare_winner(const Trajectory& a, const Trajectory& b, double tolerance) {
  for (const Trajectory* tr : {&a, &b}) {
    if (tr->t.empty()) throw ConvergenceError("trajectory '" + tr->name + "' is empty");
    const double v = tail_variation(*tr);
    if (!(v < tolerance)) {
      throw ConvergenceError("trajectory '" + tr->name + "' has not converged (tail variation " +
                             std::to_string(v) + ")");
    }
  }
  WinnerReport r;
  r.first_winner = winner(a);
  r.second_winner = winner(b);
  r.agree = r.first_winner == r.second_winner;
  r.first_ratio = loser_ratio(a);
  r.second_ratio = loser_ratio(b);
  return r;
}

}  // namespace memant::dynamics
