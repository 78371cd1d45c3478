#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "memant/dynamics.hpp"
#include "memant/errors.hpp"

using namespace memant;
using namespace memant::dynamics;

namespace {

// Fixed point of the memristive pair by damped iteration of
// Gn_i = 1 + (K I0 / xi) (ratio_i - 1) share_i.
std::pair<double, double> memristive_fixed_point(const MemristiveFluidConfig& c) {
  double a = 1.0, b = 1.0;
  for (int k = 0; k < 20000; ++k) {
    const double den = a * c.g_off1 + b * c.g_off2;
    const double na = 1.0 + c.k * c.i0 / c.xi * (c.g_on1 / c.g_off1 - 1.0) * a * c.g_off1 / den;
    const double nb = 1.0 + c.k * c.i0 / c.xi * (c.g_on2 / c.g_off2 - 1.0) * b * c.g_off2 / den;
    a = 0.5 * (a + na);
    b = 0.5 * (b + nb);
  }
  return {a, b};
}

}  // namespace

TEST_CASE("worked example lengths and conductances") {
  const WorkedExample ex = two_path_from_example();
  CHECK(ex.le_up == 4.0);
  CHECK(ex.le_left == 4.0);
  CHECK(ex.le_right == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(ex.le_down == doctest::Approx(2.2667).epsilon(1e-4));
  CHECK(ex.g_off_right == doctest::Approx(1 / 1.3));
  CHECK(ex.g_off_down == doctest::Approx(0.4412).epsilon(1e-3));
  CHECK(ex.g_off_up == 0.25);
  CHECK(ex.tau_path0 == doctest::Approx(1e-8));
}

TEST_CASE("colony pair: shorter path wins and the other fades") {
  const AcoFluidConfig c = reference_aco_pair();
  const Trajectory tr = aco_fluid(c, 20.0, 1e-3);
  CHECK(tr.t.size() == 20001);
  CHECK(tr.t.back() == doctest::Approx(20.0));
  CHECK(winner(tr) == 1);
  CHECK(tr.s2.back() <= 0.05 * tr.s1.back());
  // With the loser gone, tau1 settles at nu Q / (rho Le1).
  CHECK(tr.s1.back() == doctest::Approx(1.0 / 1.3).epsilon(1e-4));
  CHECK(tail_variation(tr) < 1e-4);
}

TEST_CASE("memristive pair settles at its fixed point") {
  const MemristiveFluidConfig c = reference_memristive_pair();
  const Trajectory tr = memristive_fluid(c, 2.0, 1e-4);
  const auto [a, b] = memristive_fixed_point(c);
  CHECK(tr.s1.back() == doctest::Approx(a).epsilon(1e-6));
  CHECK(tr.s2.back() == doctest::Approx(b).epsilon(1e-6));
  CHECK(winner(tr) == 1);
  CHECK(std::abs(tr.s2.back() - 1.0) <= 0.1);

  const MemristiveFluidConfig r = reference_memristive_pair(true);
  CHECK(r.g_off1 == doctest::Approx(1 / 1.3));
  CHECK(r.g_on1 / r.g_off1 == doctest::Approx(2200 / 2.266));
  CHECK(r.g_on2 / r.g_off2 == doctest::Approx(1300 / 1.3));
}

TEST_CASE("current divider conserves the source current") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(1e-6, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double i0 = g(rng);
    const auto [i1, i2] = current_divider(g(rng), g(rng), i0);
    CHECK(std::abs(i1 + i2 - i0) <= 4 * std::numeric_limits<double>::epsilon() * i0);
    CHECK(i1 >= 0.0);
    CHECK(i2 >= 0.0);
  }
  CHECK_THROWS_AS(current_divider(0.0, 0.0, 1.0), ArgumentError);
}

TEST_CASE("winner comparison") {
  SUBCASE("reference parameter sets agree on path 1") {
    const WinnerReport w = compare_winner(aco_fluid(reference_aco_pair(), 20.0, 1e-3),
                                          memristive_fluid(reference_memristive_pair(), 2.0, 1e-4));
    CHECK(w.agree);
    CHECK(w.first_winner == 1);
    CHECK(w.first_ratio <= 0.05);
  }
  SUBCASE("equal lengths tie") {
    AcoFluidConfig a;
    a.le1 = a.le2 = 2.0;
    MemristiveFluidConfig m;
    m.g_off1 = m.g_off2 = 0.5;
    m.g_on1 = m.g_on2 = 500.0;
    const WinnerReport w = compare_winner(aco_fluid(a, 20.0, 1e-3), memristive_fluid(m, 2.0, 1e-4));
    CHECK_FALSE(w.first_winner.has_value());
    CHECK_FALSE(w.second_winner.has_value());
    CHECK(w.agree);
  }
  SUBCASE("unconverged run names the trajectory") {
    try {
      compare_winner(aco_fluid(reference_aco_pair(), 0.05, 1e-3), memristive_fluid(reference_memristive_pair(), 2.0, 1e-4));
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(std::string(e.what()).find("aco") != std::string::npos);
    }
  }
}

TEST_CASE("argmax agreement on random path pairs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> le(0.5, 5.0);
  int checked = 0;
  while (checked < 100) {
    const double l1 = le(rng), l2 = le(rng);
    if (std::abs(l1 - l2) < 0.05 * std::max(l1, l2)) continue;
    AcoFluidConfig a;
    a.le1 = l1;
    a.le2 = l2;
    MemristiveFluidConfig m;
    m.g_off1 = 1.0 / l1;
    m.g_off2 = 1.0 / l2;
    m.g_on1 = 1000.0 * m.g_off1;
    m.g_on2 = 1000.0 * m.g_off2;
    const WinnerReport w = compare_winner(aco_fluid(a, 40.0, 1e-3), memristive_fluid(m, 2.0, 1e-4));
    CHECK(w.agree);
    CHECK(w.first_winner == (l1 < l2 ? 1 : 2));
    ++checked;
  }
}

TEST_CASE("integrator argument checks") {
  CHECK_THROWS_AS(aco_fluid(reference_aco_pair(), 1.0, 0.0), ArgumentError);
  AcoFluidConfig bad;
  bad.le1 = -1.0;
  CHECK_THROWS_AS(aco_fluid(bad, 1.0, 1e-3), ArgumentError);
  MemristiveFluidConfig m;
  m.gn1_0 = 0.5;
  CHECK_THROWS_AS(memristive_fluid(m, 1.0, 1e-3), ArgumentError);
}
