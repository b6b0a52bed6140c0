#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wht/fixedpoint.hpp"
#include "wht/thermo.hpp"

#include <cmath>

using namespace wht;
using doctest::Approx;

namespace {
const double mu_half = std::log(0.5) + 0.5372131936080402;  // r_* = 1/2 at beta = lambda = 1, d = 3
}

TEST_CASE("h_kappa is an increasing bijection of (0,1)") {
  const TrapParams t{5.0, 1.0, 3};
  const auto tr = adaptive_truncation(t);
  CHECK(h_kappa(1e-300, t, 1.0, tr) < -500.0);
  CHECK(h_kappa(1.0 - 1e-12, t, 1.0, tr) > 1e6);
  double prev = -1e300;
  for (double r = 0.01; r < 1.0; r += 0.01) {
    const double h = h_kappa(r, t, 1.0, tr);
    CHECK(h > prev);
    prev = h;
  }
  CHECK_THROWS_AS(h_kappa(1.0, t, 1.0, tr), DomainError);
  CHECK_THROWS_AS(h_kappa(0.0, t, 1.0, tr), DomainError);
}

TEST_CASE("fixed point residuals") {
  for (double mu : {-3.0, mu_half, 0.5, 2.0}) {
    const TrapParams t{6.0, 1.0, 3};
    const FixedPoint fp = solve_fixed_point(t, mu, 1.0);
    CHECK(fp.r > 0.0);
    CHECK(fp.r < 1.0);
    // r = exp(beta mu - beta lambda s / kappa^d)
    CHECK(std::log(fp.r) == Approx(t.beta * mu - t.beta * fp.s / t.volume()).epsilon(1e-10));
    // s = Tr rG(1 - rG)^{-1}
    double tr = 0.0;
    for (const auto& l : spectrum_levels(t, adaptive_truncation(t, 1e-15)))
      tr += l.degeneracy * fp.r * l.eigenvalue / (1.0 - fp.r * l.eigenvalue);
    CHECK(fp.s == Approx(tr).epsilon(1e-9));
  }
}

TEST_CASE("free-gas limit") {
  const TrapParams t{4.0, 1.0, 3};
  const FixedPoint fp = solve_fixed_point(t, -12.0, 1.0);
  CHECK(fp.r == Approx(std::exp(-12.0)).epsilon(1e-4));
  CHECK(rho_total_kappa(t, -12.0, 1.0) == Approx(std::exp(-12.0) * trace_gibbs(t) / t.volume()).epsilon(1e-4));
}

TEST_CASE("normal-phase fixed point approaches r_*") {
  CHECK(r_star(1.0, mu_half, 1.0, 3) == Approx(0.5).epsilon(1e-12));
  double prev = 1e300;
  for (double k : {25.0, 50.0, 100.0, 200.0}) {
    const double e = std::abs(solve_fixed_point({k, 1.0, 3}, mu_half, 1.0).r - 0.5);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("fixed point against an independent grid root find") {
  const TrapParams t{30.0, 1.0, 3};
  const auto tr = adaptive_truncation(t);
  // scan r on a fine grid, then refine the sign change by bisection
  double lo = 0.0, hi = 1.0;
  for (int i = 1; i < 1000; ++i) {
    const double r = i / 1000.0;
    if (h_kappa(r, t, 1.0, tr) > mu_half) {
      hi = r;
      lo = (i - 1) / 1000.0;
      break;
    }
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h_kappa(std::max(mid, 1e-300), t, 1.0, tr) < mu_half ? lo : hi) = mid;
  }
  CHECK(solve_fixed_point(t, mu_half, 1.0).r == Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("r_star limits") {
  CHECK(r_star(1.0, -40.0, 1.0, 3) < 1e-17);
  CHECK(r_star(1.0, mu_crit(1.0, 1.0, 3) - 1e-7, 1.0, 3) > 0.99);
  CHECK_THROWS_AS(r_star(1.0, 2.0, 1.0, 3), PhaseError);
}

TEST_CASE("phase classification") {
  CHECK(classify_phase(1.0, 0.0, 1.0, 3) == PhaseLabel::Normal);
  CHECK(classify_phase(1.0, 2.0, 1.0, 3) == PhaseLabel::Condensed);
  CHECK(classify_phase(1.0, zeta(3.0), 1.0, 3, 1e-12) == PhaseLabel::Critical);
  CHECK(to_string(PhaseLabel::Condensed) == "condensed");
}

TEST_CASE("condensed rate") {
  CHECK(condensed_rate(1.0, 2.0, 1.0, 3) == Approx(1.2532223).epsilon(1e-7));
  CHECK(condensed_rate(1.0, 2.0, 1e-9, 3) < 1e-8);
  CHECK_THROWS_AS(condensed_rate(1.0, 1.0, 1.0, 3), PhaseError);
  // kappa^3 (1 - r) = 1 / (2 - rho_c(kappa)) with rho_c(kappa) = zeta(3) + O(1/kappa); values from an
  // independent root find of log r = mu - s / kappa^3 over the full level sum
  const double ref[] = {1.4038360899833, 1.3231671883402, 1.2731076828310};
  const double ks[] = {30.0, 60.0, 200.0};
  double prev = 1e300;
  for (int i = 0; i < 3; ++i) {
    const TrapParams t{ks[i], 1.0, 3};
    const double v = t.volume() * solve_fixed_point(t, 2.0, 1.0).one_minus_r;
    CHECK(v == Approx(ref[i]).epsilon(1e-9));
    const double e = std::abs(v - 1.2532223);
    CHECK(e < prev);
    CHECK(e * ks[i] < 6.0);
    prev = e;
  }
  CHECK(prev / 1.2532223 < 0.02);
}

TEST_CASE("critical point: kappa^d (1 - r_kappa) grows without bound") {
  const double mc = mu_crit(1.0, 1.0, 3);
  double prev = 0.0;
  for (double k : {10.0, 20.0, 40.0}) {
    const TrapParams t{k, 1.0, 3};
    const FixedPoint fp = solve_fixed_point(t, mc, 1.0);
    const double v = t.volume() * fp.one_minus_r;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("total density") {
  CHECK(rho_total(1.0, 2.0, 1.0, 3) == Approx(2.0).epsilon(1e-15));
  CHECK(rho_total(1.0, mu_half, 1.0, 3) == Approx(0.5372132).epsilon(1e-6));
  const double mc = mu_crit(1.0, 1.0, 3);
  CHECK(rho_total(1.0, mc - 1e-9, 1.0, 3) == Approx(zeta(3.0)).epsilon(1e-3));
  CHECK(rho_total(1.0, mc + 1e-9, 1.0, 3) == Approx(zeta(3.0)).epsilon(1e-8));
  double prev = -1.0;
  for (double mu = -2.0; mu < 3.0; mu += 0.1) {
    const double v = rho_total(1.0, mu, 1.0, 3);
    CHECK(v >= prev);
    prev = v;
  }
  // finite-kappa density approaches it in both phases
  for (double mu : {mu_half, 2.0}) {
    double p = 1e300;
    for (double k : {10.0, 20.0, 40.0}) {
      const double e = std::abs(rho_total_kappa({k, 1.0, 3}, mu, 1.0) - rho_total(1.0, mu, 1.0, 3));
      CHECK(e < p);
      p = e;
    }
  }
}

TEST_CASE("a_nu functions") {
  const Point o = Point::Zero(3);
  CHECK(a_nu(o, 0.3, 1) == Approx(0.3 / 0.7).epsilon(1e-15));
  CHECK(a_nu_kappa(o, 0.3, 1, 10.0, 1.0) == 0.0);
  // domination a_nu^{(kappa)}(p; r) <= a_nu(c p; 1) with c = 1/2 away from the origin box
  for (double kappa : {5.0, 20.0})
    for (double x = 0.0; x < 3.0; x += 0.17)
      for (double y = 0.0; y < 3.0; y += 0.23) {
        Point p(3);
        p << x, y, 0.5 * x;
        if (p.lpNorm<1>() == 0.0) continue;
        for (int nu : {1, 2}) CHECK(a_nu_kappa(p, 0.9, nu, kappa, 1.0) <= a_nu(0.5 * p, 1.0, nu));
      }
  // staircase Riemann sum of a_1 -> polylog(d, r) / beta^d
  const double r = 0.6;
  double prev = 1e300;
  for (double kappa : {5.0, 10.0, 20.0}) {
    double s = 0.0;
    const int N = static_cast<int>(40.0 * kappa);
    for (int m = 1; m <= N; ++m)  // sum over |n|_1 = m with its degeneracy
      s += degeneracy(m, 3) * a_nu(Point::Constant(1, m / kappa), r, 1);
    const double e = std::abs(s / std::pow(kappa, 3) - polylog(3.0, r));
    CHECK(e < prev);
    prev = e;
  }
}
