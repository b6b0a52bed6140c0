#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wht/checks.hpp"
#include "wht/nystrom.hpp"

#include <cmath>
#include <random>

using namespace wht;
using doctest::Approx;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& gen, int n, double top) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = nd(gen);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g * g.transpose());
  Eigen::VectorXd ev = es.eigenvalues();
  ev *= top / ev.maxCoeff();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

const TestFunction bump = bump_function(Point::Zero(3), 1.0, 1.0);

} // namespace

TEST_CASE("fredholm determinant, spectral and matrix") {
  std::vector<EigenLevel> lv{{0, 0.0, 0.5, 1}, {1, 0.0, 0.25, 1}};
  CHECK(std::abs(fredholm_det(lv, 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(fredholm_det(lv, 1.0) - 0.375) < 1e-15);
  Eigen::MatrixXd m = Eigen::Vector2d(0.5, 0.25).asDiagonal();
  CHECK(std::abs(fredholm_det(m, 1.0) - 0.375) < 1e-15);
  CHECK(std::abs(std::exp(log_fredholm_det(lv, cplx(0.3, 0.4))) - fredholm_det(lv, cplx(0.3, 0.4))) < 1e-15);
}

TEST_CASE("det modulus bound") {
  CHECK(check_det_bound(5, 100).pass);
  // |Det|^2 = Det[1 + 4 sin^2(x/2) rG (1 - rG)^{-2}] for the trap spectrum
  const TrapParams t{3.0, 1.0, 3};
  const auto lv = spectrum_levels(t, adaptive_truncation(t, 1e-15));
  for (double x : {0.3, 1.7, -2.9})
    for (double r : {0.2, 0.9}) {
      double lhs = 0.0, rhs = 0.0;
      const cplx e = std::polar(1.0, x) - 1.0;
      for (const auto& l : lv) {
        const double a = r * l.eigenvalue;
        lhs += l.degeneracy * 2.0 * std::log(std::abs(1.0 - e * a / (1.0 - a)));
        rhs += l.degeneracy * std::log1p(4.0 * std::pow(std::sin(0.5 * x), 2) * a / ((1.0 - a) * (1.0 - a)));
      }
      CHECK(lhs == Approx(rhs).epsilon(1e-12));
      CHECK(rhs >= 0.0);
    }
}

TEST_CASE("complete homogeneous polynomials") {
  const Eigen::MatrixXd m = Eigen::Vector2d(0.5, 0.25).asDiagonal();
  const PowerSums ps = power_sums(m, 4);
  CHECK(sym_trace_hn(ps, 2) == Approx(0.4375).epsilon(1e-15));
  CHECK(sym_trace_hn(ps, 0) == 1.0);
  CHECK_THROWS_AS(sym_trace_hn(ps, -1), DomainError);
  // sum_{n <= N} h_n z^n Det(1 - zA) = 1 + O(z^{N+1}): the Cauchy product of h with det coefficients
  std::mt19937_64 gen(1);
  const Eigen::MatrixXd A = random_psd(gen, 4, 0.6);
  const int N = 8;
  const auto h = complete_homogeneous(power_sums(A, N), N);
  // det coefficients e_k (-1)^k from the characteristic polynomial
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
  std::vector<double> c{1.0};
  for (int i = 0; i < ev.size(); ++i) {
    std::vector<double> nc(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      nc[k] += c[k];
      nc[k + 1] -= ev(i) * c[k];
    }
    c = nc;
  }
  for (int n = 1; n <= N; ++n) {
    double s = 0.0;
    for (int k = 0; k <= std::min<int>(n, static_cast<int>(c.size()) - 1); ++k) s += c[k] * h[n - k];
    CHECK(std::abs(s) < 1e-14);
  }
}

TEST_CASE("trap power sums are nonincreasing") {
  const PowerSums ps = power_sums(TrapParams{2.0, 1.0, 3}, 10, 0.8);
  for (int k = 2; k <= 10; ++k) {
    CHECK(ps.p[k] >= 0.0);
    CHECK(ps.p[k] <= ps.p[k - 1]);
  }
}

TEST_CASE("Vere-Jones formula") {
  std::mt19937_64 gen(7);
  const Eigen::MatrixXd J = random_psd(gen, 5, 0.8);
  const VereJones v0 = vere_jones_check(J, 0);
  CHECK(v0.lhs == 1.0);
  CHECK(v0.rhs == 1.0);
  const VereJones v1 = vere_jones_check(J, 1);
  CHECK(v1.lhs == Approx(J.trace()).epsilon(1e-14));
  CHECK(v1.rhs == Approx(J.trace()).epsilon(1e-14));
  for (int n = 2; n <= 5; ++n) {
    const VereJones v = vere_jones_check(J, n);
    CHECK(std::abs(v.lhs - v.rhs) / v.rhs < 1e-10);
    CHECK(vere_jones_contour(J, n) == Approx(v.rhs).epsilon(1e-10));
  }
  CHECK_THROWS_AS(vere_jones_check(2.0 * J / 0.8, 2), ContractViolation);
  CHECK(check_vere_jones().pass);
}

TEST_CASE("brute-force partition function limits") {
  const TrapParams t{2.0, 1.0, 3};
  CHECK(xi_bruteforce(t, -60.0, 1.0) == Approx(1.0).epsilon(1e-15));
  const double lam = 1e4;
  CHECK(xi_bruteforce(t, 0.0, lam) == Approx(1.0 + trace_gibbs(t) * std::exp(-0.5 * lam / t.volume())).epsilon(1e-12));
  CHECK_THROWS_AS(log_xi_bruteforce(t, 2.0, 1.0, 3), ContractViolation);
}

TEST_CASE("contour integral against brute force") {
  for (double mu : {-1.0, -0.5, 2.0}) {
    const TrapParams t{2.0, 1.0, 3};
    const double brute = log_xi_bruteforce(t, mu, 1.0).log_xi;
    CHECK(log_xi(t, mu, 1.0).log_xi == Approx(brute).epsilon(1e-10));
  }
  const TrapParams t{2.0, 1.0, 3};
  const double xb = xi_bruteforce(t, -1.0, 1.0);
  const FixedPoint fp = solve_fixed_point(t, -1.0, 1.0);
  CHECK(xi_contour_integral(t, -1.0, 1.0, fp.s) == Approx(xb).epsilon(1e-6));
  // any admissible s gives the same value
  CHECK(log_xi_contour_integral(t, -1.0, 1.0, fp.s) == Approx(log_xi_contour_integral(t, -1.0, 1.0, 1.3 * fp.s)).epsilon(1e-8));
  const double s_huge = solve_fixed_point(t, 0.0, 1e5).s;
  CHECK(xi_contour_integral(t, 0.0, 1e5, s_huge) == Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(xi_contour_integral(t, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("saddle-point asymptotics") {
  // normal phase: relative error shrinks along kappa
  double prev = 1e300;
  for (double k : {2.0, 4.0, 8.0}) {
    const TrapParams t{k, 1.0, 3};
    const double b = log_xi_bruteforce(t, -0.5, 1.0).log_xi;
    const double e = std::abs(log_xi_saddle_normal(t, -0.5, 1.0) - b) / std::abs(b);
    CHECK(e < prev);
    prev = e;
  }
  const TrapParams t3{3.0, 1.0, 3};
  CHECK(xi_saddle_normal(t3, -0.5, 1.0) == Approx(xi_bruteforce(t3, -0.5, 1.0)).epsilon(0.05));
  // ideal-gas value for very negative mu
  const double mu = -15.0;
  const auto lv = spectrum_levels(t3, adaptive_truncation(t3, 1e-15));
  CHECK(log_xi_saddle_normal(t3, mu, 1.0) == Approx(-std::log(std::abs(fredholm_det(lv, std::exp(mu))))).epsilon(1e-4));
  // wrong phase
  CHECK_THROWS_AS(log_xi_saddle_normal(t3, 2.0, 1.0), PhaseError);
  CHECK_THROWS_AS(log_xi_saddle_condensed(t3, -0.5, 1.0), PhaseError);
  // condensed phase stays within a few percent
  for (double k : {2.0, 3.0, 4.0}) {
    const TrapParams t{k, 1.0, 3};
    const double b = log_xi_bruteforce(t, 2.0, 1.0).log_xi;
    CHECK(std::abs(log_xi_saddle_condensed(t, 2.0, 1.0) - b) / b < 0.05);
  }
}

TEST_CASE("five-factor ratio") {
  for (double r : {0.1, 0.5, 0.95}) CHECK(ground_state_ratio(TrapParams{3.0, 1.0, 3}, r) == Approx(1.0 - r).epsilon(1e-13));
}

TEST_CASE("generating functional at finite kappa") {
  const TrapParams t{2.0, 1.0, 3};
  GenfunOptions o;
  o.nodes_per_dim = 8;
  CHECK(genfun_finite(t, -0.5, 1.0, zero_function(3), o) == 1.0);
  const double g1 = genfun_finite(t, -0.5, 1.0, bump, o);
  const double g2 = genfun_finite(t, -0.5, 1.0, scaled(bump, 2.0), o);
  CHECK(g1 > 0.0);
  CHECK(g1 < 1.0);
  CHECK(g2 < g1);
  // brute force and contour agree
  GenfunOptions oc = o;
  oc.method = GenfunMethod::contour;
  GenfunOptions ob = o;
  ob.method = GenfunMethod::bruteforce;
  for (double mu : {-0.5, 2.0})
    CHECK(log_genfun_finite(t, mu, 1.0, bump, oc) == Approx(log_genfun_finite(t, mu, 1.0, bump, ob)).epsilon(1e-9));
}

TEST_CASE("normal limit functional") {
  CHECK(genfun_normal_limit(1.0, 0.5, 3, zero_function(3)) == 1.0);
  const double g = genfun_normal_limit(1.0, 0.5, 3, bump);
  CHECK(g > 0.0);
  CHECK(g <= 1.0);
  // same formula as the ideal gas: small-f expansion gives rho_{r*} int f
  const double h = 1e-4;
  const double e = expectation_from_genfun([](const TestFunction& f) { return genfun_normal_limit(1.0, 0.5, 3, f); },
                                           bump, h);
  const GridQuadrature grid = support_grid(bump, 24);
  const double intf = integrate(grid, [](const Point& x) { return bump(x); });
  CHECK(e == Approx(local_density_rstar(1.0, 0.5, 3) * intf).epsilon(1e-3));
  CHECK(local_density_rstar(1.0, 0.5, 3) == Approx(0.039674).epsilon(1e-5));
  CHECK(expectation_from_genfun([](const TestFunction&) { return 1.0; }, zero_function(3)) == 0.0);
}

TEST_CASE("K_f operator") {
  CHECK_THROWS_AS(build_Kf(1.0, 2, bump_function(Point::Zero(2), 1.0, 1.0)), DivergenceError);
  const DiscretizedOperator z = build_Kf(1.0, 3, zero_function(3));
  CHECK(z.entries.size() == 0);
  const DiscretizedOperator k = build_Kf(1.0, 3, bump, 12);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k.entries).eigenvalues();
  CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff());
  // trace against an independent diagonal series: sum_n (2 pi n)^{-3/2} is zeta(3/2)/(2 pi)^{3/2}
  const GridQuadrature g = k.grid;
  const double diag = std::pow(2.0 * pi, -1.5) * zeta(1.5);
  const double tr = integrate(g, [](const Point& x) { return -std::expm1(-bump(x)); }) * diag;
  CHECK(k.entries.trace() == Approx(tr).epsilon(1e-8));
}

TEST_CASE("condensed rate functional") {
  CHECK(condensed_rate_functional(1.0, 2.0, 1.0, 3, zero_function(3)) == 0.0);
  const double mc = mu_crit(1.0, 1.0, 3);
  const double a = condensed_rate_functional(1.0, mc + 0.5, 1.0, 3, bump, 12);
  const double b = condensed_rate_functional(1.0, mc + 1.0, 1.0, 3, bump, 12);
  CHECK(a < 0.0);
  CHECK(b == Approx(2.0 * a).epsilon(1e-12));
  // small f: (1 + K)^{-1} -> 1 and 1 - e^{-tb} -> tb
  const double t = 1e-3;
  const GridQuadrature grid = support_grid(bump, 24);
  const double intf = integrate(grid, [](const Point& x) { return bump(x); });
  const double v = condensed_rate_functional(1.0, 2.0, 1.0, 3, scaled(bump, t), 24);
  CHECK(v == Approx(-(2.0 - mc) / std::pow(pi, 1.5) * t * intf).epsilon(2e-3));
  CHECK_THROWS_AS(condensed_rate_functional(1.0, 0.5, 1.0, 3, bump), PhaseError);
}

TEST_CASE("eigengap bracket") {
  const Eigengap z = eigengap_check(TrapParams{10.0, 1.0, 3}, zero_function(3));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  const Eigengap e = eigengap_check(TrapParams{10.0, 1.0, 3}, bump);
  CHECK(e.lhs >= 0.0);
  CHECK(e.lhs <= e.upper);
  CHECK(e.lhs == Approx(e.rhs).epsilon(0.05));
  CHECK(check_eigengap_trend({8.0, 16.0}).pass);
}

TEST_CASE("top eigenvalue of G~ converges in the grid") {
  const TrapParams t{4.0, 1.0, 3};
  // the bump is smooth but steep near its edge: convergence is algebraic and not monotone in the node count
  const double a = 1.0 / top_eigen(SupportOperator(t, bump, 12)).z0;
  const double b = 1.0 / top_eigen(SupportOperator(t, bump, 16)).z0;
  const double c = 1.0 / top_eigen(SupportOperator(t, bump, 20)).z0;
  CHECK(std::abs(a - c) < 1e-5);
  CHECK(std::abs(b - c) < 1e-5);
  CHECK(c < 1.0);
}

TEST_CASE("tilde power sums: Tr G~^k <= Tr G^k") {
  const TrapParams t{2.0, 1.0, 3};
  const SupportOperator op(t, bump, 8);
  const PowerSums pt = power_sums_tilde(op, 6);
  const PowerSums pg = power_sums(t, 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(pt.p[k] > 0.0);
    CHECK(pt.p[k] < pg.p[k]);
  }
}
