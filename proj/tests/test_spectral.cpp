#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wht/checks.hpp"
#include "wht/spectral.hpp"

#include <cmath>
#include <random>

using namespace wht;
using doctest::Approx;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

} // namespace

TEST_CASE("mehler kernel closed form at the origin") {
  const TrapParams t{1.0, 1.0, 1};
  CHECK(mehler_kernel(t, 1.0, pt({0.0}), pt({0.0})) == Approx(std::pow(pi * (1.0 - std::exp(-2.0)), -0.5)).epsilon(1e-14));
  CHECK(mehler_kernel(t, 1.0, pt({0.0}), pt({0.0})) == Approx(0.6067380).epsilon(1e-6));
}

TEST_CASE("mehler kernel on the diagonal") {
  const TrapParams t{2.5, 0.8, 2};
  const Point x = pt({0.3, -1.1});
  const double u = t.beta / t.kappa;
  const double want = std::pow(pi * t.kappa * (1.0 - std::exp(-2.0 * u)), -1.0) *
                      std::exp(-std::tanh(0.5 * u) * x.squaredNorm() / t.kappa);
  CHECK(mehler_kernel(t, t.beta, x, x) == Approx(want).epsilon(1e-14));
}

TEST_CASE("mehler kernel symmetric and positive") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const TrapParams t{3.0, 1.0, 3};
  for (int k = 0; k < 50; ++k) {
    const Point x = pt({u(gen), u(gen), u(gen)}), y = pt({u(gen), u(gen), u(gen)});
    const double a = mehler_kernel(t, 1.0, x, y);
    CHECK(a > 0.0);
    CHECK(a == Approx(mehler_kernel(t, 1.0, y, x)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mehler_kernel(t, 0.0, pt({0, 0, 0}), pt({0, 0, 0})), DomainError);
}

TEST_CASE("heat kernel values") {
  CHECK(heat_kernel(1.0, 3, pt({0.2, 0.1, 0.0}), pt({0.2, 0.1, 0.0})) == Approx(std::pow(2.0 * pi, -1.5)).epsilon(1e-15));
  CHECK(heat_kernel(1.0, 3, pt({0, 0, 0}), pt({0, 0, 0})) == Approx(0.0634936).epsilon(1e-6));
  CHECK(heat_kernel(1.0, 1, pt({0.0}), pt({1.0})) == Approx(std::exp(-0.5) / std::sqrt(2.0 * pi)).epsilon(1e-15));
  CHECK_THROWS_AS(heat_kernel(0.0, 1, pt({0.0}), pt({0.0})), DomainError);
}

TEST_CASE("mehler tends to the heat kernel for wide traps") {
  const TrapParams t{1e4, 1.0, 1};
  double worst = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.5)
    for (double y = -2.0; y <= 2.0; y += 0.5)
      worst = std::max(worst, std::abs(mehler_kernel(t, 1.0, pt({x}), pt({y})) - heat_kernel(1.0, 1, pt({x}), pt({y}))));
  CHECK(worst < 1e-3);
}

TEST_CASE("ground state") {
  const TrapParams t{1.0, 1.0, 1};
  CHECK(ground_state(t, pt({0.0})) == Approx(std::pow(pi, -0.25)).epsilon(1e-15));
  CHECK(ground_state(t, pt({0.0})) == Approx(0.751126).epsilon(1e-6));
  const TrapParams t3{4.0, 1.0, 3};
  const GridQuadrature g = tensor_gauss_legendre(Box::cube(3, 16.0), 60);
  CHECK(integrate(g, [&](const Point& x) { return std::pow(ground_state(t3, x), 2); }) == Approx(1.0).epsilon(1e-8));
  double prev = ground_state(t3, pt({0, 0, 0}));
  for (double r = 0.5; r < 20.0; r += 0.5) {
    const double v = ground_state(t3, pt({r, 0, 0}));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("hermite functions") {
  for (double x : {-2.0, 0.0, 0.7})
    CHECK(eigenfunction_1d(0, x) == Approx(std::pow(pi, -0.25) * std::exp(-0.5 * x * x)).epsilon(1e-15));
  CHECK(std::abs(eigenfunction_1d(1, 0.0)) < 1e-16);
  const GaussRule gr = gauss_legendre(200, -15.0, 15.0);
  double ip = 0.0, n2 = 0.0;
  for (int i = 0; i < gr.nodes.size(); ++i) {
    ip += gr.weights(i) * eigenfunction_1d(2, gr.nodes(i)) * eigenfunction_1d(3, gr.nodes(i));
    n2 += gr.weights(i) * std::pow(eigenfunction_1d(3, gr.nodes(i)), 2);
  }
  CHECK(std::abs(ip) < 1e-10);
  CHECK(n2 == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum levels and degeneracies") {
  CHECK(degeneracy(2, 3) == 6);
  for (int m = 0; m < 20; ++m) CHECK(degeneracy(m, 1) == 1);
  const TrapParams t{2.0, 1.0, 3};
  const SpectrumTruncation tr = truncation(t, 30);
  const auto lv = spectrum_levels(t, tr);
  REQUIRE(lv.size() == 31);
  std::uint64_t mult = 0;
  double sum = 0.0;
  for (std::size_t m = 0; m < lv.size(); ++m) {
    mult += lv[m].degeneracy;
    sum += lv[m].degeneracy * lv[m].eigenvalue;
    CHECK(lv[m].eigenvalue <= 1.0);
    if (m > 0) CHECK(lv[m].eigenvalue < lv[m - 1].eigenvalue);
  }
  CHECK(lv[0].eigenvalue == 1.0);
  CHECK(lv[0].degeneracy == 1);
  CHECK(mult == 5456);  // C(33, 3)
  CHECK(sum <= trace_gibbs(t));
  CHECK(sum + tr.tail_bound >= trace_gibbs(t));
  CHECK(truncation(t, 40).tail_bound < tr.tail_bound);
}

TEST_CASE("trace of the Gibbs operator") {
  CHECK(trace_gibbs({1.0, 1.0, 3}) == Approx(3.9591).epsilon(1e-4));
  CHECK(trace_gibbs({1.0, std::log(2.0), 1}) == Approx(2.0).epsilon(1e-14));
  // grows like (kappa/beta)^d
  CHECK(trace_gibbs({1e4, 2.0, 3}) / 1e12 == Approx(1.0 / 8.0).epsilon(1e-3));
}

TEST_CASE("resolvent kernel") {
  const FlatParams flat{1.0, 3};
  const Point o = pt({0, 0, 0});
  CHECK(resolvent_kernel(0.5, flat, o, o) == Approx(0.039674).epsilon(1e-5));
  CHECK(resolvent_kernel(1e-12, flat, o, o) < 1e-12);
  CHECK_THROWS_AS(resolvent_kernel(1.0, flat, o, o), DomainError);
  const TrapParams wide{1e4, 1.0, 3};
  for (double x : {0.0, 0.5, 1.0})
    CHECK(std::abs(resolvent_kernel(0.5, wide, pt({x, 0, 0}), o) - resolvent_kernel(0.5, flat, pt({x, 0, 0}), o)) < 1e-3);
}

TEST_CASE("semigroup and trace identities") {
  CHECK(check_semigroup().pass);
  for (int d : {1, 2})
    for (double k : {1.0, 10.0}) CHECK(check_trace_identity(d, k).pass);
}

TEST_CASE("spectral reconstruction converges in the cutoff") {
  const TrapParams t{2.0, 1.0, 1};
  const double x = 0.4, y = -0.9;
  const double exact = mehler_kernel(t, 1.0, pt({x}), pt({y}));
  double prev = 1e300;
  for (int M : {2, 5, 10, 20, 40}) {
    double s = 0.0;
    Eigen::VectorXi idx(1);
    for (int m = 0; m <= M; ++m) {
      idx(0) = m;
      s += std::exp(-m * t.beta / t.kappa) * eigenfunction(t, idx, pt({x})) * eigenfunction(t, idx, pt({y}));
    }
    const double err = std::abs(s - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("kernel difference bounds") {
  // short times: |G_kappa^n - G^n| kappa stays bounded; long times: |G_kappa^n - Omega Omega| kappa^{d/2} e^{n beta/2kappa} bounded
  const int d = 1;
  for (double kappa : {20.0, 40.0, 80.0}) {
    const TrapParams t{kappa, 1.0, d};
    double short_c = 0.0, long_c = 0.0;
    for (double x = -2.0; x <= 2.0; x += 1.0)
      for (double y = -2.0; y <= 2.0; y += 1.0) {
        for (int n = 1; n <= static_cast<int>(kappa); n *= 2)
          short_c = std::max(short_c, kappa * std::pow(n, 0.5 * d - 1.0) * std::abs(mehler_kernel(t, n, pt({x}), pt({y})) - heat_kernel(n, d, pt({x}), pt({y}))));
        for (int n = static_cast<int>(kappa); n <= 8 * static_cast<int>(kappa); n *= 2) {
          const double oo = ground_state(t, pt({x})) * ground_state(t, pt({y}));
          long_c = std::max(long_c, std::abs(mehler_kernel(t, n, pt({x}), pt({y})) - oo) * std::sqrt(kappa) *
                                        std::exp(0.5 * n / kappa));
        }
      }
    CHECK(short_c < 5.0);
    CHECK(long_c < 5.0);
  }
}
