#include "wht/thermo.hpp"

#include <cmath>
#include <limits>

namespace wht {

namespace {

constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// E_s(z) = int_1^inf e^{-zy} y^{-s} dy for s > 1, 0 <= z <~ 3, by its power series.
// Returns the value and an estimate of the rounding loss from cancellation.
SeriesValue expint_small(double s, double z) {
  const double m = std::round(s);
  double sum = 0.0, term = 1.0, maxterm = 0.0;  // term = (-z)^k / k!
  const bool integer = std::abs(s - m) < 1e-12;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= -z / k;
    if (integer && k == static_cast<int>(m) - 1) continue;
    const double t = term / (k + 1.0 - s);
    sum -= t;
    maxterm = std::max(maxterm, std::abs(t));
    if (std::abs(t) < 1e-18 * std::abs(sum) && k > static_cast<int>(s) + 2) break;
  }
  double lead = 0.0;
  if (integer) {
    const int mi = static_cast<int>(m);
    if (z > 0.0) {
      double psi = -euler_gamma;
      for (int k = 1; k < mi; ++k) psi += 1.0 / k;
      lead = std::pow(-z, mi - 1) / std::tgamma(static_cast<double>(mi)) * (psi - std::log(z));
    }
  } else if (z > 0.0) {
    lead = std::tgamma(1.0 - s) * std::pow(z, s - 1.0);
  }
  maxterm = std::max(maxterm, std::abs(lead));
  return {lead + sum, 16.0 * std::numeric_limits<double>::epsilon() * maxterm};
}

// f(x) = e^{-a x} x^{-s}; j-th derivative at x
double tail_derivative(double s, double a, double x, int j) {
  double acc = 0.0, binom = 1.0, rising = 1.0;
  for (int i = 0; i <= j; ++i) {
    if (i > 0) {
      binom = binom * (j - i + 1) / i;
      rising *= (s + i - 1);
    }
    const double sign = ((i % 2) ? -1.0 : 1.0);
    acc += binom * std::pow(-a, j - i) * sign * rising * std::pow(x, -s - i);
  }
  return acc * std::exp(-a * x);
}

} // namespace

SeriesValue polylog_certified(double s, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("polylog: r must lie in [0,1]");
  if (r == 1.0 && !(s > 1.0)) throw DivergenceError("polylog: series diverges at r = 1 for s <= 1");
  if (!(s > 1.0)) throw DomainError("polylog: s must exceed 1");
  if (r == 0.0) return {0.0, 0.0};
  if (r <= 0.95) {
    double sum = 0.0, rn = 1.0;
    for (int n = 1;; ++n) {
      rn *= r;
      sum += rn / std::pow(n, s);
      const double bound = rn * r / (std::pow(n + 1.0, s) * (1.0 - r));
      if (bound < 1e-16 * sum) return {sum, bound + 4.0 * std::numeric_limits<double>::epsilon() * sum};
    }
  }
  // Near r = 1: partial sum, then Euler-Maclaurin on the completely monotone tail.
  const double a = -std::log(r);
  const int N = 40;
  double head = 0.0;
  for (int n = N - 1; n >= 1; --n) head += std::exp(-a * n) / std::pow(n, s);
  const SeriesValue e = expint_small(s, a * N);
  double tail = std::pow(static_cast<double>(N), 1.0 - s) * e.value + 0.5 * tail_derivative(s, a, N, 0);
  static const double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  double fact = 1.0, last = 0.0;
  for (int k = 1; k <= 7; ++k) {
    fact *= (2.0 * k - 1) * (2.0 * k);
    last = b2k[k - 1] / fact * tail_derivative(s, a, N, 2 * k - 1);
    if (k < 7) tail -= last;
  }
  const double sum = head + tail;
  return {sum, std::abs(last) + std::pow(static_cast<double>(N), 1.0 - s) * e.error_bound +
                   4.0 * std::numeric_limits<double>::epsilon() * sum};
}

double polylog(double s, double r) { return polylog_certified(s, r).value; }

double zeta(double s) {
  if (!(s > 1.0)) throw DivergenceError("zeta: diverges for s <= 1");
  return polylog(s, 1.0);
}

double rho_kappa_ideal(const TrapParams& trap, double mu, const SpectrumTruncation& trunc) {
  trap.validate();
  if (!(mu < 0.0)) throw DomainError("rho_kappa_ideal: the ideal gas needs mu < 0");
  double sum = 0.0;
  for (int m = trunc.max_level; m >= 0; --m)
    sum += static_cast<double>(degeneracy(m, trap.dim)) / std::expm1(trap.beta * (m / trap.kappa - mu));
  return sum / trap.volume();
}

double rho_kappa_ideal(const TrapParams& trap, double mu) {
  return rho_kappa_ideal(trap, mu, adaptive_truncation(trap, 1e-15));
}

double rho_ideal_limit(double beta, double mu, double dim) {
  require(beta > 0.0 && dim > 0.0, "rho_ideal_limit: bad beta or dim");
  if (!(mu < 0.0)) throw DomainError("rho_ideal_limit: the ideal gas needs mu < 0");
  const double r = std::exp(beta * mu);
  if (r == 0.0) return 0.0;
  return polylog(dim, r) / std::pow(beta, dim);
}

double rho_crit(double beta, double dim) {
  require(beta > 0.0, "rho_crit: beta must be positive");
  if (!(dim > 1.0)) throw DivergenceError("rho_crit: infinite for d <= 1");
  return zeta(dim) / std::pow(beta, dim);
}

double rho_crit_tdl(double beta, double dim) {
  require(beta > 0.0, "rho_crit_tdl: beta must be positive");
  if (!(dim > 2.0)) throw DivergenceError("rho_crit_tdl: infinite for d <= 2");
  return zeta(0.5 * dim) / std::pow(2.0 * pi * beta, 0.5 * dim);
}

double mu_crit(double beta, double lambda, double dim) {
  require(lambda >= 0.0, "mu_crit: lambda must be non-negative");
  return lambda * rho_crit(beta, dim);
}

double mu_bar_kappa(const TrapParams& trap, double rho) {
  trap.validate();
  require(rho > 0.0, "mu_bar_kappa: rho must be positive");
  const SpectrumTruncation tr = adaptive_truncation(trap, 1e-15);
  // g(t) = rho_kappa(-e^t) - rho is decreasing in t
  auto g = [&](double t) { return rho_kappa_ideal(trap, -std::exp(t), tr) - rho; };
  double lo = -2.0, hi = 0.0;
  while (g(lo) < 0.0) lo = lo * 2.0 - 1.0;
  while (g(hi) > 0.0) hi = hi * 2.0 + 1.0;
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return -std::exp(0.5 * (lo + hi));
}

double condensate_profile(double beta, double rho, const Point& u) {
  const double d = static_cast<double>(u.size());
  const double rc = rho_crit(beta, d);
  if (rho < rc) throw DomainError("condensate_profile: rho below the critical density");
  return (rho - rc) * std::pow(pi, -0.5 * d) * std::exp(-u.squaredNorm());
}

double condensate_density_kappa(const TrapParams& trap, double rho, const Point& x) {
  const double mu = mu_bar_kappa(trap, rho);
  const double om = ground_state(trap, x);
  return om * om / std::expm1(-trap.beta * mu) / trap.volume();
}

double dos_density(DosKind kind, double energy, double dim) {
  require(energy >= 0.0 && dim > 0.0, "dos_density: need E >= 0 and d > 0");
  if (kind == DosKind::harmonic) return std::pow(energy, dim - 1.0) / std::tgamma(dim);
  return std::pow(energy, 0.5 * (dim - 2.0)) / (std::pow(2.0 * pi, 0.5 * dim) * std::tgamma(0.5 * dim));
}

double harmonic_staircase_laplace(const TrapParams& trap, double t) {
  TrapParams tt = trap;
  tt.beta = t;
  const auto levels = spectrum_levels(tt, adaptive_truncation(tt, 1e-15));
  double sum = 0.0;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) sum += it->degeneracy * it->eigenvalue;
  return sum / tt.volume();
}

} // namespace wht
