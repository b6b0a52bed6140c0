#include "wht/fixedpoint.hpp"

#include <cmath>
#include <functional>

namespace wht {

std::string to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::Normal: return "normal";
    case PhaseLabel::Condensed: return "condensed";
    default: return "critical";
  }
}

double SpectralSums::occupation(const TrapParams& trap, double log_r, int max_level) {
  double sum = 0.0;
  for (int m = max_level; m >= 0; --m)
    sum += static_cast<double>(degeneracy(m, trap.dim)) / std::expm1(trap.beta * m / trap.kappa - log_r);
  return sum;
}

double SpectralSums::occupation_sq(const TrapParams& trap, double log_r, int max_level) {
  double sum = 0.0;
  for (int m = max_level; m >= 0; --m) {
    const double sh = std::sinh(0.5 * (trap.beta * m / trap.kappa - log_r));
    sum += static_cast<double>(degeneracy(m, trap.dim)) / (4.0 * sh * sh);
  }
  return sum;
}

double SpectralSums::log_det(const TrapParams& trap, double log_r, int max_level) {
  double sum = 0.0;
  for (int m = max_level; m >= 0; --m)
    sum += static_cast<double>(degeneracy(m, trap.dim)) * std::log(-std::expm1(log_r - trap.beta * m / trap.kappa));
  return sum;
}

double SpectralSums::occupation_tail(const TrapParams& trap, int max_level) {
  return spectral_tail_bound(trap, max_level) / (-std::expm1(-trap.beta * (max_level + 1) / trap.kappa));
}

double h_kappa(double r, const TrapParams& trap, double lambda, const SpectrumTruncation& trunc) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("h_kappa: r must lie in (0,1)");
  trap.validate();
  require(lambda > 0.0, "h_kappa: lambda must be positive");
  return std::log(r) / (trap.beta * lambda) + SpectralSums::occupation(trap, std::log(r), trunc.max_level) / trap.volume();
}

namespace {

// Root of a decreasing function of v on the real line: bracket expansion, bisection, secant polish.
double decreasing_root(const std::function<double(double)>& g, double lo, double hi, double vtol) {
  while (g(lo) < 0.0) lo = lo - 2.0 * (hi - lo);
  while (g(hi) > 0.0) hi = hi + 2.0 * (hi - lo);
  double glo = g(lo), ghi = g(hi);
  while (hi - lo > vtol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm > 0.0) lo = mid, glo = gm; else hi = mid, ghi = gm;
    if (gm == 0.0) return mid;
  }
  // secant pass inside the final bracket
  double v = lo - glo * (hi - lo) / (ghi - glo);
  if (!(v >= lo && v <= hi)) v = 0.5 * (lo + hi);
  return v;
}

FixedPoint solve_at_level(const TrapParams& trap, double mu, double lambda, int max_level) {
  const double vol = trap.volume();
  const double target = mu / lambda;
  // r = exp(-e^v); h is decreasing in v
  auto g = [&](double v) {
    const double lr = -std::exp(v);
    return lr / (trap.beta * lambda) + SpectralSums::occupation(trap, lr, max_level) / vol - target;
  };
  const double v = decreasing_root(g, -3.0, 1.0, 1e-15);
  FixedPoint fp;
  const double lr = -std::exp(v);
  fp.r = std::exp(lr);
  fp.one_minus_r = -std::expm1(lr);
  fp.s = vol * (trap.beta * mu - lr) / (trap.beta * lambda);
  fp.max_level = max_level;
  return fp;
}

} // namespace

FixedPoint solve_fixed_point(const TrapParams& trap, double mu, double lambda, const SpectrumTruncation& trunc,
                             double tol) {
  trap.validate();
  require(lambda > 0.0, "solve_fixed_point: lambda must be positive");
  FixedPoint fp = solve_at_level(trap, mu, lambda, trunc.max_level);
  // grow the truncation until the fixed point no longer moves
  for (int it = 0; it < 30; ++it) {
    const int next = static_cast<int>(fp.max_level * 1.5) + 8;
    FixedPoint fq = solve_at_level(trap, mu, lambda, next);
    const bool stable = std::abs(fq.r - fp.r) < tol &&
                        std::abs(fq.one_minus_r - fp.one_minus_r) <= tol * fp.one_minus_r;
    fp = fq;
    if (stable) break;
  }
  return fp;
}

FixedPoint solve_fixed_point(const TrapParams& trap, double mu, double lambda, double tol) {
  return solve_fixed_point(trap, mu, lambda, adaptive_truncation(trap, 1e-14), tol);
}

double r_star(double beta, double mu, double lambda, double dim, double tol) {
  require(beta > 0.0 && lambda > 0.0, "r_star: beta and lambda must be positive");
  if (dim > 1.0 && mu >= mu_crit(beta, lambda, dim))
    throw PhaseError("r_star: no solution for mu >= mu_c (condensed or critical phase)");
  const double bd1 = std::pow(beta, dim - 1.0);
  auto g = [&](double v) {
    const double lr = -std::exp(v);
    const double r = std::exp(lr);
    return lr + lambda * polylog(dim, r) / bd1 - beta * mu;
  };
  const double v = decreasing_root(g, -3.0, 1.0, std::max(tol * 1e-3, 1e-15));
  return std::exp(-std::exp(v));
}

PhaseLabel classify_phase(double beta, double mu, double lambda, double dim, double tol) {
  if (dim <= 1.0) return PhaseLabel::Normal;
  const double mc = mu_crit(beta, lambda, dim);
  if (std::abs(mu - mc) < tol * std::max(1.0, std::abs(mc))) return PhaseLabel::Critical;
  return mu < mc ? PhaseLabel::Normal : PhaseLabel::Condensed;
}

double condensed_rate(double beta, double mu, double lambda, double dim) {
  const double bd = std::pow(beta, dim);
  const double den = bd * mu - zeta(dim) * lambda;
  if (!(den > 0.0)) throw PhaseError("condensed_rate: requires mu > mu_c");
  return bd * lambda / den;
}

double rho_total(double beta, double mu, double lambda, double dim) {
  require(lambda > 0.0, "rho_total: lambda must be positive");
  switch (classify_phase(beta, mu, lambda, dim)) {
    case PhaseLabel::Normal: return polylog(dim, r_star(beta, mu, lambda, dim)) / std::pow(beta, dim);
    case PhaseLabel::Condensed: return mu / lambda;
    default: return rho_crit(beta, dim);
  }
}

double rho_total_kappa(const TrapParams& trap, double mu, double lambda) {
  return solve_fixed_point(trap, mu, lambda).s / trap.volume();
}

double a_nu(const Point& p, double r, int nu) {
  require(nu == 1 || nu == 2, "a_nu: nu must be 1 or 2");
  const double e = r * std::exp(-p.lpNorm<1>());
  return e / std::pow(1.0 - e, nu);
}

double a_nu_kappa(const Point& p, double r, int nu, double kappa, double beta) {
  Point corner(p.size());
  bool origin = true;
  for (int c = 0; c < p.size(); ++c) {
    const double n = std::floor(p(c) * kappa / beta);
    origin = origin && n == 0.0;
    corner(c) = beta * n / kappa;
  }
  return origin ? 0.0 : a_nu(corner, r, nu);
}

} // namespace wht
