#include "wht/spectral.hpp"

#include <cmath>
#include <limits>

namespace wht {

std::uint64_t degeneracy(int level, int dim) {
  require(level >= 0 && dim >= 1, "degeneracy: bad arguments");
  // C(level+dim-1, dim-1), built so every intermediate is an exact integer
  std::uint64_t c = 1;
  for (int k = 1; k <= dim - 1; ++k) c = c * static_cast<std::uint64_t>(level + k) / static_cast<std::uint64_t>(k);
  return c;
}

double spectral_tail_bound(const TrapParams& trap, int max_level) {
  trap.validate();
  const double q = trap.q();
  const int d = trap.dim;
  const int m = max_level + 1;
  const double ratio = q * (m + d) / (m + 1.0);
  const double first = static_cast<double>(degeneracy(m, d)) * std::pow(q, m);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return first / (1.0 - ratio);
}

SpectrumTruncation truncation(const TrapParams& trap, int max_level) {
  require(max_level >= 0, "truncation: max_level must be non-negative");
  return {max_level, spectral_tail_bound(trap, max_level)};
}

SpectrumTruncation adaptive_truncation(const TrapParams& trap, double rel_tol) {
  const double tr = trace_gibbs(trap);
  int m = 1;
  while (spectral_tail_bound(trap, m) > rel_tol * tr) m = m < 64 ? m + 8 : static_cast<int>(m * 1.25);
  int lo = m / 2, hi = m;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (spectral_tail_bound(trap, mid) > rel_tol * tr) lo = mid; else hi = mid;
  }
  return truncation(trap, hi);
}

std::vector<EigenLevel> spectrum_levels(const TrapParams& trap, const SpectrumTruncation& trunc) {
  trap.validate();
  require(trunc.max_level >= 0, "spectrum_levels: negative max_level");
  std::vector<EigenLevel> out;
  out.reserve(trunc.max_level + 1);
  for (int m = 0; m <= trunc.max_level; ++m) {
    const double e = m / trap.kappa;
    out.push_back({m, e, std::exp(-trap.beta * e), degeneracy(m, trap.dim)});
  }
  return out;
}

double trace_gibbs(const TrapParams& trap) {
  trap.validate();
  return std::pow(-std::expm1(-trap.beta / trap.kappa), -trap.dim);
}

double mehler_1d(double kappa, double t, double x, double y) {
  const double u = t / kappa;
  const double pre = 1.0 / std::sqrt(pi * kappa * (-std::expm1(-2.0 * u)));
  const double e = -std::tanh(0.5 * u) * (x * x + y * y) / (2.0 * kappa) - (x - y) * (x - y) / (2.0 * kappa * std::sinh(u));
  return pre * std::exp(e);
}

double mehler_kernel(const TrapParams& trap, double t, const Point& x, const Point& y) {
  trap.validate();
  if (!(t > 0.0)) throw DomainError("mehler_kernel: t must be positive");
  require(x.size() == trap.dim && y.size() == trap.dim, "mehler_kernel: dimension mismatch");
  const double u = t / trap.kappa;
  const double pre = std::pow(pi * trap.kappa * (-std::expm1(-2.0 * u)), -0.5 * trap.dim);
  const double e = -std::tanh(0.5 * u) * (x.squaredNorm() + y.squaredNorm()) / (2.0 * trap.kappa) -
                   (x - y).squaredNorm() / (2.0 * trap.kappa * std::sinh(u));
  return pre * std::exp(e);
}

double heat_1d(double t, double x, double y) {
  return std::exp(-(x - y) * (x - y) / (2.0 * t)) / std::sqrt(2.0 * pi * t);
}

double heat_kernel(double beta, int dim, const Point& x, const Point& y) {
  if (!(beta > 0.0)) throw DomainError("heat_kernel: beta must be positive");
  require(x.size() == dim && y.size() == dim, "heat_kernel: dimension mismatch");
  return std::pow(2.0 * pi * beta, -0.5 * dim) * std::exp(-(x - y).squaredNorm() / (2.0 * beta));
}

double ground_state_1d(double kappa, double x) {
  return std::pow(pi * kappa, -0.25) * std::exp(-x * x / (2.0 * kappa));
}

double ground_state(const TrapParams& trap, const Point& x) {
  trap.validate();
  return std::pow(pi * trap.kappa, -0.25 * trap.dim) * std::exp(-x.squaredNorm() / (2.0 * trap.kappa));
}

Eigen::VectorXd eigenfunctions_1d(int smax, double x) {
  require(smax >= 0, "eigenfunctions_1d: negative index");
  Eigen::VectorXd phi(smax + 1);
  phi(0) = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
  if (smax >= 1) phi(1) = std::sqrt(2.0) * x * phi(0);
  for (int s = 1; s < smax; ++s)
    phi(s + 1) = x * std::sqrt(2.0 / (s + 1.0)) * phi(s) - std::sqrt(s / (s + 1.0)) * phi(s - 1);
  return phi;
}

double eigenfunction_1d(int s, double x) { return eigenfunctions_1d(s, x)(s); }

double eigenfunction(const TrapParams& trap, const Eigen::VectorXi& s, const Point& x) {
  trap.validate();
  require(s.size() == trap.dim && x.size() == trap.dim, "eigenfunction: dimension mismatch");
  const double sk = std::sqrt(trap.kappa);
  double v = 1.0;
  for (int c = 0; c < trap.dim; ++c) v *= std::pow(trap.kappa, -0.25) * eigenfunction_1d(s(c), x(c) / sk);
  return v;
}

double resolvent_kernel(double r, const TrapParams& trap, const Point& x, const Point& y, double tol) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("resolvent_kernel: r must lie in (0,1)");
  trap.validate();
  double sum = 0.0, rn = 1.0;
  for (int n = 1;; ++n) {
    rn *= r;
    sum += rn * mehler_kernel(trap, n * trap.beta, x, y);
    // kernel bounded by its diagonal sup, which decreases in n
    const double sup = std::pow(pi * trap.kappa * (-std::expm1(-2.0 * (n + 1) * trap.beta / trap.kappa)), -0.5 * trap.dim);
    if (sup * rn * r / (1.0 - r) < tol) break;
  }
  return sum;
}

double resolvent_kernel(double r, const FlatParams& flat, const Point& x, const Point& y, double tol) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("resolvent_kernel: r must lie in (0,1)");
  require(flat.beta > 0.0 && flat.dim >= 1, "resolvent_kernel: bad flat parameters");
  double sum = 0.0, rn = 1.0;
  for (int n = 1;; ++n) {
    rn *= r;
    sum += rn * heat_kernel(n * flat.beta, flat.dim, x, y);
    const double sup = std::pow(2.0 * pi * (n + 1) * flat.beta, -0.5 * flat.dim);
    if (sup * rn * r / (1.0 - r) < tol) break;
  }
  return sum;
}

} // namespace wht
