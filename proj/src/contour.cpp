#include "wht/contour.hpp"

#include <cmath>

namespace wht {

namespace {

cplx clog1p(cplx w) {
  if (std::abs(w) < 0.5) return 2.0 * std::atanh(w / (2.0 + w));
  return std::log(1.0 + w);
}

// e^{ix} - 1 without cancellation
cplx expm1_i(double x) {
  const double h = std::sin(0.5 * x);
  return {-2.0 * h * h, std::sin(x)};
}

} // namespace

SpectralModel::SpectralModel(const TrapParams& trap) : trap_(trap) {
  trap.validate();
  // circles used here have r g_m <= e^{-beta m/(2 kappa)} for m >= 1, so truncate against beta/2
  TrapParams half = trap;
  half.beta *= 0.5;
  const double amp = 4.0 / (-std::expm1(-half.beta / half.kappa));
  int m = 8;
  while (spectral_tail_bound(half, m) * amp > 1e-17) m = static_cast<int>(m * 1.3) + 1;
  max_level_ = m;
}

cplx SpectralModel::log_det_ratio_q(double log_r, double x) const {
  const cplx e = expm1_i(x);
  cplx acc = 0.0;
  for (int m = max_level_; m >= 1; --m) {
    const double p = 1.0 / std::expm1(trap_.beta * m / trap_.kappa - log_r);
    acc += static_cast<double>(degeneracy(m, trap_.dim)) * clog1p(-p * e);
  }
  return acc;
}

cplx SpectralModel::log_det_ratio(double log_r, double x) {
  const double p0 = 1.0 / std::expm1(-log_r);
  return log_det_ratio_q(log_r, x) + clog1p(-p0 * expm1_i(x));
}

double SpectralModel::log_det_q(double log_r) const {
  double acc = 0.0;
  for (int m = max_level_; m >= 1; --m)
    acc += static_cast<double>(degeneracy(m, trap_.dim)) * std::log(-std::expm1(log_r - trap_.beta * m / trap_.kappa));
  return acc;
}

double SpectralModel::log_det(double log_r) {
  if (!(log_r < 0.0)) throw DomainError("SpectralModel::log_det: r must be below 1");
  return log_det_q(log_r) + std::log(-std::expm1(log_r));
}

double SpectralModel::log_det_reduced(double log_z) { return log_det_q(log_z); }

double log_theta(double b, double a) {
  require(a > 0.0, "log_theta: a must be positive");
  const double c = b / a;
  const double half = std::sqrt(90.0 / a) + 2.0;
  const long lo = static_cast<long>(std::floor(c - half)), hi = static_cast<long>(std::ceil(c + half));
  const double peak = 0.5 * b * c;
  double sum = 0.0;
  for (long n = lo; n <= hi; ++n) {
    const double dn = static_cast<double>(n) - c;
    sum += std::exp(-0.5 * a * dn * dn);
  }
  return peak + std::log(sum);
}

ContourResult log_xi_contour(DetModel& model, double beta, double mu, double a, double log_r,
                             const ContourOptions& opt) {
  require(a > 0.0, "log_xi_contour: a must be positive");
  const double lsecond = model.log_second();
  const double lbound = model.log_top_bound();
  // far from every pole the top eigenvalue itself is not needed
  const bool far = -(log_r + lbound) >= opt.split_fraction * (lbound - lsecond);
  const double ltop = far ? lbound : model.log_top();
  if (!(log_r + ltop < 0.0)) throw DomainError("log_xi_contour: the circle must lie inside the first pole");
  const double s = (beta * mu - log_r) / a;
  const double eps = -(log_r + ltop);
  const double gap = ltop - lsecond;
  ContourResult out;
  out.window = std::max(1e-3, std::sqrt(2.0 * a * 14.0 * std::log(10.0)));
  const double X = out.window;
  const double norm = -0.5 * std::log(2.0 * pi * a);

  // int_{-X}^{X} e^{-isx - x^2/2a - ratio(x)} dx, using the conjugate symmetry of the integrand
  auto window_integral = [&](double lr, double ss) {
    model.prepare_circle(lr, X);
    auto g = [&](double x) { return std::exp(cplx(-0.5 * x * x / a, -ss * x) - model.log_det_ratio(lr, x)); };
    const IntegrationResult r = integrate_adaptive(g, 0.0, X, 1e-300, opt.rel_tol);
    out.evaluations += r.evaluations;
    return 2.0 * r.value.real();
  };

  if (far || !(opt.allow_split && gap > 0.0 && eps < opt.split_fraction * gap)) {
    const double J = window_integral(log_r, s);
    if (!(J > 0.0)) throw ContractViolation("log_xi_contour: non-positive window integral");
    out.log_xi = 0.5 * a * s * s - model.log_det(log_r) + norm + std::log(J);
    return out;
  }

  // Pole split: move to the circle with r' a_0 = e^{gap/2}; the crossed poles give a theta sum.
  out.split = true;
  const double y = eps + 0.5 * gap;
  const double lr2 = log_r + y;
  const double s2 = s - y / a;
  const double log_res = log_theta(beta * mu + ltop, a) - model.log_det_reduced(-ltop);
  const double log_gap_factor = std::log(std::expm1(0.5 * gap));
  const double log_bound = 0.5 * a * s2 * s2 - model.log_det_reduced_lower(lr2) - log_gap_factor;
  out.integral_bound = std::exp(log_bound - log_res);
  if (out.integral_bound < 1e-15) {
    out.integral_dropped = true;
    out.log_xi = log_res;
    return out;
  }
  const double log_abs_det2 = model.log_det_reduced(lr2) + log_gap_factor;
  // Det(1 - r'A) is negative here: one eigenvalue factor has crossed zero
  const double J = window_integral(lr2, s2);
  const double rel = -std::exp(0.5 * a * s2 * s2 - log_abs_det2 + norm - log_res) * J;
  if (!(1.0 + rel > 0.0)) throw ContractViolation("log_xi_contour: split evaluation lost positivity");
  out.log_xi = log_res + std::log1p(rel);
  return out;
}

double log_xi_contour_integral(const TrapParams& trap, double mu, double lambda, double s) {
  require(lambda > 0.0, "xi_contour_integral: lambda must be positive");
  const double a = trap.beta * lambda / trap.volume();
  const double lr = trap.beta * mu - a * s;
  if (!(lr < 0.0)) throw DomainError("xi_contour_integral: need exp(beta mu - beta lambda s / kappa^d) < 1");
  SpectralModel model(trap);
  ContourOptions opt;
  opt.allow_split = false;
  return log_xi_contour(model, trap.beta, mu, a, lr, opt).log_xi;
}

double xi_contour_integral(const TrapParams& trap, double mu, double lambda, double s) {
  return std::exp(log_xi_contour_integral(trap, mu, lambda, s));
}

ContourResult log_xi(const TrapParams& trap, double mu, double lambda) {
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  SpectralModel model(trap);
  return log_xi_contour(model, trap.beta, mu, trap.beta * lambda / trap.volume(), std::log1p(-fp.one_minus_r));
}

} // namespace wht
