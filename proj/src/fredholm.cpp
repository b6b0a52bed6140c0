#include "wht/fredholm.hpp"

#include <cmath>
#include <numeric>

namespace wht {

TestFunction bump_function(const Point& center, double radius, double height) {
  require(radius > 0.0 && height >= 0.0, "bump_function: need radius > 0 and height >= 0");
  TestFunction f;
  const double r2 = radius * radius;
  f.eval = [center, r2, height](const Point& x) {
    const double u = (x - center).squaredNorm() / r2;
    return u < 1.0 ? height * std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
  };
  f.support = {center.array() - radius, center.array() + radius};
  f.zero = height == 0.0;
  f.label = "bump";
  return f;
}

TestFunction zero_function(int dim) {
  TestFunction f;
  f.eval = [](const Point&) { return 0.0; };
  f.support = Box::cube(dim, 0.0);
  f.zero = true;
  f.label = "zero";
  return f;
}

TestFunction scaled(const TestFunction& f, double t) {
  require(t >= 0.0, "scaled: factor must be non-negative");
  TestFunction g = f;
  auto inner = f.eval;
  g.eval = [inner, t](const Point& x) { return t * inner(x); };
  g.zero = f.zero || t == 0.0;
  return g;
}

GridQuadrature support_grid(const TestFunction& f, int nodes_per_dim) {
  require(nodes_per_dim >= 1, "support_grid: need at least one node");
  return restrict_grid(tensor_gauss_legendre(f.support, nodes_per_dim), [&f](const Point& x) { return f(x) > 0.0; });
}

DiscretizedOperator discretize(const GridQuadrature& grid,
                               const std::function<double(const Point&, const Point&)>& kernel) {
  const int n = grid.size();
  DiscretizedOperator op{grid, Eigen::MatrixXd(n, n)};
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      const double v = sw(i) * kernel(grid.points.col(i), grid.points.col(j)) * sw(j);
      op.entries(i, j) = v;
      op.entries(j, i) = v;
    }
  return op;
}

PowerSums power_sums(const TrapParams& trap, int n_max, double rho) {
  trap.validate();
  require(n_max >= 0, "power_sums: negative n_max");
  PowerSums ps;
  ps.p.assign(n_max + 1, 0.0);
  for (int k = 1; k <= n_max; ++k)
    ps.p[k] = std::pow(rho, k) * std::pow(-std::expm1(-k * trap.beta / trap.kappa), -trap.dim);
  return ps;
}

PowerSums power_sums(const Eigen::MatrixXd& symmetric, int n_max) {
  require(symmetric.rows() == symmetric.cols(), "power_sums: matrix must be square");
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(symmetric, Eigen::EigenvaluesOnly).eigenvalues();
  PowerSums ps;
  ps.p.assign(n_max + 1, 0.0);
  Eigen::VectorXd pw = Eigen::VectorXd::Ones(ev.size());
  for (int k = 1; k <= n_max; ++k) {
    pw = pw.cwiseProduct(ev);
    ps.p[k] = pw.sum();
  }
  return ps;
}

cplx log_fredholm_det(const std::vector<EigenLevel>& levels, cplx z) {
  cplx acc = 0.0;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it)
    acc += static_cast<double>(it->degeneracy) * std::log(1.0 - z * it->eigenvalue);
  return acc;
}

cplx fredholm_det(const std::vector<EigenLevel>& levels, cplx z) { return std::exp(log_fredholm_det(levels, z)); }

cplx fredholm_det(const Eigen::MatrixXd& m, cplx z) {
  require(m.rows() == m.cols(), "fredholm_det: matrix must be square");
  if (m.size() == 0) return 1.0;
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m.rows(), m.cols()) - z * m.cast<cplx>();
  return a.partialPivLu().determinant();
}

cplx fredholm_det(const DiscretizedOperator& op, cplx z) { return fredholm_det(op.entries, z); }

std::vector<double> complete_homogeneous(const PowerSums& ps, int n) {
  if (n < 0) throw DomainError("complete_homogeneous: n must be non-negative");
  require(ps.n_max() >= n, "complete_homogeneous: not enough power sums");
  std::vector<double> h(n + 1, 0.0);
  h[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= m; ++k) acc += ps.p[k] * h[m - k];
    h[m] = acc / m;
  }
  return h;
}

double sym_trace_hn(const PowerSums& ps, int n) {
  if (n < 0) throw DomainError("sym_trace_hn: n must be non-negative");
  return complete_homogeneous(ps, n)[n];
}

namespace {

double spectral_radius(const Eigen::MatrixXd& J) {
  const Eigen::VectorXcd ev = J.eigenvalues();
  return ev.cwiseAbs().maxCoeff();
}

} // namespace

VereJones vere_jones_check(const Eigen::MatrixXd& J, int n) {
  require(J.rows() == J.cols(), "vere_jones_check: matrix must be square");
  require(n >= 0 && n <= 6, "vere_jones_check: n must lie in 0..6");
  if (J.size() > 0 && spectral_radius(J) >= 1.0) throw ContractViolation("vere_jones_check: spectral radius >= 1");
  const int m = static_cast<int>(J.rows());
  VereJones out;
  out.rhs = sym_trace_hn(power_sums(J, n), n);
  // odometer over all n-tuples of indices
  std::vector<int> idx(n, 0);
  Eigen::MatrixXd minor(n, n);
  double sum = 0.0;
  while (true) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) minor(a, b) = J(idx[a], idx[b]);
    sum += permanent(minor);
    int pos = 0;
    while (pos < n && ++idx[pos] == m) idx[pos++] = 0;
    if (pos == n) break;
  }
  out.lhs = sum / std::tgamma(n + 1.0);
  return out;
}

double vere_jones_contour(const Eigen::MatrixXd& J, int n, int points) {
  require(n >= 0 && points > n, "vere_jones_contour: need points > n >= 0");
  const double rad = spectral_radius(J);
  if (rad >= 1.0) throw ContractViolation("vere_jones_contour: spectral radius >= 1");
  const double R = rad > 0.0 ? 0.9 / rad : 1.0;
  cplx acc = 0.0;
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * pi * j / points;
    const cplx z = std::polar(R, th);
    acc += std::polar(std::pow(R, -n), -n * th) / fredholm_det(J, z);
  }
  return acc.real() / points;
}

XiResult log_xi_from_power_sums(const std::function<double(int)>& scaled_pk, double rho, double beta, double mu,
                                double a, int n_max, double tail_tol) {
  require(rho > 0.0 && a > 0.0, "log_xi_from_power_sums: need rho > 0 and a > 0");
  const bool automatic = n_max <= 0;
  const int cap = automatic ? 2000000 : n_max;
  const double lin = beta * mu - std::log(rho);
  std::vector<double> p{0.0}, h{1.0}, logt{0.0};
  double peak = 0.0;
  auto certify = [&](int n, double& rel) {
    // term ratios are nonincreasing (h_n is log-concave, the Gaussian factor too)
    if (n < 1) return false;
    const double lratio = logt[n] - logt[n - 1];
    if (!(lratio < 0.0)) return false;
    const double ratio = std::exp(lratio);
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) sum += std::exp(logt[k] - peak);
    rel = std::exp(logt[n] - peak) * ratio / (1.0 - ratio) / sum;
    return rel < tail_tol;
  };
  XiResult res;
  double rel = 1.0;
  int n = 0;
  for (n = 1; n <= cap; ++n) {
    p.push_back(scaled_pk(n));
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += p[k] * h[n - k];
    h.push_back(acc / n);
    const double lt = (h[n] > 0.0 ? std::log(h[n]) : -std::numeric_limits<double>::infinity()) + lin * n -
                      0.5 * a * static_cast<double>(n) * n;
    logt.push_back(lt);
    peak = std::max(peak, lt);
    // cheap pre-check before the full certificate
    if (automatic && lt < peak - 40.0 && lt < logt[n - 1] && certify(n, rel)) break;
  }
  if (n > cap) n = cap;
  if (!automatic && !certify(n, rel))
    throw ContractViolation("xi_bruteforce: n_max = " + std::to_string(n_max) + " too small for a certified tail");
  if (automatic && !(rel < tail_tol)) throw ContractViolation("xi_bruteforce: tail could not be certified");
  double sum = 0.0;
  for (int k = n; k >= 0; --k) sum += std::exp(logt[k] - peak);
  res.log_xi = peak + std::log(sum);
  res.n_max = n;
  res.tail_bound = rel;
  return res;
}

XiResult log_xi_bruteforce(const TrapParams& trap, double mu, double lambda, int n_max) {
  trap.validate();
  require(lambda > 0.0, "xi_bruteforce: lambda must be positive");
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  const double rho = fp.r;
  const double a = trap.beta * lambda / trap.volume();
  auto pk = [&](int k) { return std::pow(rho, k) * std::pow(-std::expm1(-k * trap.beta / trap.kappa), -trap.dim); };
  return log_xi_from_power_sums(pk, rho, trap.beta, mu, a, n_max);
}

double xi_bruteforce(const TrapParams& trap, double mu, double lambda, int n_max) {
  return std::exp(log_xi_bruteforce(trap, mu, lambda, n_max).log_xi);
}

double log_xi_saddle_normal(const TrapParams& trap, double mu, double lambda) {
  if (classify_phase(trap.beta, mu, lambda, trap.dim) != PhaseLabel::Normal)
    throw PhaseError("xi_saddle_normal: parameters are not in the normal phase");
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  const double lr = std::log1p(-fp.one_minus_r);
  const double vol = trap.volume();
  const double gauss = vol * std::pow(trap.beta * mu - lr, 2) / (2.0 * trap.beta * lambda);
  const double sq = SpectralSums::occupation_sq(trap, lr, fp.max_level);
  return gauss - 0.5 * std::log1p(trap.beta * lambda * sq / vol) - SpectralSums::log_det(trap, lr, fp.max_level);
}

double log_xi_saddle_condensed(const TrapParams& trap, double mu, double lambda) {
  if (trap.dim <= 2) throw DomainError("xi_saddle_condensed: needs d > 2");
  if (classify_phase(trap.beta, mu, lambda, trap.dim) != PhaseLabel::Condensed)
    throw PhaseError("xi_saddle_condensed: parameters are not in the condensed phase");
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  const double lr = std::log1p(-fp.one_minus_r);
  const double vol = trap.volume();
  const double d = trap.dim;
  const double den = std::pow(trap.beta, d) * mu - zeta(d) * lambda;
  return 0.5 * std::log(2.0 * pi * trap.beta * lambda / vol) - 1.0 + (d - 1.0) * std::log(trap.beta) +
         vol * std::pow(trap.beta * mu - lr, 2) / (2.0 * trap.beta * lambda) - std::log(den) -
         SpectralSums::log_det(trap, lr, fp.max_level);
}

double xi_saddle_normal(const TrapParams& trap, double mu, double lambda) {
  return std::exp(log_xi_saddle_normal(trap, mu, lambda));
}

double xi_saddle_condensed(const TrapParams& trap, double mu, double lambda) {
  return std::exp(log_xi_saddle_condensed(trap, mu, lambda));
}

double local_density_rstar(double beta, double r, int dim) {
  const Point o = Point::Zero(dim);
  return resolvent_kernel(r, FlatParams{beta, dim}, o, o, 1e-17);
}

double ground_state_ratio(const TrapParams& trap, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("ground_state_ratio: r must lie in (0,1)");
  const int M = adaptive_truncation(trap, 1e-16).max_level;
  const double lr = std::log(r);
  double q_part = 0.0;
  for (int m = M; m >= 1; --m)
    q_part += static_cast<double>(degeneracy(m, trap.dim)) * std::log(-std::expm1(lr - trap.beta * m / trap.kappa));
  return std::exp(SpectralSums::log_det(trap, lr, M) - q_part);
}

} // namespace wht
