#include "wht/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wht {

namespace {

// e^{lr + ix} - 1 without cancellation near z = 1
cplx cexpm1(double lr, double x) {
  const double h = std::sin(0.5 * x);
  return {std::expm1(lr) * std::cos(x) - 2.0 * h * h, std::exp(lr) * std::sin(x)};
}

void axpy(Eigen::MatrixXd& y, double a, const Eigen::MatrixXd& x) { y.noalias() += a * x; }
void axpy(Eigen::MatrixXcd& y, cplx a, const Eigen::MatrixXd& x) {
  y.real().noalias() += a.real() * x;
  y.imag().noalias() += a.imag() * x;
}

// 1D tables of a separable kernel on the grid axes, then the products over node pairs.
template <class K1>
void separable_fill(const GridQuadrature& g, const Eigen::VectorXd& scale, K1&& k1, Eigen::MatrixXd& out) {
  const int d = g.dim(), n = g.size();
  std::vector<Eigen::MatrixXd> tab(d);
  for (int c = 0; c < d; ++c) {
    const auto& ax = g.axes[c];
    tab[c].resize(ax.size(), ax.size());
    for (int j = 0; j < ax.size(); ++j)
      for (int i = j; i < ax.size(); ++i) tab[c](i, j) = tab[c](j, i) = k1(ax(i), ax(j));
  }
  out.resize(n, n);
  for (int b = 0; b < n; ++b)
    for (int a = b; a < n; ++a) {
      double v = scale(a) * scale(b);
      for (int c = 0; c < d; ++c) v *= tab[c](g.index(c, a), g.index(c, b));
      out(a, b) = v;
    }
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
}

} // namespace

int default_nodes(int dim) { return dim <= 2 ? 24 : 12; }

SupportGrid::SupportGrid(const TestFunction& f, int nodes_per_dim) {
  grid = support_grid(f, nodes_per_dim > 0 ? nodes_per_dim : default_nodes(f.dim()));
  root_wv.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double v = -std::expm1(-f(grid.points.col(i)));
    root_wv(i) = std::sqrt(grid.weights(i) * v);
  }
  mass = root_wv.squaredNorm();
}

Eigen::MatrixXd flat_resolvent(const SupportGrid& sg, double beta, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("flat_resolvent: r must lie in (0,1)");
  const int d = sg.grid.dim(), n = sg.size();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n), term;
  double rn = 1.0;
  for (int k = 1;; ++k) {
    rn *= r;
    const double t = k * beta;
    separable_fill(sg.grid, sg.root_wv, [t](double x, double y) { return heat_1d(t, x, y); }, term);
    acc += rn * term;
    const double sup = std::pow(2.0 * pi * (k + 1) * beta, -0.5 * d);
    if (sup * sg.mass * rn * r / (1.0 - r) < 1e-17) break;
  }
  return acc;
}

Eigen::MatrixXd flat_green(const SupportGrid& sg, double beta) {
  const int d = sg.grid.dim(), n = sg.size();
  if (d <= 2) throw DivergenceError("flat_green: sum of G^n is not trace class for d <= 2");
  const int direct = 200;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n), term;
  for (int k = 1; k <= direct; ++k) {
    const double t = k * beta;
    separable_fill(sg.grid, sg.root_wv, [t](double x, double y) { return heat_1d(t, x, y); }, term);
    acc += term;
  }
  // sum_{k > direct} (2 pi k beta)^{-d/2} e^{-c/k}, c = |x-y|^2 / 2beta, by the midpoint
  // Euler-Maclaurin rule: integral from A = direct + 1/2 (lower incomplete gamma) plus f'(A)/24.
  const double A = direct + 0.5, ap = 0.5 * d - 1.0, pre = std::pow(2.0 * pi * beta, -0.5 * d);
  for (int b = 0; b < n; ++b)
    for (int a = b; a < n; ++a) {
      const double c = (sg.grid.points.col(a) - sg.grid.points.col(b)).squaredNorm() / (2.0 * beta);
      const double w = c / A;
      double sum = 0.0, term_k = 1.0 / ap;
      for (int k = 0; k < 200; ++k) {
        if (k > 0) term_k *= w / (ap + k);
        sum += term_k;
        if (term_k < 1e-18 * sum) break;
      }
      const double integral = pre * std::pow(A, -ap) * std::exp(-w) * sum;
      const double fprime = pre * std::exp(-c / A) * std::pow(A, -0.5 * d) * (c / (A * A) - 0.5 * d / A);
      const double v = sg.root_wv(a) * sg.root_wv(b) * (integral + fprime / 24.0);
      acc(a, b) += v;
      if (a != b) acc(b, a) += v;
    }
  return acc;
}

SupportOperator::SupportOperator(const TrapParams& trap, const TestFunction& f, int nodes_per_dim)
    : trap_(trap), sg_(f, nodes_per_dim) {
  trap.validate();
  require(f.dim() == trap.dim, "SupportOperator: dimension mismatch");
  const auto& g = sg_.grid;
  axis_omega_.resize(trap.dim);
  for (int c = 0; c < trap.dim; ++c) {
    axis_omega_[c].resize(g.axes[c].size());
    for (int i = 0; i < g.axes[c].size(); ++i) axis_omega_[c](i) = ground_state_1d(trap.kappa, g.axes[c](i));
  }
  omega_.resize(size());
  for (int a = 0; a < size(); ++a) {
    double v = 1.0;
    for (int c = 0; c < trap.dim; ++c) v *= axis_omega_[c](g.index(c, a));
    omega_(a) = v;
  }
  u_ = sg_.root_wv.cwiseProduct(omega_);
}

template <class S>
std::vector<Eigen::Matrix<S, -1, -1>> SupportOperator::q_resolvent(const std::vector<S>& zs,
                                                                 std::vector<Eigen::Matrix<S, -1, -1>>* deriv) const {
  using Mat = Eigen::Matrix<S, -1, -1>;
  const int n = size(), nz = static_cast<int>(zs.size());
  const double g1 = trap_.q();
  std::vector<double> rho(nz);
  for (int k = 0; k < nz; ++k) {
    rho[k] = std::abs(zs[k]) * g1;
    if (!(rho[k] < 1.0)) throw DomainError("q_resolvent: |z| must stay below e^{beta/kappa}");
  }
  std::vector<Mat> out(nz, Mat::Zero(n, n));
  if (deriv) deriv->assign(nz, Mat::Zero(n, n));
  if (n == 0) return out;
  std::vector<S> zn(nz, S(1.0)), znm1(nz, S(1.0));
  const Eigen::VectorXd& sw = sg_.root_wv;
  Eigen::MatrixXd K;
  double tr_bound = std::numeric_limits<double>::infinity();
  for (int m = 1;; ++m) {
    const double t = m * trap_.beta;
    const double kap = trap_.kappa;
    separable_fill(sg_.grid, sw, [kap, t](double x, double y) { return mehler_1d(kap, t, x, y); }, K);
    // remove the ground-state part
    const Eigen::VectorXd so = sw.cwiseProduct(omega_);
    K.noalias() -= so * so.transpose();
    // Tr T_{m+1} <= g_1 Tr T_m; this keeps rounding noise in G^m - Omega Omega out of the bound
    tr_bound = std::min(std::max(0.0, K.trace()), tr_bound * g1);
    const double tr = tr_bound;
    double worst = 0.0;
    for (int k = 0; k < nz; ++k) {
      znm1[k] = zn[k];
      zn[k] *= zs[k];
      axpy(out[k], zn[k], K);
      if (deriv) axpy((*deriv)[k], static_cast<double>(m) * znm1[k], K);
      const double az = std::abs(zs[k]);
      const double r = rho[k];
      const double azn = std::abs(zn[k]);
      double tail = azn * tr * r / (1.0 - r);
      if (deriv && az > 0.0) tail = std::max(tail, azn / az * tr * (m * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r))));
      worst = std::max(worst, tail);
    }
    if (worst < tol || m > 50000000) break;
  }
  return out;
}

template std::vector<Eigen::MatrixXd> SupportOperator::q_resolvent<double>(const std::vector<double>&,
                                                                         std::vector<Eigen::MatrixXd>*) const;
template std::vector<Eigen::MatrixXcd> SupportOperator::q_resolvent<cplx>(const std::vector<cplx>&,
                                                                        std::vector<Eigen::MatrixXcd>*) const;

std::vector<QValues> q_values(const SupportOperator& op, const std::vector<cplx>& zs) {
  const int n = op.size();
  std::vector<QValues> out;
  out.reserve(zs.size());
  // bound the memory held by one sweep
  const std::size_t per = static_cast<std::size_t>(n) * n * sizeof(cplx) + 1;
  const std::size_t batch = std::max<std::size_t>(1, (std::size_t(256) << 20) / per);
  const Eigen::VectorXcd u = op.ground_vector().cast<cplx>();
  for (std::size_t start = 0; start < zs.size(); start += batch) {
    std::vector<cplx> part(zs.begin() + start, zs.begin() + std::min(zs.size(), start + batch));
    auto mats = op.q_resolvent(part);
    for (auto& m : mats) {
      m.diagonal().array() += 1.0;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
      out.push_back({lu.determinant(), u.dot(lu.solve(u))});
    }
  }
  return out;
}

TopEigen top_eigen(const SupportOperator& op) {
  const TrapParams& trap = op.trap();
  const double zmax = std::exp(trap.beta / trap.kappa);
  const Eigen::VectorXd& u = op.ground_vector();
  TopEigen te;
  double z = 1.0;
  for (int it = 0; it < 12; ++it) {
    std::vector<Eigen::MatrixXd> dA;
    auto A = op.q_resolvent<double>({z}, &dA);
    A[0].diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A[0]);
    const Eigen::VectorXd cu = lu.solve(u);
    const double q = u.dot(cu);
    const double dq = -cu.dot(dA[0] * cu);
    const double log_dq = std::log(lu.determinant());
    const double dlog_dq = lu.solve(dA[0]).trace();
    const double phi = 1.0 - z + z * q;
    const double dphi = -1.0 + q + z * dq;
    double dz = -phi / dphi;
    ++te.passes;
    const bool done = std::abs(dz) < 1e-10 * std::max(z - 1.0, 1e-300) || it == 11;
    if (done || !(z + dz < zmax && z + dz > 1.0)) {
      if (!done) {
        // Newton left the bracket; halve towards the bound instead
        dz = (dz > 0.0 ? 0.5 * (zmax - z) : 0.5 * (1.0 - z));
        z += dz;
        continue;
      }
      te.z0 = z + dz;
      te.q0 = q + dq * dz;
      te.dq0 = dq;
      te.log_dq0 = log_dq + dlog_dq * dz;
      break;
    }
    z += dz;
  }
  if (!(te.z0 > 1.0 && te.z0 < zmax)) throw ContractViolation("top_eigen: no isolated top eigenvalue");
  SpectralModel spec(trap);
  te.log_det_prime = spec.log_det_q(std::log(te.z0)) + te.log_dq0 + std::log(1.0 - te.z0 * te.z0 * te.dq0);
  return te;
}

TildeModel::TildeModel(const SupportOperator& op) : op_(op), spec_(op.trap()) {}

const TopEigen& TildeModel::top() {
  if (!have_top_) {
    top_ = top_eigen(op_);
    have_top_ = true;
  }
  return top_;
}

double TildeModel::log_top() { return -std::log(top().z0); }

QValues TildeModel::at_real(double log_r) {
  auto it = real_cache_.find(log_r);
  if (it != real_cache_.end()) return it->second;
  const double z = std::exp(log_r);
  auto A = op_.q_resolvent<double>({z});
  A[0].diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A[0]);
  const Eigen::VectorXd& u = op_.ground_vector();
  QValues v{lu.determinant(), u.dot(lu.solve(u))};
  real_cache_[log_r] = v;
  return v;
}

void TildeModel::prepare_circle(double log_r, double x_max) {
  if (log_r == circle_lr_ && x_max <= circle_x_) return;
  const TrapParams& trap = op_.trap();
  // nearest singularity of R^Q_z: z = e^{beta/kappa}
  const double delta = trap.beta / trap.kappa - log_r;
  const int panels = std::max(1, static_cast<int>(std::ceil(x_max / delta)));
  panel_h_ = 0.5 * x_max / panels;
  const double ratio = delta / panel_h_;
  const double bern = ratio + std::sqrt(1.0 + ratio * ratio);
  panel_n_ = std::clamp(static_cast<int>(std::ceil(36.0 / std::log(bern))) + 1, 4, 48);
  std::vector<cplx> zs;
  for (int p = 0; p < panels; ++p)
    for (int j = 0; j < panel_n_; ++j) {
      const double x = (2 * p + 1) * panel_h_ - panel_h_ * std::cos(pi * j / (panel_n_ - 1));
      zs.push_back(std::exp(cplx(log_r, x)));
    }
  const auto vals = q_values(op_, zs);
  panels_.assign(panels, {});
  for (int p = 0; p < panels; ++p) panels_[p].assign(vals.begin() + p * panel_n_, vals.begin() + (p + 1) * panel_n_);
  circle_lr_ = log_r;
  circle_x_ = x_max;
}

QValues TildeModel::at(double log_r, double x) {
  const bool conj = x < 0.0;
  const double ax = std::abs(x);
  QValues v;
  if (log_r == circle_lr_ && ax <= circle_x_) {
    const int p = std::min(static_cast<int>(panels_.size()) - 1, static_cast<int>(ax / (2.0 * panel_h_)));
    const double t = (ax - (2 * p + 1) * panel_h_) / panel_h_;  // in [-1,1]
    // barycentric interpolation on the second-kind points -cos(pi j/(n-1))
    cplx num_d = 0.0, num_q = 0.0;
    double den = 0.0;
    const int n = panel_n_;
    for (int j = 0; j < n; ++j) {
      const double tj = -std::cos(pi * j / (n - 1));
      double w = (j % 2 ? -1.0 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      if (t == tj) {
        v = panels_[p][j];
        den = -1.0;
        break;
      }
      w /= (t - tj);
      num_d += w * panels_[p][j].dq;
      num_q += w * panels_[p][j].q;
      den += w;
    }
    if (den != -1.0) v = {num_d / den, num_q / den};
  } else {
    v = q_values(op_, {std::exp(cplx(log_r, ax))})[0];
  }
  if (conj) v = {std::conj(v.dq), std::conj(v.q)};
  return v;
}

cplx TildeModel::log_det_ratio(double log_r, double x) {
  const QValues v = at(log_r, x);
  const QValues v0 = at_real(log_r);
  const cplx z = std::exp(cplx(log_r, x));
  const double r = std::exp(log_r);
  const cplx phi = -cexpm1(log_r, x) + z * v.q;
  const double phi0 = -std::expm1(log_r) + r * v0.q.real();
  return spec_.log_det_ratio_q(log_r, x) + std::log(v.dq / v0.dq.real()) + std::log(phi / phi0);
}

double TildeModel::log_det(double log_r) {
  const QValues v = at_real(log_r);
  const double phi = -std::expm1(log_r) + std::exp(log_r) * v.q.real();
  if (!(phi > 0.0)) throw DomainError("TildeModel::log_det: r beyond the first pole");
  return spec_.log_det_q(log_r) + std::log(v.dq.real()) + std::log(phi);
}

double TildeModel::log_det_reduced(double log_z) {
  const TopEigen& te = top();
  const double lz0 = std::log(te.z0);
  if (std::abs(log_z - lz0) < 1e-12 * std::abs(lz0)) return te.log_det_prime;
  const QValues v = at_real(log_z);
  const double z = std::exp(log_z);
  const double phi = -std::expm1(log_z) + z * v.q.real();
  return spec_.log_det_q(log_z) + std::log(v.dq.real()) + std::log(phi / (1.0 - z / te.z0));
}

PowerSums power_sums_tilde(const SupportOperator& op, int n_max) {
  require(n_max >= 1, "power_sums_tilde: n_max must be positive");
  int J = 256;
  while (J < 4 * n_max) J *= 2;
  const double lrc = -30.0 / J;
  // upper half circle; the lower half is the conjugate
  std::vector<cplx> zs;
  for (int j = 0; j <= J / 2; ++j) zs.push_back(std::exp(cplx(lrc, 2.0 * pi * j / J)));
  const auto vals = q_values(op, zs);
  std::vector<cplx> logd(J);
  double prev_im = 0.0;
  for (int j = 0; j <= J / 2; ++j) {
    const double x = 2.0 * pi * j / J;
    const cplx one_minus_z = -cexpm1(lrc, x);
    cplx l = std::log(vals[j].dq) + std::log((one_minus_z + zs[j] * vals[j].q) / one_minus_z);
    // unwrap along the circle
    double im = l.imag();
    while (im - prev_im > pi) im -= 2.0 * pi;
    while (im - prev_im < -pi) im += 2.0 * pi;
    // D is positive on the real axis, and log D has no winding on this circle
    if (j == 0) im = 0.0;
    if (j == J / 2) {
      if (std::abs(im) > 1.0) throw ContractViolation("power_sums_tilde: phase unwrapping failed");
      im = 0.0;
    }
    prev_im = im;
    logd[j] = {l.real(), im};
    if (j > 0 && j < J / 2) logd[J - j] = std::conj(logd[j]);
  }
  PowerSums ps = power_sums(op.trap(), n_max);
  for (int k = 1; k <= n_max; ++k) {
    double ak = 0.0;
    for (int j = 0; j < J; ++j) ak += (logd[j] * std::polar(1.0, -2.0 * pi * static_cast<double>(j) * k / J)).real();
    ak = ak / J * std::exp(-lrc * k);
    ps.p[k] -= k * ak;
  }
  return ps;
}

XiResult log_xi_bruteforce(const TrapParams& trap, double mu, double lambda, const TestFunction& f, int n_max,
                           int nodes_per_dim) {
  if (f.zero) return log_xi_bruteforce(trap, mu, lambda, n_max);
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  const int cap = n_max > 0 ? n_max : log_xi_bruteforce(trap, mu, lambda).n_max + 64;
  SupportOperator op(trap, f, nodes_per_dim);
  const PowerSums ps = power_sums_tilde(op, cap);
  const double rho = fp.r;
  auto pk = [&](int k) {
    if (k > cap) throw ContractViolation("xi_bruteforce: n_max too small for a certified tail");
    return std::pow(rho, k) * ps.p[k];
  };
  return log_xi_from_power_sums(pk, rho, trap.beta, mu, trap.beta * lambda / trap.volume(), n_max);
}

double log_genfun_finite(const TrapParams& trap, double mu, double lambda, const TestFunction& f,
                         const GenfunOptions& opt) {
  require(f.dim() == trap.dim, "genfun_finite: dimension mismatch");
  if (f.zero) return 0.0;
  GenfunMethod m = opt.method;
  if (m == GenfunMethod::automatic) m = trap.volume() <= 64.0 ? GenfunMethod::bruteforce : GenfunMethod::contour;
  if (m == GenfunMethod::bruteforce)
    return log_xi_bruteforce(trap, mu, lambda, f, opt.n_max, opt.nodes_per_dim).log_xi -
           log_xi_bruteforce(trap, mu, lambda, opt.n_max).log_xi;
  const FixedPoint fp = solve_fixed_point(trap, mu, lambda);
  const double a = trap.beta * lambda / trap.volume();
  const double lr = std::log1p(-fp.one_minus_r);
  SupportOperator op(trap, f, opt.nodes_per_dim);
  TildeModel tilde(op);
  SpectralModel plain(trap);
  return log_xi_contour(tilde, trap.beta, mu, a, lr).log_xi - log_xi_contour(plain, trap.beta, mu, a, lr).log_xi;
}

double genfun_finite(const TrapParams& trap, double mu, double lambda, const TestFunction& f,
                     const GenfunOptions& opt) {
  return std::exp(log_genfun_finite(trap, mu, lambda, f, opt));
}

double genfun_normal_limit(double beta, double r_star, int dim, const TestFunction& f, int nodes_per_dim) {
  if (!(r_star > 0.0 && r_star < 1.0)) throw DomainError("genfun_normal_limit: r_* must lie in (0,1)");
  require(f.dim() == dim, "genfun_normal_limit: dimension mismatch");
  if (f.zero) return 1.0;
  const SupportGrid sg(f, nodes_per_dim);
  Eigen::MatrixXd m = flat_resolvent(sg, beta, r_star);
  m.diagonal().array() += 1.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  const double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::exp(-ld);
}

DiscretizedOperator build_Kf(double beta, int dim, const TestFunction& f, int nodes_per_dim) {
  if (dim <= 2) throw DivergenceError("build_Kf: K_f is not trace class for d <= 2");
  require(f.dim() == dim, "build_Kf: dimension mismatch");
  const SupportGrid sg(f, nodes_per_dim);
  if (f.zero || sg.size() == 0) return {sg.grid, Eigen::MatrixXd::Zero(sg.size(), sg.size())};
  return {sg.grid, flat_green(sg, beta)};
}

namespace {

double inverse_form(const Eigen::MatrixXd& K, const Eigen::VectorXd& b) {
  if (b.size() == 0) return 0.0;
  Eigen::MatrixXd m = K;
  m.diagonal().array() += 1.0;
  return b.dot(m.ldlt().solve(b));
}

} // namespace

double condensed_rate_functional(double beta, double mu, double lambda, int dim, const TestFunction& f,
                                 int nodes_per_dim) {
  if (dim <= 2) throw DomainError("condensed_rate_functional: needs d > 2");
  if (classify_phase(beta, mu, lambda, dim) != PhaseLabel::Condensed)
    throw PhaseError("condensed_rate_functional: parameters are not in the condensed phase");
  if (f.zero) return 0.0;
  const SupportGrid sg(f, nodes_per_dim);
  const double form = inverse_form(flat_green(sg, beta), sg.root_wv);
  return -(mu - mu_crit(beta, lambda, dim)) / (std::pow(pi, 0.5 * dim) * lambda) * form;
}

Eigengap eigengap_check(const TrapParams& trap, const TestFunction& f, int nodes_per_dim) {
  if (trap.dim <= 2) throw DomainError("eigengap_check: needs d > 2");
  Eigengap out;
  if (f.zero) return out;
  SupportOperator op(trap, f, nodes_per_dim);
  const TopEigen te = top_eigen(op);
  const auto& sg = op.support();
  out.g0_tilde = 1.0 / te.z0;
  out.lhs = std::pow(pi * trap.kappa, 0.5 * trap.dim) * te.q0;
  out.rhs = inverse_form(op.q_resolvent<double>({1.0})[0], sg.root_wv);
  out.rhs_flat = inverse_form(flat_green(sg, trap.beta), sg.root_wv);
  out.upper = sg.mass;
  return out;
}

double expectation_from_genfun(const std::function<double(const TestFunction&)>& genfun, const TestFunction& f,
                               double h) {
  require(h > 0.0, "expectation_from_genfun: step must be positive");
  if (f.zero) return 0.0;
  auto E = [&](double t) { return -std::log(genfun(scaled(f, t))) / t; };
  return 2.0 * E(0.5 * h) - E(h);
}

} // namespace wht
