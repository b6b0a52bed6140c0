#include "wht/checks.hpp"

#include "wht/nystrom.hpp"
#include "wht/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wht {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

// random symmetric matrix with eigenvalues in [0, top], the largest equal to top
Eigen::MatrixXd random_psd(std::mt19937_64& gen, int n, double top) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, top);
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = nd(gen);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev(i) = ud(gen);
  ev(0) = top;
  Eigen::MatrixXd a = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

} // namespace

CheckResult check_semigroup(double kappa, double beta1, double beta2, double tol) {
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double x = -3.0 + 1.5 * i, y = -3.0 + 1.5 * j;
      auto integrand = [&](double z) { return mehler_1d(kappa, beta1, x, z) * mehler_1d(kappa, beta2, z, y); };
      const double L = 40.0 * std::sqrt(kappa);
      const double lhs = integrate_adaptive_real(integrand, -L, L, 1e-300, 1e-13);
      Point px(1), py(1);
      px << x;
      py << y;
      const double rhs = mehler_kernel(TrapParams{kappa, beta1 + beta2, 1}, beta1 + beta2, px, py);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  return {"semigroup", worst < tol, tol - worst, "max rel err " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

CheckResult check_trace_identity(int dim, double kappa, double beta, double tol) {
  const TrapParams trap{kappa, beta, dim};
  const double u = beta / kappa;
  const double width = std::sqrt(kappa / std::tanh(0.5 * u));
  const GridQuadrature g = tensor_gauss_legendre(Box::cube(dim, 12.0 * width), dim == 1 ? 200 : 100);
  const double tr = integrate(g, [&](const Point& x) { return mehler_kernel(trap, beta, x, x); });
  const double exact = std::pow(-std::expm1(-u), -dim);
  const double err = std::abs(tr - exact) / exact;
  return {"trace d=" + std::to_string(dim) + " kappa=" + fmt(kappa), err < tol, tol - err,
          "rel err " + fmt(err) + " (tol " + fmt(tol) + ")"};
}

CheckResult check_vere_jones(std::uint64_t seed, double tol) {
  std::mt19937_64 gen(seed);
  const Eigen::MatrixXd J = random_psd(gen, 5, 0.8);
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const VereJones vj = vere_jones_check(J, n);
    worst = std::max(worst, std::abs(vj.lhs - vj.rhs) / std::abs(vj.rhs));
  }
  return {"vere-jones", worst < tol, tol - worst, "max rel err " + fmt(worst) + " over n=1..4"};
}

CheckResult check_det_bound(std::uint64_t seed, int draws, double tol) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-pi, pi), ur(0.01, 0.999), uk(0.5, 20.0), u01(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < draws; ++k) {
    const double x = ux(gen), r = ur(gen);
    const cplx e = std::polar(1.0, x) - 1.0;
    double lmod = 0.0;
    if (k % 2 == 0) {
      // trap spectrum of r G
      const TrapParams trap{uk(gen), 1.0, 1 + static_cast<int>(u01(gen) * 3.0) % 3};
      for (const EigenLevel& l : spectrum_levels(trap, adaptive_truncation(trap, 1e-14))) {
        const double a = r * l.eigenvalue;
        lmod += static_cast<double>(l.degeneracy) * std::log(std::abs(1.0 - e * a / (1.0 - a)));
      }
    } else {
      // random PSD matrix of norm r
      const int n = 2 + static_cast<int>(u01(gen) * 7.0);
      const Eigen::MatrixXd A = random_psd(gen, n, r);
      const Eigen::MatrixXd B = A * (Eigen::MatrixXd::Identity(n, n) - A).inverse();
      const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n) - e * B.cast<cplx>();
      lmod = std::log(std::abs(M.determinant()));
    }
    worst = std::min(worst, std::exp(lmod));
  }
  const bool ok = worst >= 1.0 - tol;
  return {"det bound", ok, worst - (1.0 - tol), "min |Det| " + fmt(worst) + " over " + std::to_string(draws) + " draws"};
}

CheckResult check_hn_duality(double tol) {
  std::mt19937_64 gen(17);
  const Eigen::MatrixXd J = random_psd(gen, 6, 0.7);
  const PowerSums ps = power_sums(J, 8);
  const std::vector<double> h = complete_homogeneous(ps, 8);
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) worst = std::max(worst, std::abs(vere_jones_contour(J, n) - h[n]) / h[n]);
  // number distribution both ways for the trap at kappa = 1
  const TrapParams trap{1.0, 1.0, 3};
  const NumberDistribution a = number_distribution(trap, 0.0, 1.0, 12);
  const NumberDistribution b = number_distribution_dual(trap, 0.0, 1.0, 12);
  for (int n = 0; n <= 12; ++n) worst = std::max(worst, std::abs(a.weights[n] - b.weights[n]));
  return {"h_n / det duality", worst < tol, tol - worst, "max err " + fmt(worst)};
}

CheckResult check_eigengap_trend(const std::vector<double>& kappas) {
  const TestFunction f = bump_function(Point::Zero(3), 1.0, 1.0);
  bool ok = true;
  double prev = std::numeric_limits<double>::infinity(), margin = std::numeric_limits<double>::infinity();
  std::string detail;
  for (double k : kappas) {
    const Eigengap e = eigengap_check(TrapParams{k, 1.0, 3}, f);
    const double gap = std::abs(e.lhs - e.rhs);
    ok = ok && e.lhs >= 0.0 && e.lhs <= e.upper && gap < prev;
    margin = std::min({margin, e.lhs, e.upper - e.lhs, prev - gap});
    detail += "kappa=" + fmt(k) + ": " + fmt(e.lhs) + " vs " + fmt(e.rhs) + "; ";
    prev = gap;
  }
  return {"eigengap trend", ok, margin, detail};
}

std::vector<InequalityCheck> kernel_inequalities(int grid_points, int dim) {
  const double d = dim;
  const double lo = 1e-6, hi = 1e3;
  // relative slack of a few ulps for the floating-point evaluation of both sides
  const double slack = 8.0 * std::numeric_limits<double>::epsilon();
  std::vector<InequalityCheck> out;
  auto run = [&](const std::string& name, const std::vector<double>& xs, auto&& sides) {
    InequalityCheck c{name, 0, 0, std::numeric_limits<double>::infinity()};
    for (double x : xs) {
      for (auto [lhs, rhs] : sides(x)) {
        const double scale = std::max({std::abs(rhs), std::abs(lhs), 1e-300});
        const double m = (rhs - lhs) / scale;
        ++c.points;
        if (m < -slack) ++c.violations;
        c.min_margin = std::min(c.min_margin, m);
      }
    }
    out.push_back(c);
  };
  using Pairs = std::vector<std::pair<double, double>>;
  const auto full = log_grid(lo, hi, grid_points);
  const auto unit = log_grid(lo, 1.0, grid_points);
  const auto above1 = log_grid(1.0, hi, grid_points);

  run("kei1", full, [](double x) {
    const double a = x / -std::expm1(-x);
    return Pairs{{a, 1.0 + x}, {1.0 + x, std::max(2.0, 2.0 * x)}};
  });
  // constants: A by the mean value theorem with 2x/(1-e^{-2x}) - 1 <= 2x, B likewise in u = e^{-2x}
  const double g1 = 2.0 / -std::expm1(-2.0);
  const double A = d * std::max(1.0, std::pow(g1, 0.5 * d - 1.0));
  const double B = 0.5 * d * std::pow(-std::expm1(-2.0), -0.5 * d - 1.0);
  run("kei2", unit, [d, A](double x) {
    const double v = std::expm1(0.5 * d * std::log(2.0 * x / -std::expm1(-2.0 * x)));
    return Pairs{{0.0, v}, {v, A * x}};
  });
  run("kei3", above1, [d, B](double x) {
    const double v = std::expm1(-0.5 * d * std::log1p(-std::exp(-2.0 * x)));
    return Pairs{{0.0, v}, {v, B * std::exp(-2.0 * x)}};
  });
  run("exp1", full, [](double x) { return Pairs{{-std::expm1(-x), x}}; });
  {
    // all ordered pairs x <= y of the grid
    InequalityCheck c{"exp2", 0, 0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < full.size(); ++i)
      for (std::size_t j = i; j < full.size(); ++j) {
        const double x = full[i], y = full[j];
        const double lhs = std::exp(-x) - std::exp(-y), rhs = (y / x - 1.0) / std::exp(1.0);
        const double m = (rhs - lhs) / std::max({std::abs(rhs), std::abs(lhs), 1e-300});
        ++c.points;
        if (m < -slack) ++c.violations;
        c.min_margin = std::min(c.min_margin, m);
      }
    out.push_back(c);
  }
  run("th1", full, [](double x) { return Pairs{{std::tanh(x), std::min(x, 1.0)}}; });
  run("th2", above1, [](double x) {
    const double lhs = 2.0 * std::exp(-2.0 * x) / -std::expm1(-2.0 * x);  // coth x - 1
    return Pairs{{lhs, 2.0 * std::exp(1.0) / (std::exp(1.0) - 1.0) * std::exp(-x)}};
  });
  run("sh1", unit, [](double x) {
    const double s = std::sinh(x) / x;
    return Pairs{{1.0, s}, {s, 1.0 + x * x}};
  });
  run("sh2", above1, [](double x) {
    return Pairs{{1.0 / std::sinh(x), 2.0 / -std::expm1(-2.0) * std::exp(-x)}};
  });
  // log1 only holds for x in [0,1); the grid runs up to 1 - 1e-6
  std::vector<double> below1 = log_grid(lo, 1.0 - 1e-6, grid_points);
  run("log1", below1, [](double x) {
    return Pairs{{std::abs(-std::log1p(-x) - x), x * x / (2.0 * (1.0 - x))}};
  });
  return out;
}

CheckResult check_kernel_inequalities(int grid_points) {
  int viol = 0, pts = 0;
  double margin = std::numeric_limits<double>::infinity();
  std::string detail;
  for (int dim = 1; dim <= 3; ++dim)
    for (const auto& c : kernel_inequalities(grid_points, dim)) {
      if (dim > 1 && c.name != "kei2" && c.name != "kei3") continue;
      viol += c.violations;
      pts += c.points;
      margin = std::min(margin, c.min_margin);
      if (dim == 3 || c.name == "kei2" || c.name == "kei3")
        detail += c.name + (c.name == "kei2" || c.name == "kei3" ? "(d=" + std::to_string(dim) + ")" : "") + ":" +
                  std::to_string(c.violations) + " ";
    }
  return {"kernel inequalities", viol == 0, margin,
          std::to_string(viol) + " violations over " + std::to_string(pts) + " points; " + detail};
}

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(check_semigroup());
  for (int d : {1, 2})
    for (double k : {1.0, 10.0}) out.push_back(check_trace_identity(d, k));
  out.push_back(check_vere_jones(11, opt.inject_failure ? 0.0 : 1e-10));
  out.push_back(check_det_bound());
  out.push_back(check_kernel_inequalities());
  out.push_back(check_hn_duality());
  if (!opt.quick) out.push_back(check_eigengap_trend());
  return out;
}

} // namespace wht
