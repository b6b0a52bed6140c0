#pragma once

#include "wht/fixedpoint.hpp"
#include "wht/permanent.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wht {

// Non-negative, continuous, vanishing outside `support`.
struct TestFunction {
  std::function<double(const Point&)> eval;
  Box support;
  bool zero = false;
  std::string label;

  int dim() const { return support.dim(); }
  double operator()(const Point& x) const { return (zero || !support.contains(x)) ? 0.0 : eval(x); }
};

// height * exp(1 - 1/(1 - |x-c|^2/R^2)) inside the ball, 0 outside; smooth, peak value = height.
TestFunction bump_function(const Point& center, double radius, double height);
TestFunction zero_function(int dim);
TestFunction scaled(const TestFunction& f, double t);
// Gauss-Legendre tensor grid on supp f restricted to where f > 0.
GridQuadrature support_grid(const TestFunction& f, int nodes_per_dim);

struct DiscretizedOperator {
  GridQuadrature grid;
  Eigen::MatrixXd entries;  // sqrt(w_i) K(x_i,x_j) sqrt(w_j)
};

DiscretizedOperator discretize(const GridQuadrature& grid, const std::function<double(const Point&, const Point&)>& kernel);

// p[k] = Tr A^k for k = 1..n_max; p[0] is unused and kept at 0.
struct PowerSums {
  std::vector<double> p;
  int n_max() const { return static_cast<int>(p.size()) - 1; }
};

// Exact power sums of G_kappa(beta), optionally of (rho G): Tr (rho G)^k = rho^k (1 - e^{-k beta/kappa})^{-d}.
PowerSums power_sums(const TrapParams& trap, int n_max, double rho = 1.0);
PowerSums power_sums(const Eigen::MatrixXd& symmetric, int n_max);

cplx fredholm_det(const std::vector<EigenLevel>& levels, cplx z);
cplx log_fredholm_det(const std::vector<EigenLevel>& levels, cplx z);
cplx fredholm_det(const Eigen::MatrixXd& m, cplx z);
cplx fredholm_det(const DiscretizedOperator& op, cplx z);

// h_0..h_n by the Newton recursion.
std::vector<double> complete_homogeneous(const PowerSums& ps, int n);
double sym_trace_hn(const PowerSums& ps, int n);

struct VereJones {
  double lhs = 0.0;
  double rhs = 0.0;
};
// lhs: (1/n!) sum over index tuples of permanents of the minors; rhs: h_n of the eigenvalues.
VereJones vere_jones_check(const Eigen::MatrixXd& J, int n);
// z^n coefficient of 1/Det(1 - zJ) by the trapezoid rule on |z| = 0.9/rho(J).
double vere_jones_contour(const Eigen::MatrixXd& J, int n, int points = 256);

struct XiResult {
  double log_xi = 0.0;
  int n_max = 0;
  double tail_bound = 0.0;  // relative to the partial sum
};

// sum_n e^{beta mu n - a n^2/2} h_n with h_n built from power sums of rho*A (so that rho^n is
// divided back out). n_max = 0 picks the cut-off itself; an explicit n_max that fails the
// 1e-12 tail certificate throws ContractViolation.
XiResult log_xi_from_power_sums(const std::function<double(int)>& scaled_pk, double rho, double beta, double mu,
                                double a, int n_max, double tail_tol = 1e-12);
XiResult log_xi_bruteforce(const TrapParams& trap, double mu, double lambda, int n_max = 0);
double xi_bruteforce(const TrapParams& trap, double mu, double lambda, int n_max = 0);

double log_xi_saddle_normal(const TrapParams& trap, double mu, double lambda);
double log_xi_saddle_condensed(const TrapParams& trap, double mu, double lambda);
double xi_saddle_normal(const TrapParams& trap, double mu, double lambda);
double xi_saddle_condensed(const TrapParams& trap, double mu, double lambda);

// rho_{r}(beta) = sum_n r^n (2 pi n beta)^{-d/2}, the flat resolvent on the diagonal.
double local_density_rstar(double beta, double r, int dim);

// Five-factor identity check: Det[1 - rG] / Det[1 - r QGQ] = 1 - r.
double ground_state_ratio(const TrapParams& trap, double r);

} // namespace wht
