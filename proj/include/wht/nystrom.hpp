#pragma once

#include "wht/contour.hpp"

#include <map>

namespace wht {

// 24 per axis for d <= 2, 12 for d = 3 (restricted to the ball, about 900 nodes).
int default_nodes(int dim);

// Quadrature on supp f together with sqrt(w_i V_i), V = 1 - e^{-f}.
struct SupportGrid {
  GridQuadrature grid;
  Eigen::VectorXd root_wv;
  double mass = 0.0;  // sum w V, the squared L2 norm of sqrt(V)

  SupportGrid() = default;
  SupportGrid(const TestFunction& f, int nodes_per_dim);
  int size() const { return grid.size(); }
};

// V^{1/2} [sum_n r^n G^n(beta)] V^{1/2} with the flat kernel, Nystrom-weighted.
Eigen::MatrixXd flat_resolvent(const SupportGrid& sg, double beta, double r);
// V^{1/2} [sum_n G^n(beta)] V^{1/2}; direct terms to n = 200 then Euler-Maclaurin. d > 2 only.
Eigen::MatrixXd flat_green(const SupportGrid& sg, double beta);

// V^{1/2} R^Q_z V^{1/2}, R^Q_z = sum_n z^n (G_kappa^n - Omega Omega), on supp f.
class SupportOperator {
 public:
  SupportOperator(const TrapParams& trap, const TestFunction& f, int nodes_per_dim = 0);

  const TrapParams& trap() const { return trap_; }
  const SupportGrid& support() const { return sg_; }
  int size() const { return sg_.size(); }
  // u_i = sqrt(w_i V_i) Omega(x_i)
  const Eigen::VectorXd& ground_vector() const { return u_; }

  // One sweep over n for every z at once; |z| e^{-beta/kappa} < 1 is required.
  template <class S>
  std::vector<Eigen::Matrix<S, -1, -1>> q_resolvent(const std::vector<S>& zs,
                                                    std::vector<Eigen::Matrix<S, -1, -1>>* deriv = nullptr) const;

  double tol = 1e-14;

 private:
  TrapParams trap_;
  SupportGrid sg_;
  Eigen::VectorXd u_, omega_;
  std::vector<Eigen::VectorXd> axis_omega_;
};

// D_Q(z) = det(I + A^Q(z)) and q(z) = u^T (I + A^Q(z))^{-1} u.
struct QValues {
  cplx dq = 1.0;
  cplx q = 0.0;
};
std::vector<QValues> q_values(const SupportOperator& op, const std::vector<cplx>& zs);

struct TopEigen {
  double z0 = 1.0;        // 1 / g~_0
  double q0 = 0.0;        // q(z0) = 1 - g~_0
  double dq0 = 0.0;       // q'(z0)
  double log_dq0 = 0.0;   // log D_Q(z0)
  double log_det_prime = 0.0;  // log Det'(1 - z0 G~)
  int passes = 0;
};
// Top eigenvalue of G~ = G^{1/2} e^{-f} G^{1/2} from 1 - z + z q(z) = 0.
TopEigen top_eigen(const SupportOperator& op);

// Det(1 - z G~) = Det_Q(1 - zG) D_Q(z) (1 - z + z q(z)); D_Q and q are tabulated along each circle.
class TildeModel : public DetModel {
 public:
  explicit TildeModel(const SupportOperator& op);
  cplx log_det_ratio(double log_r, double x) override;
  double log_det(double log_r) override;
  double log_top() override;
  double log_top_bound() override { return 0.0; }  // G~ <= G
  double log_second() override { return -op_.trap().beta / op_.trap().kappa; }
  double log_det_reduced(double log_z) override;
  double log_det_reduced_lower(double log_z) override { return spec_.log_det_q(log_z); }
  void prepare_circle(double log_r, double x_max) override;
  const TopEigen& top();

 private:
  QValues at(double log_r, double x);
  QValues at_real(double log_r);

  const SupportOperator& op_;
  SpectralModel spec_;
  bool have_top_ = false;
  TopEigen top_;
  std::map<double, QValues> real_cache_;
  // Chebyshev panels on [0, X] for the prepared circle
  double circle_lr_ = 1.0, circle_x_ = -1.0, panel_h_ = 0.0;
  int panel_n_ = 0;
  std::vector<std::vector<QValues>> panels_;
};

// Tr G~^k for k = 1..n_max from the Taylor coefficients of log D(z) on a circle inside the unit disc.
PowerSums power_sums_tilde(const SupportOperator& op, int n_max);

XiResult log_xi_bruteforce(const TrapParams& trap, double mu, double lambda, const TestFunction& f, int n_max = 0,
                           int nodes_per_dim = 0);

enum class GenfunMethod { automatic, bruteforce, contour };
struct GenfunOptions {
  int nodes_per_dim = 0;
  int n_max = 0;
  GenfunMethod method = GenfunMethod::automatic;
};
double log_genfun_finite(const TrapParams& trap, double mu, double lambda, const TestFunction& f,
                         const GenfunOptions& opt = {});
double genfun_finite(const TrapParams& trap, double mu, double lambda, const TestFunction& f,
                     const GenfunOptions& opt = {});

double genfun_normal_limit(double beta, double r_star, int dim, const TestFunction& f, int nodes_per_dim = 0);

DiscretizedOperator build_Kf(double beta, int dim, const TestFunction& f, int nodes_per_dim = 0);

double condensed_rate_functional(double beta, double mu, double lambda, int dim, const TestFunction& f,
                                 int nodes_per_dim = 0);

struct Eigengap {
  double lhs = 0.0;        // (pi kappa)^{d/2} (g_0 - g~_0)
  double rhs = 0.0;        // with the Q-projected trap resolvent at z = 1
  double rhs_flat = 0.0;   // with the flat K_f
  double upper = 0.0;      // |sqrt(1 - e^{-f})|^2
  double g0_tilde = 1.0;
};
Eigengap eigengap_check(const TrapParams& trap, const TestFunction& f, int nodes_per_dim = 0);

// -log genfun(t f)/t at t = h and h/2, Richardson-extrapolated to t = 0.
double expectation_from_genfun(const std::function<double(const TestFunction&)>& genfun, const TestFunction& f,
                               double h = 1e-4);

} // namespace wht
