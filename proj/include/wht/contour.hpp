#pragma once

#include "wht/fredholm.hpp"

namespace wht {

// A positive trace-class operator A seen through z -> Det(1 - zA) on circles z = r e^{ix}.
class DetModel {
 public:
  virtual ~DetModel() = default;

  // log Det(1 - r e^{ix} A) - log Det(1 - r A)
  virtual cplx log_det_ratio(double log_r, double x) = 0;
  // log Det(1 - r A), r below the pole
  virtual double log_det(double log_r) = 0;
  // log of the top eigenvalue a_0, and log of a bound on the second one
  virtual double log_top() = 0;
  // a cheap upper bound of log_top, enough to decide that no pole is close
  virtual double log_top_bound() { return log_top(); }
  virtual double log_second() = 0;
  // log |Det'(1 - zA)|, the a_0 factor removed, for real z = e^{log_z} in [1/a_0, 1/a_1)
  virtual double log_det_reduced(double log_z) = 0;
  // any lower bound of log_det_reduced; used only to certify that a remainder is negligible
  virtual double log_det_reduced_lower(double log_z) { return log_det_reduced(log_z); }
  // hint before a sweep over |x| <= x_max on one circle
  virtual void prepare_circle(double /*log_r*/, double /*x_max*/) {}
};

// Exact spectrum of G_kappa(beta).
class SpectralModel : public DetModel {
 public:
  explicit SpectralModel(const TrapParams& trap);
  cplx log_det_ratio(double log_r, double x) override;
  double log_det(double log_r) override;
  double log_top() override { return 0.0; }
  double log_second() override { return -trap_.beta / trap_.kappa; }
  double log_det_reduced(double log_z) override;

  // same sums with the ground level left out (the Q_kappa part)
  cplx log_det_ratio_q(double log_r, double x) const;
  double log_det_q(double log_r) const;
  const TrapParams& trap() const { return trap_; }

 private:
  TrapParams trap_;
  int max_level_;
};

struct ContourOptions {
  bool allow_split = true;
  double rel_tol = 1e-11;
  // the pole is split off when -log(r a_0) < split_fraction * log(a_0/a_1)
  double split_fraction = 0.25;
};

struct ContourResult {
  double log_xi = 0.0;
  bool split = false;
  bool integral_dropped = false;   // split case: the remaining integral was certified negligible
  double integral_bound = 0.0;     // |I(s')| / residue part (split case)
  double window = 0.0;
  int evaluations = 0;
};

// Xi = sum_n e^{beta mu n - a n^2/2} Tr_sym A^n with a = beta lambda / volume, evaluated
// through the Gaussian linearisation on the circle r = e^{beta mu - a s}; the circle is passed
// as log r (s follows) so that 1 - r keeps its digits near the pole.
ContourResult log_xi_contour(DetModel& model, double beta, double mu, double a, double log_r,
                             const ContourOptions& opt = {});

// log sum_{N in Z} e^{bN - aN^2/2}
double log_theta(double b, double a);

// Contour evaluation of Xi for G_kappa(beta) at the given s (no pole splitting).
double log_xi_contour_integral(const TrapParams& trap, double mu, double lambda, double s);
double xi_contour_integral(const TrapParams& trap, double mu, double lambda, double s);

// Contour evaluation at s_kappa with the pole split when it is close.
ContourResult log_xi(const TrapParams& trap, double mu, double lambda);

} // namespace wht
