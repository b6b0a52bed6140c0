#pragma once

#include "wht/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wht {

// margin > 0 means the check holds with room to spare; its meaning is per check (see detail).
struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

// d = 1: int G(beta1; x, z) G(beta2; z, y) dz against G(beta1 + beta2; x, y) on a 5x5 grid in [-3,3]^2.
CheckResult check_semigroup(double kappa = 2.0, double beta1 = 0.7, double beta2 = 0.7, double tol = 1e-8);
// Quadrature of the diagonal against (1 - e^{-beta/kappa})^{-d}.
CheckResult check_trace_identity(int dim, double kappa, double beta = 1.0, double tol = 1e-6);
// Random 5x5 PSD matrix with spectral radius 0.8, n = 1..4.
CheckResult check_vere_jones(std::uint64_t seed = 11, double tol = 1e-10);
// |Det(1 - (e^{ix} - 1) A (1 - A)^{-1})| >= 1 over random draws of (x, r, spectrum).
CheckResult check_det_bound(std::uint64_t seed = 13, int draws = 100, double tol = 1e-12);
// h_n from the Newton recursion against Taylor coefficients of 1/Det(1 - zA).
CheckResult check_hn_duality(double tol = 1e-10);
// (pi kappa)^{d/2}(g_0 - g~_0) stays in [0, |sqrt(1-e^{-f})|^2] and moves toward the resolvent form as kappa grows.
CheckResult check_eigengap_trend(const std::vector<double>& kappas = {8.0, 16.0});

struct InequalityCheck {
  std::string name;
  int points = 0;
  int violations = 0;
  double min_margin = 0.0;  // min of (rhs - lhs) / max(|rhs|, tiny) over the grid
};
// The elementary bounds for x/(1-e^{-x}), tanh, coth, sinh, exp and log on 200-point log grids
// inside [1e-6, 1e3] intersected with each domain.
std::vector<InequalityCheck> kernel_inequalities(int grid_points = 200, int dim = 3);
CheckResult check_kernel_inequalities(int grid_points = 200);

struct VerifyOptions {
  bool inject_failure = false;  // tightens one tolerance below what double precision can meet
  bool quick = false;           // skips the eigengap trend
};
std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt = {});

} // namespace wht
