#pragma once

#include "wht/common.hpp"
#include "wht/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace wht {

struct TrapParams {
  double kappa = 1.0;
  double beta = 1.0;
  int dim = 1;

  void validate() const {
    require(kappa > 0.0 && beta > 0.0 && dim >= 1, "TrapParams: need kappa > 0, beta > 0, dim >= 1");
  }
  double volume() const { return std::pow(kappa, dim); }
  // e^{-beta/kappa}, the ratio between consecutive eigenvalues
  double q() const { return std::exp(-beta / kappa); }
};

struct EigenLevel {
  int level = 0;
  double energy = 0.0;
  double eigenvalue = 1.0;
  std::uint64_t degeneracy = 1;
};

struct SpectrumTruncation {
  int max_level = 0;
  double tail_bound = 0.0;
};

std::uint64_t degeneracy(int level, int dim);

// Geometric majorant of sum_{m>M} deg(m) q^m.
double spectral_tail_bound(const TrapParams& trap, int max_level);
SpectrumTruncation truncation(const TrapParams& trap, int max_level);
// Smallest M whose tail majorant is below rel_tol times the retained trace.
SpectrumTruncation adaptive_truncation(const TrapParams& trap, double rel_tol = 1e-12);

std::vector<EigenLevel> spectrum_levels(const TrapParams& trap, const SpectrumTruncation& trunc);

double trace_gibbs(const TrapParams& trap);

// One-dimensional factor of the Mehler kernel at time t; the d-dimensional kernel is the product.
double mehler_1d(double kappa, double t, double x, double y);
double mehler_kernel(const TrapParams& trap, double t, const Point& x, const Point& y);
double heat_kernel(double beta, int dim, const Point& x, const Point& y);
double heat_1d(double t, double x, double y);

double ground_state_1d(double kappa, double x);
double ground_state(const TrapParams& trap, const Point& x);

// Normalised Hermite function phi_s.
double eigenfunction_1d(int s, double x);
// All of phi_0..phi_smax at x.
Eigen::VectorXd eigenfunctions_1d(int smax, double x);
// phi_{s,kappa}(x) = prod_c kappa^{-1/4} phi_{s_c}(x_c / sqrt(kappa))
double eigenfunction(const TrapParams& trap, const Eigen::VectorXi& s, const Point& x);

struct FlatParams {
  double beta = 1.0;
  int dim = 1;
};

// sum_{n>=1} r^n K(n beta; x, y) with K the Mehler (trap) or heat (flat) kernel.
double resolvent_kernel(double r, const TrapParams& trap, const Point& x, const Point& y, double tol = 1e-14);
double resolvent_kernel(double r, const FlatParams& flat, const Point& x, const Point& y, double tol = 1e-14);

} // namespace wht
