#pragma once

#include "wht/thermo.hpp"

#include <string>

namespace wht {

struct FixedPoint {
  double r = 0.0;
  double s = 0.0;
  // 1 - r, kept separately: in the condensed phase it is O(kappa^{-d}) and r itself rounds
  double one_minus_r = 1.0;
  int max_level = 0;
};

enum class PhaseLabel { Normal, Condensed, Critical };
std::string to_string(PhaseLabel p);

// Partial sums over the exact spectrum of G_kappa(beta).
struct SpectralSums {
  // sum deg * r g / (1 - r g)
  static double occupation(const TrapParams& trap, double log_r, int max_level);
  // sum deg * r g / (1 - r g)^2
  static double occupation_sq(const TrapParams& trap, double log_r, int max_level);
  // sum deg * log(1 - r g)
  static double log_det(const TrapParams& trap, double log_r, int max_level);
  // certified bound on the neglected levels of occupation() (r <= 1)
  static double occupation_tail(const TrapParams& trap, int max_level);
};

double h_kappa(double r, const TrapParams& trap, double lambda, const SpectrumTruncation& trunc);

FixedPoint solve_fixed_point(const TrapParams& trap, double mu, double lambda, double tol = 1e-12);
FixedPoint solve_fixed_point(const TrapParams& trap, double mu, double lambda, const SpectrumTruncation& trunc,
                             double tol);

double r_star(double beta, double mu, double lambda, double dim, double tol = 1e-13);

PhaseLabel classify_phase(double beta, double mu, double lambda, double dim, double tol = 1e-9);

double condensed_rate(double beta, double mu, double lambda, double dim);
double rho_total(double beta, double mu, double lambda, double dim);
double rho_total_kappa(const TrapParams& trap, double mu, double lambda);

// r e^{-|p|_1} / (1 - r e^{-|p|_1})^nu
double a_nu(const Point& p, double r, int nu);
// piecewise constant on the boxes (beta/kappa)(n + [0,1)^d), zero on the box at the origin
double a_nu_kappa(const Point& p, double r, int nu, double kappa, double beta);

} // namespace wht
