#pragma once

#include "wht/spectral.hpp"

namespace wht {

struct ThermoParams {
  double beta = 1.0;
  double mu = 0.0;
  double lambda = 1.0;
  double dim = 3.0;
};

enum class DosKind { harmonic, translational };

struct SeriesValue {
  double value;
  double error_bound;
};

// sum_{n>=1} r^n / n^s, with a certified bound on the neglected part.
SeriesValue polylog_certified(double s, double r);
double polylog(double s, double r);
double zeta(double s);

// kappa^{-d} sum_m deg(m) / (e^{beta(m/kappa - mu)} - 1)
double rho_kappa_ideal(const TrapParams& trap, double mu, const SpectrumTruncation& trunc);
double rho_kappa_ideal(const TrapParams& trap, double mu);
double rho_ideal_limit(double beta, double mu, double dim);

double rho_crit(double beta, double dim);
double rho_crit_tdl(double beta, double dim);
double mu_crit(double beta, double lambda, double dim);

// The unique mu < 0 with rho_kappa_ideal(mu) = rho.
double mu_bar_kappa(const TrapParams& trap, double rho);

// (rho - rho_c) pi^{-d/2} e^{-|u|^2}
double condensate_profile(double beta, double rho, const Point& u);
// kappa^{-d} Omega_kappa(x)^2 / (e^{-beta mu_bar} - 1)
double condensate_density_kappa(const TrapParams& trap, double rho, const Point& x);

double dos_density(DosKind kind, double energy, double dim);
// int e^{-tE} dN_kappa(E) for the harmonic staircase, by the spectral sum
double harmonic_staircase_laplace(const TrapParams& unit_beta_trap, double t);

} // namespace wht
