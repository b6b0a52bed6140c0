#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace wht {

using Point = Eigen::VectorXd;
using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Precondition on an argument (r outside (0,1), beta <= 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A quantity that is infinite for the requested parameters (zeta(1), rho_c in d <= 2, ...).
struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical contract could not be certified (truncation tail, spectral radius, n_max, ...).
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation requested outside the phase it is defined for.
struct PhaseError : std::domain_error {
  using std::domain_error::domain_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

} // namespace wht
