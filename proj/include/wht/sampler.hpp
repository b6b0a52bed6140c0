#pragma once

#include "wht/fredholm.hpp"

#include <array>
#include <cstdint>
#include <limits>

namespace wht {

// Counter-based Philox4x32-10; (seed, stream) select independent sequences.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  Philox4x32(std::uint64_t seed, std::uint64_t stream);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  double uniform();  // in [0,1), 53 random bits

 private:
  void refill();
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> out_;
  int used_ = 4;
};

struct PointConfiguration {
  std::vector<Point> points;
  int size() const { return static_cast<int>(points.size()); }
};

struct NumberDistribution {
  std::vector<double> weights;  // P(0..n_max)
  double tail_bound = 0.0;      // certified mass beyond n_max (relative)
  double mean() const;
  int n_max() const { return static_cast<int>(weights.size()) - 1; }
};

struct SamplerConfig {
  std::uint64_t seed = 1;
  int burn_in = 10000;
  int thin = 10;
  int steps = 20000;
  double walk_scale = 0.5;
  double independence_prob = 0.2;
  void validate() const;
  // configurations emitted: (steps - burn_in) / thin
  int draws() const { return (steps - burn_in) / thin; }
};

double janossy_weight(const std::vector<Point>& points, const TrapParams& trap, double mu, double lambda);
double log_janossy_weight(const std::vector<Point>& points, const TrapParams& trap, double mu, double lambda);

// P(n) proportional to e^{beta mu n - a n^2/2} h_n, n <= n_max; throws if the tail beyond n_max is not below 1e-12.
NumberDistribution number_distribution(const TrapParams& trap, double mu, double lambda, int n_max);
// Same weights, h_n read off as Taylor coefficients of 1/Det(1 - zG) on a circle.
NumberDistribution number_distribution_dual(const TrapParams& trap, double mu, double lambda, int n_max);

// Density of the position proposal for moving one point from x to y (mixture of a Gaussian walk
// of scale walk_scale*sqrt(kappa) and an independence draw from Omega_kappa^2).
double proposal_density(const Point& from, const Point& to, const TrapParams& trap, const SamplerConfig& cfg);
// Metropolis-Hastings acceptance for replacing point `index` of x by y_i.
double acceptance_probability(const std::vector<Point>& x, const std::vector<Point>& y, int index,
                              const TrapParams& trap, double mu, double lambda, const SamplerConfig& cfg);

// Two-stage sampler: n from ndist, then positions from the chain kept for that n (RNG stream n+1).
std::vector<PointConfiguration> sample_configurations(const TrapParams& trap, double mu, double lambda,
                                                      const SamplerConfig& cfg, const NumberDistribution& ndist);

struct LinearStatistic {
  double mean = 0.0;
  double std_error = 0.0;
};
LinearStatistic empirical_linear_statistic(const std::vector<PointConfiguration>& samples, const TestFunction& f);
// E <f, xi> from dTr G~^k/dt = -k int f G^k(x,x) dx through the Newton recursion.
double exact_linear_statistic(const TrapParams& trap, double mu, double lambda, const TestFunction& f, int n_max,
                              int nodes_per_dim = 32);

// Regularised upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
struct ChiSquared {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
// Bins with expected count below 5 are pooled into the last well-populated bin.
ChiSquared chi_squared_test(const std::vector<long>& observed, const std::vector<double>& probs);

} // namespace wht
