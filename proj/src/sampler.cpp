#include "wht/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

namespace wht {

// ---- Philox4x32-10 ----

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      out_{} {}

void Philox4x32::refill() {
  std::array<std::uint32_t, 4> x = ctr_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, x[0], hi0, lo0);
    mulhilo(kM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  out_ = x;
  used_ = 0;
  // 64-bit block counter in the low words, stream id in the high words
  if (++ctr_[0] == 0) ++ctr_[1];
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 4) refill();
  return out_[used_++];
}

double Philox4x32::uniform() {
  const std::uint64_t hi = (*this)() >> 5, lo = (*this)() >> 6;
  return (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) * (1.0 / 9007199254740992.0);
}

// ---- configuration and weights ----

double NumberDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) m += static_cast<double>(n) * weights[n];
  return m;
}

void SamplerConfig::validate() const {
  require(burn_in >= 0 && steps > burn_in, "SamplerConfig: need steps > burn_in >= 0");
  require(thin >= 1, "SamplerConfig: thin must be at least 1");
  require(walk_scale > 0.0, "SamplerConfig: walk_scale must be positive");
  require(independence_prob >= 0.0 && independence_prob <= 1.0, "SamplerConfig: independence_prob must lie in [0,1]");
}

namespace {

Eigen::MatrixXd gram(const std::vector<Point>& pts, const TrapParams& trap) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) m(i, j) = m(j, i) = mehler_kernel(trap, trap.beta, pts[i], pts[j]);
  return m;
}

double log_prefactor(int n, const TrapParams& trap, double mu, double lambda) {
  return trap.beta * mu * n - 0.5 * trap.beta * lambda * static_cast<double>(n) * n / trap.volume() - std::lgamma(n + 1.0);
}

} // namespace

double log_janossy_weight(const std::vector<Point>& points, const TrapParams& trap, double mu, double lambda) {
  trap.validate();
  require(lambda > 0.0, "janossy_weight: lambda must be positive");
  const int n = static_cast<int>(points.size());
  if (n == 0) return 0.0;
  return log_prefactor(n, trap, mu, lambda) + std::log(permanent(gram(points, trap)));
}

double janossy_weight(const std::vector<Point>& points, const TrapParams& trap, double mu, double lambda) {
  return std::exp(log_janossy_weight(points, trap, mu, lambda));
}

namespace {

NumberDistribution normalise(const std::vector<double>& scaled_h, double rho, const TrapParams& trap, double mu,
                             double lambda, double tail) {
  const int n_max = static_cast<int>(scaled_h.size()) - 1;
  const double lin = trap.beta * mu - std::log(rho);
  const double a = trap.beta * lambda / trap.volume();
  std::vector<double> lt(n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    lt[n] = (scaled_h[n] > 0.0 ? std::log(scaled_h[n]) : -std::numeric_limits<double>::infinity()) + lin * n -
            0.5 * a * static_cast<double>(n) * n;
  const double peak = *std::max_element(lt.begin(), lt.end());
  NumberDistribution nd;
  nd.weights.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) nd.weights[n] = std::exp(lt[n] - peak);
  const double sum = std::accumulate(nd.weights.begin(), nd.weights.end(), 0.0);
  for (double& w : nd.weights) w /= sum;
  nd.tail_bound = tail;
  return nd;
}

// scale factor used by the brute-force partition function; keeps rho^n h_n in range
double scaling_radius(const TrapParams& trap, double mu, double lambda) {
  return solve_fixed_point(trap, mu, lambda).r;
}

} // namespace

NumberDistribution number_distribution(const TrapParams& trap, double mu, double lambda, int n_max) {
  trap.validate();
  require(lambda > 0.0, "number_distribution: lambda must be positive");
  require(n_max >= 0, "number_distribution: n_max must be non-negative");
  // certifies the tail beyond n_max (throws ContractViolation otherwise)
  const XiResult xi = log_xi_bruteforce(trap, mu, lambda, std::max(n_max, 1));
  const double rho = scaling_radius(trap, mu, lambda);
  const std::vector<double> h = complete_homogeneous(power_sums(trap, std::max(n_max, 1), rho), n_max);
  return normalise(h, rho, trap, mu, lambda, xi.tail_bound);
}

NumberDistribution number_distribution_dual(const TrapParams& trap, double mu, double lambda, int n_max) {
  trap.validate();
  require(lambda > 0.0, "number_distribution: lambda must be positive");
  require(n_max >= 0, "number_distribution: n_max must be non-negative");
  const XiResult xi = log_xi_bruteforce(trap, mu, lambda, std::max(n_max, 1));
  const double rho = scaling_radius(trap, mu, lambda);
  const std::vector<EigenLevel> levels = spectrum_levels(trap, adaptive_truncation(trap, 1e-17));
  // coefficients of 1/Det(1 - w rho G) on |w| = R, with rho G of norm rho
  const double R = 0.5 / rho;
  const int J = 512;
  std::vector<cplx> vals(J);
  for (int j = 0; j < J; ++j) {
    const cplx w = std::polar(R * rho, 2.0 * pi * j / J);
    vals[j] = std::exp(-log_fredholm_det(levels, w));
  }
  std::vector<double> h(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    cplx acc = 0.0;
    for (int j = 0; j < J; ++j) acc += vals[j] * std::polar(1.0, -2.0 * pi * static_cast<double>(j) * n / J);
    h[n] = acc.real() / J / std::pow(R, n);
  }
  return normalise(h, rho, trap, mu, lambda, xi.tail_bound);
}

// ---- Metropolis-Hastings ----

double proposal_density(const Point& from, const Point& to, const TrapParams& trap, const SamplerConfig& cfg) {
  const int d = trap.dim;
  const double s2 = cfg.walk_scale * cfg.walk_scale * trap.kappa;
  const double walk = std::pow(2.0 * pi * s2, -0.5 * d) * std::exp(-(to - from).squaredNorm() / (2.0 * s2));
  const double omega = ground_state(trap, to);
  return (1.0 - cfg.independence_prob) * walk + cfg.independence_prob * omega * omega;
}

double acceptance_probability(const std::vector<Point>& x, const std::vector<Point>& y, int index,
                              const TrapParams& trap, double mu, double lambda, const SamplerConfig& cfg) {
  require(x.size() == y.size() && index >= 0 && index < static_cast<int>(x.size()),
          "acceptance_probability: configurations must differ in one valid index");
  const double lr = log_janossy_weight(y, trap, mu, lambda) - log_janossy_weight(x, trap, mu, lambda) +
                    std::log(proposal_density(y[index], x[index], trap, cfg)) -
                    std::log(proposal_density(x[index], y[index], trap, cfg));
  return lr >= 0.0 ? 1.0 : std::exp(lr);
}

namespace {

struct Chain {
  int n;
  std::vector<Point> pts;
  double per = 0.0;
  Philox4x32 rng;
  std::normal_distribution<double> normal;

  Chain(int n_, std::uint64_t seed, const TrapParams& trap) : n(n_), rng(seed, static_cast<std::uint64_t>(n_) + 1) {
    const double sd = std::sqrt(0.5 * trap.kappa);
    for (int i = 0; i < n; ++i) pts.push_back(gaussian(trap.dim, sd));
    if (n > 0) per = permanent(gram(pts, trap));
  }

  Point gaussian(int d, double sd) {
    Point p(d);
    for (int c = 0; c < d; ++c) p(c) = sd * normal(rng);
    return p;
  }

  void step(const TrapParams& trap, const SamplerConfig& cfg) {
    if (n == 0) return;
    const int i = std::min(n - 1, static_cast<int>(rng.uniform() * n));
    Point y;
    if (rng.uniform() < cfg.independence_prob)
      y = gaussian(trap.dim, std::sqrt(0.5 * trap.kappa));
    else
      y = pts[i] + gaussian(trap.dim, cfg.walk_scale * std::sqrt(trap.kappa));
    std::vector<Point> cand = pts;
    cand[i] = y;
    const double per_y = permanent(gram(cand, trap));
    const double ratio = per_y * proposal_density(y, pts[i], trap, cfg) /
                         (per * proposal_density(pts[i], y, trap, cfg));
    // prefactors cancel at fixed n; per == 0 only after underflow, where any move is taken
    if (!(per > 0.0) || rng.uniform() < ratio) {
      pts = std::move(cand);
      per = per_y;
    }
  }
};

} // namespace

std::vector<PointConfiguration> sample_configurations(const TrapParams& trap, double mu, double lambda,
                                                      const SamplerConfig& cfg, const NumberDistribution& ndist) {
  trap.validate();
  cfg.validate();
  require(lambda > 0.0, "sample_configuration: lambda must be positive");
  require(!ndist.weights.empty(), "sample_configuration: empty number distribution");
  (void)mu;  // enters only through ndist; positions at fixed n do not depend on it
  const int draws = cfg.draws();
  // stage one: n for every draw from stream 0
  Philox4x32 master(cfg.seed, 0);
  std::vector<double> cdf(ndist.weights.size());
  std::partial_sum(ndist.weights.begin(), ndist.weights.end(), cdf.begin());
  std::vector<int> ns(draws);
  for (int k = 0; k < draws; ++k) {
    const double u = master.uniform() * cdf.back();
    ns[k] = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end() - 1, u) - cdf.begin());
  }
  // stage two: one chain per n on its own stream, run concurrently, merged by draw order
  const int n_max = ndist.n_max();
  std::vector<int> count(n_max + 1, 0);
  for (int n : ns) ++count[n];
  std::vector<std::future<std::vector<std::vector<Point>>>> jobs(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    if (count[n] == 0) continue;
    jobs[n] = std::async(std::launch::async, [&trap, &cfg, n, c = count[n]] {
      Chain ch(n, cfg.seed, trap);
      for (int s = 0; s < cfg.burn_in; ++s) ch.step(trap, cfg);
      std::vector<std::vector<Point>> out;
      out.reserve(c);
      for (int k = 0; k < c; ++k) {
        for (int s = 0; s < cfg.thin; ++s) ch.step(trap, cfg);
        out.push_back(ch.pts);
      }
      return out;
    });
  }
  std::vector<std::vector<std::vector<Point>>> per_n(n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    if (count[n] > 0) per_n[n] = jobs[n].get();
  std::vector<int> next(n_max + 1, 0);
  std::vector<PointConfiguration> out(draws);
  for (int k = 0; k < draws; ++k) out[k].points = std::move(per_n[ns[k]][next[ns[k]]++]);
  return out;
}

// ---- linear statistics ----

LinearStatistic empirical_linear_statistic(const std::vector<PointConfiguration>& samples, const TestFunction& f) {
  if (samples.size() < 2) throw DomainError("empirical_linear_statistic: need at least two samples");
  const double m = static_cast<double>(samples.size());
  double s = 0.0, s2 = 0.0;
  for (const auto& c : samples) {
    double v = 0.0;
    for (const auto& p : c.points) v += f(p);
    s += v;
    s2 += v * v;
  }
  LinearStatistic st;
  st.mean = s / m;
  const double var = std::max(0.0, (s2 - m * st.mean * st.mean) / (m - 1.0));
  st.std_error = std::sqrt(var / m);
  return st;
}

double exact_linear_statistic(const TrapParams& trap, double mu, double lambda, const TestFunction& f, int n_max,
                              int nodes_per_dim) {
  const NumberDistribution nd = number_distribution(trap, mu, lambda, n_max);
  if (f.zero) return 0.0;
  const double rho = scaling_radius(trap, mu, lambda);
  const PowerSums ps = power_sums(trap, std::max(n_max, 1), rho);
  const GridQuadrature g = support_grid(f, nodes_per_dim);
  std::vector<double> dp(n_max + 1, 0.0);
  for (int k = 1; k <= n_max; ++k) {
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const Point x = g.points.col(i);
      acc += g.weights(i) * f(x) * mehler_kernel(trap, k * trap.beta, x, x);
    }
    dp[k] = -k * std::pow(rho, k) * acc;
  }
  std::vector<double> h(n_max + 1, 0.0), dh(n_max + 1, 0.0);
  h[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    double a = 0.0, b = 0.0;
    for (int k = 1; k <= n; ++k) {
      a += ps.p[k] * h[n - k];
      b += dp[k] * h[n - k] + ps.p[k] * dh[n - k];
    }
    h[n] = a / n;
    dh[n] = b / n;
  }
  double e = 0.0;
  for (int n = 1; n <= n_max; ++n) e -= nd.weights[n] * dh[n] / h[n];
  return e;
}

// ---- chi-squared ----

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  const double lpre = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    }
    return std::max(0.0, 1.0 - sum * std::exp(lpre));
  }
  // modified Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(lpre) * h;
}

ChiSquared chi_squared_test(const std::vector<long>& observed, const std::vector<double>& probs) {
  require(observed.size() == probs.size() && !probs.empty(), "chi_squared_test: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  require(total > 0.0, "chi_squared_test: no observations");
  const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
  std::vector<double> o, e;
  double oacc = 0.0, eacc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    oacc += static_cast<double>(observed[i]);
    eacc += total * probs[i] / psum;
    if (eacc >= 5.0) {
      o.push_back(oacc);
      e.push_back(eacc);
      oacc = eacc = 0.0;
    }
  }
  if (eacc > 0.0 || oacc > 0.0) {
    if (e.empty()) {
      o.push_back(oacc);
      e.push_back(eacc);
    } else {
      o.back() += oacc;
      e.back() += eacc;
    }
  }
  ChiSquared res;
  for (std::size_t i = 0; i < o.size(); ++i) res.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  res.dof = static_cast<int>(o.size()) - 1;
  res.p_value = res.dof > 0 ? gamma_q(0.5 * res.dof, 0.5 * res.statistic) : 1.0;
  return res;
}

} // namespace wht
