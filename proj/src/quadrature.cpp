#include "wht/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace wht {

bool GridQuadrature::valid() const {
  if (points.cols() != weights.size()) return false;
  return (weights.array() > 0.0).all();
}

GaussRule gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: n must be positive");
  GaussRule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes(i) = mid - half * x;
    r.nodes(n - 1 - i) = mid + half * x;
    r.weights(i) = r.weights(n - 1 - i) = half * w;
  }
  return r;
}

GridQuadrature tensor_gauss_legendre(const Box& box, int nodes_per_dim) {
  const int d = box.dim();
  require(d >= 1, "tensor_gauss_legendre: empty box");
  std::vector<GaussRule> rules;
  GridQuadrature g;
  g.domain = box;
  long total = 1;
  for (int c = 0; c < d; ++c) {
    rules.push_back(gauss_legendre(nodes_per_dim, box.lo(c), box.hi(c)));
    g.axes.push_back(rules.back().nodes);
    total *= nodes_per_dim;
  }
  g.points.resize(d, total);
  g.weights.resize(total);
  g.index.resize(d, total);
  std::vector<int> idx(d, 0);
  for (long k = 0; k < total; ++k) {
    double w = 1.0;
    for (int c = 0; c < d; ++c) {
      g.points(c, k) = rules[c].nodes(idx[c]);
      g.index(c, k) = idx[c];
      w *= rules[c].weights(idx[c]);
    }
    g.weights(k) = w;
    for (int c = 0; c < d; ++c) {
      if (++idx[c] < nodes_per_dim) break;
      idx[c] = 0;
    }
  }
  return g;
}

GridQuadrature restrict_grid(const GridQuadrature& g, const std::function<bool(const Point&)>& keep) {
  std::vector<int> kept;
  for (int i = 0; i < g.size(); ++i)
    if (keep(g.points.col(i))) kept.push_back(i);
  GridQuadrature r;
  r.domain = g.domain;
  r.axes = g.axes;
  const int n = static_cast<int>(kept.size());
  r.points.resize(g.dim(), n);
  r.weights.resize(n);
  if (g.is_tensor()) r.index.resize(g.dim(), n);
  for (int k = 0; k < n; ++k) {
    r.points.col(k) = g.points.col(kept[k]);
    r.weights(k) = g.weights(kept[k]);
    if (g.is_tensor()) r.index.col(k) = g.index.col(kept[k]);
  }
  return r;
}

namespace {

const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fc = f(c);
  cplx rk = fc * wgk[7], rg = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    cplx f1 = f(c - h * xgk[j]), f2 = f(c + h * xgk[j]);
    rk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) rg += wg[j / 2] * (f1 + f2);
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

} // namespace

IntegrationResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                     double abs_tol, double rel_tol, int max_intervals) {
  std::priority_queue<Panel> heap;
  // a few initial panels so that narrow features near the middle are seen
  const int init = 8;
  cplx total = 0.0;
  double err = 0.0;
  int evals = 0;
  for (int i = 0; i < init; ++i) {
    Panel p = gk15(f, a + (b - a) * i / init, a + (b - a) * (i + 1) / init);
    evals += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && static_cast<int>(heap.size()) < max_intervals) {
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
    evals += 30;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // recompute sums to remove drift from incremental updates
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err, evals};
}

double integrate_adaptive_real(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, double rel_tol) {
  auto r = integrate_adaptive([&](double x) { return cplx(f(x), 0.0); }, a, b, abs_tol, rel_tol);
  return r.value.real();
}

} // namespace wht
