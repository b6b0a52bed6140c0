#pragma once

#include "wht/common.hpp"

#include <functional>
#include <vector>

namespace wht {

struct Box {
  Eigen::VectorXd lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x) const {
    return ((x - lo).array() >= 0.0).all() && ((hi - x).array() >= 0.0).all();
  }
  static Box cube(int d, double half) {
    return {Eigen::VectorXd::Constant(d, -half), Eigen::VectorXd::Constant(d, half)};
  }
};

// Nodes in columns. When the grid is a (possibly thinned) tensor product, axes/index
// record the per-dimension factorisation so separable kernels can be tabulated per axis.
struct GridQuadrature {
  Eigen::MatrixXd points;   // d x N
  Eigen::VectorXd weights;  // N
  Box domain;
  std::vector<Eigen::VectorXd> axes;
  Eigen::MatrixXi index;    // d x N, position of each node on its axis

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
  bool is_tensor() const { return !axes.empty(); }
  bool valid() const;
};

struct GaussRule {
  Eigen::VectorXd nodes, weights;
};

// n-point Gauss-Legendre rule on [a,b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

GridQuadrature tensor_gauss_legendre(const Box& box, int nodes_per_dim);

// Keeps only the nodes where keep(x) is true; the tensor factorisation is preserved.
GridQuadrature restrict_grid(const GridQuadrature& g, const std::function<bool(const Point&)>& keep);

template <class F>
auto integrate(const GridQuadrature& g, F&& f) {
  using R = decltype(f(Point(g.points.col(0))));
  R acc{};
  for (int i = 0; i < g.size(); ++i) acc += g.weights(i) * f(Point(g.points.col(i)));
  return acc;
}

struct IntegrationResult {
  cplx value;
  double error;
  int evaluations;
};

// Adaptive Gauss-Kronrod (7/15) on [a,b] for complex integrands.
IntegrationResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                     double abs_tol, double rel_tol, int max_intervals = 20000);

double integrate_adaptive_real(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, double rel_tol);

} // namespace wht
