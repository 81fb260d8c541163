#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace ompath {

/// Uniform discretization of [0,1] with nodes t_i = i/n, i = 0..n.
class TimeGrid {
 public:
  explicit TimeGrid(Eigen::Index steps) : n_(steps) {
    if (n_ < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
  }

  Eigen::Index steps() const { return n_; }
  Eigen::Index nodes() const { return n_ + 1; }
  double dt() const { return 1.0 / static_cast<double>(n_); }
  double t(Eigen::Index i) const { return static_cast<double>(i) / static_cast<double>(n_); }

  Eigen::VectorXd node_times() const {
    return Eigen::VectorXd::LinSpaced(n_ + 1, 0.0, 1.0);
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.n_ == b.n_; }
  friend bool operator!=(const TimeGrid& a, const TimeGrid& b) { return a.n_ != b.n_; }

 private:
  Eigen::Index n_;
};

/// A free grid function: one row of values per node, one column per component.
struct SampledFn {
  TimeGrid grid;
  Eigen::MatrixXd values;  // (n+1) x dim

  SampledFn(TimeGrid g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.nodes())
      throw std::invalid_argument("SampledFn: value rows must match grid nodes");
  }
  SampledFn(TimeGrid g, Eigen::Index dim)
      : grid(g), values(Eigen::MatrixXd::Zero(g.nodes(), dim)) {}

  Eigen::Index dim() const { return values.cols(); }
};

/// A grid function with a distinguished initial value (values.row(0)).
struct Path {
  TimeGrid grid;
  Eigen::MatrixXd values;  // (n+1) x dim, row 0 is the initial state

  Path(TimeGrid g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.nodes())
      throw std::invalid_argument("Path: value rows must match grid nodes");
  }
  Path(TimeGrid g, Eigen::Index dim)
      : grid(g), values(Eigen::MatrixXd::Zero(g.nodes(), dim)) {}

  Eigen::Index dim() const { return values.cols(); }
  Eigen::RowVectorXd initial() const { return values.row(0); }

  /// values with the initial state subtracted from every row
  Eigen::MatrixXd centered() const { return values.rowwise() - values.row(0); }
};

/// Straight line from x0 to x1 sampled on the grid.
inline Path linear_path(const TimeGrid& grid, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& x1) {
  if (x0.size() != x1.size())
    throw std::invalid_argument("linear_path: endpoint dimensions differ");
  Path p(grid, x0.size());
  const Eigen::VectorXd times = grid.node_times();
  for (Eigen::Index i = 0; i < grid.nodes(); ++i)
    p.values.row(i) = ((1.0 - times[i]) * x0 + times[i] * x1).transpose();
  return p;
}

/// Trapezoid rule over the grid for a scalar integrand sampled at the nodes.
inline double trapezoid(const TimeGrid& grid, const Eigen::VectorXd& f) {
  if (f.size() != grid.nodes())
    throw std::invalid_argument("trapezoid: size must match grid nodes");
  const Eigen::Index n = grid.steps();
  return grid.dt() * (0.5 * (f[0] + f[n]) + f.segment(1, n - 1).sum());
}

}  // namespace ompath
