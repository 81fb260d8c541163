#include "ompath/frac_calculus.hpp"

#include "gauss_rule.hpp"
#include "ompath/special_functions.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace ompath {
namespace {

// Exact moments of the piecewise-linear interpolant against the singular
// kernels, per lag k = i-j on a uniform grid.  Cached per (n, alpha): the
// transition-path solver applies these operators thousands of times on one
// grid.
struct IntegralWeights {
  Eigen::VectorXd c0, c1;        // weight of f_{i-k} and f_{i-k+1}, index k = 1..n
  Eigen::VectorXd a0, a1, a2;    // quadratic starting-cell corrections, index i
};

struct WeylWeights {
  Eigen::VectorXd d0, d1;    // lag weights, k = 2..n
  Eigen::VectorXd sum01;     // prefix sums of d0+d1 up to lag i
  double last_cell;          // weight of f_i - f_{i-1}
};

using IntegralKey = std::pair<Eigen::Index, double>;

std::shared_ptr<const IntegralWeights> integral_weights(Eigen::Index n, double alpha) {
  static std::map<IntegralKey, std::shared_ptr<const IntegralWeights>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, alpha});
  if (it != cache.end()) return it->second;

  const double dt = 1.0 / static_cast<double>(n);
  auto w = std::make_shared<IntegralWeights>();
  w->c0.resize(n + 1);
  w->c1.resize(n + 1);
  w->c0[0] = w->c1[0] = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double a = k * dt;
    const double b = (k - 1) * dt;
    // m0 = int_b^a u^(alpha-1) du,  m1 = int_b^a u^(alpha-1) (a-u) du
    const double m0 = (std::pow(a, alpha) - std::pow(b, alpha)) / alpha;
    const double m1 =
        a * m0 - (std::pow(a, alpha + 1.0) - std::pow(b, alpha + 1.0)) / (alpha + 1.0);
    w->c1[k] = m1 / dt;
    w->c0[k] = m0 - w->c1[k];
  }

  // Starting-cell correction: on [0, dt] the interpolant is upgraded to the
  // quadratic through f_0, f_1, f_2, again with exact kernel moments.  The
  // linear rule alone loses an O(dt^(alpha+1/2)) chunk at the first nodes on
  // integrands with endpoint-singular derivatives.
  w->a0 = Eigen::VectorXd::Zero(n + 1);
  w->a1 = Eigen::VectorXd::Zero(n + 1);
  w->a2 = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double a = i * dt;          // t_i
    const double b = (i - 1) * dt;    // t_i - dt
    const double m0 = (std::pow(a, alpha) - std::pow(b, alpha)) / alpha;
    const double m1p = (std::pow(a, alpha + 1.0) - std::pow(b, alpha + 1.0)) / (alpha + 1.0);
    const double m2p = (std::pow(a, alpha + 2.0) - std::pow(b, alpha + 2.0)) / (alpha + 2.0);
    const double p0 = m0;
    const double p1 = a * m0 - m1p;                    // int (t_i-y)^(a-1) y dy over the cell
    const double p2 = a * a * m0 - 2.0 * a * m1p + m2p;
    const double q0 = (p2 - 3.0 * dt * p1 + 2.0 * dt * dt * p0) / (2.0 * dt * dt);
    const double q1 = (2.0 * dt * p1 - p2) / (dt * dt);
    const double q2 = (p2 - dt * p1) / (2.0 * dt * dt);
    // replace the linear cell weights (lag k = i) by the quadratic ones
    w->a0[i] = q0 - w->c0[i];
    w->a1[i] = q1 - w->c1[i];
    w->a2[i] = q2;
  }
  cache.insert({{n, alpha}, w});
  return w;
}

std::shared_ptr<const WeylWeights> weyl_weights(Eigen::Index n, double alpha) {
  static std::map<IntegralKey, std::shared_ptr<const WeylWeights>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, alpha});
  if (it != cache.end()) return it->second;

  const double dt = 1.0 / static_cast<double>(n);
  auto w = std::make_shared<WeylWeights>();
  w->d0 = Eigen::VectorXd::Zero(n + 1);
  w->d1 = Eigen::VectorXd::Zero(n + 1);
  w->sum01 = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index k = 2; k <= n; ++k) {
    const double a = k * dt;
    const double b = (k - 1) * dt;
    // m0 = int_b^a u^(-alpha-1) du,  m1 = int_b^a u^(-alpha-1) (a-u) du
    const double m0 = (std::pow(b, -alpha) - std::pow(a, -alpha)) / alpha;
    const double m1 =
        a * m0 - (std::pow(a, 1.0 - alpha) - std::pow(b, 1.0 - alpha)) / (1.0 - alpha);
    w->d1[k] = m1 / dt;
    w->d0[k] = m0 - w->d1[k];
    w->sum01[k] = w->sum01[k - 1] + w->d0[k] + w->d1[k];
  }
  // int_0^dt u^(-alpha) du / dt, the cell where f(x)-f(y) vanishes linearly
  w->last_cell = std::pow(dt, -alpha) / (1.0 - alpha);
  cache.insert({{n, alpha}, w});
  return w;
}

// first-cell moments of the weighted kernel: mu_m[i] = int_0^dt (t_i-y)^(alpha-1) y^(p+m) dy
struct WeightedCellMoments {
  Eigen::VectorXd mu0, mu1;
};

std::shared_ptr<const WeightedCellMoments> weighted_cell_moments(Eigen::Index n, double alpha,
                                                                 double p) {
  static std::map<std::tuple<Eigen::Index, double, double>,
                  std::shared_ptr<const WeightedCellMoments>>
      cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, alpha, p});
  if (it != cache.end()) return it->second;

  const double dt = 1.0 / static_cast<double>(n);
  auto m = std::make_shared<WeightedCellMoments>();
  m->mu0 = Eigen::VectorXd::Zero(n + 1);
  m->mu1 = Eigen::VectorXd::Zero(n + 1);
  m->mu0[1] = std::pow(dt, alpha + p) * beta_fn(alpha, 1.0 + p);
  m->mu1[1] = std::pow(dt, alpha + p + 1.0) * beta_fn(alpha, 2.0 + p);
  for (Eigen::Index i = 2; i <= n; ++i) {
    const double ti = i * dt;
    for (int mm = 0; mm < 2; ++mm) {
      const double r = 1.0 / (1.0 + p + mm);
      const double val = detail::gauss16(
          [&](double u) { return std::pow(ti - dt * std::pow(u, r), alpha - 1.0); }, 0.0, 1.0);
      (mm == 0 ? m->mu0 : m->mu1)[i] = std::pow(dt, 1.0 + p + mm) * r * val;
    }
  }
  cache.insert({{n, alpha, p}, m});
  return m;
}

// origin-cell moments of the Weyl kernel: nu_m[i] = int_0^dt (t_i-y)^(-alpha-1) y^(p+m) dy
// (i >= 2) plus kappa[i] = int_0^dt (t_i-y)^(-alpha-1) dy and the closed-form
// combination for the single-cell node i = 1.
struct WeylCellMoments {
  Eigen::VectorXd nu0, nu1, kappa;
  double first_node_h0 = 0.0;  // weight of h_0 at i = 1
  double first_node_h1 = 0.0;  // weight of h_1 - h_0 at i = 1
};

std::shared_ptr<const WeylCellMoments> weyl_cell_moments(Eigen::Index n, double alpha,
                                                         double p) {
  static std::map<std::tuple<Eigen::Index, double, double>,
                  std::shared_ptr<const WeylCellMoments>>
      cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, alpha, p});
  if (it != cache.end()) return it->second;

  const double dt = 1.0 / static_cast<double>(n);
  auto m = std::make_shared<WeylCellMoments>();
  m->nu0 = Eigen::VectorXd::Zero(n + 1);
  m->nu1 = Eigen::VectorXd::Zero(n + 1);
  m->kappa = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = 2; i <= n; ++i) {
    const double ti = i * dt;
    m->kappa[i] = (std::pow(ti - dt, -alpha) - std::pow(ti, -alpha)) / alpha;
    for (int mm = 0; mm < 2; ++mm) {
      const double r = 1.0 / (1.0 + p + mm);
      const double val = detail::gauss16(
          [&](double u) { return std::pow(ti - dt * std::pow(u, r), -alpha - 1.0); }, 0.0,
          1.0);
      (mm == 0 ? m->nu0 : m->nu1)[i] = std::pow(dt, 1.0 + p + mm) * r * val;
    }
  }
  // i = 1: int_0^dt (dt-y)^(-alpha-1) (f_1 - y^p hhat(y)) dy reduces to
  // dt^(p-alpha) [h_0 I(p) + (h_1-h_0) I(p+1)] with
  // I(beta) = (Gamma(beta+1)Gamma(1-alpha)/Gamma(beta+1-alpha) - 1)/alpha.
  auto bracket = [&](double beta) {
    return (std::exp(std::lgamma(beta + 1.0) + std::lgamma(1.0 - alpha) -
                     std::lgamma(beta + 1.0 - alpha)) -
            1.0) /
           alpha;
  };
  m->first_node_h0 = std::pow(dt, p - alpha) * bracket(p);
  m->first_node_h1 = std::pow(dt, p - alpha) * bracket(p + 1.0);
  cache.insert({{n, alpha, p}, m});
  return m;
}

Eigen::MatrixXd reversed_rows(const Eigen::MatrixXd& m) { return m.colwise().reverse(); }

// plain piecewise-linear product convolution, all cells, no corrections
Eigen::MatrixXd convolve_cells(const Eigen::MatrixXd& values, const IntegralWeights& w,
                               Eigen::Index n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, values.cols());
  for (Eigen::Index k = 1; k <= n; ++k) {
    out.middleRows(k, n - k + 1) += w.c0[k] * values.middleRows(0, n - k + 1) +
                                    w.c1[k] * values.middleRows(1, n - k + 1);
  }
  return out;
}

}  // namespace

SampledFn frac_integral_left(const SampledFn& f, double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::domain_error("frac_integral_left: alpha must lie in (0,1]");
  const Eigen::Index n = f.grid.steps();
  const auto w = integral_weights(n, alpha);

  SampledFn out(f.grid, f.dim());
  out.values = convolve_cells(f.values, *w, n);
  out.values += w->a0 * f.values.row(0) + w->a1 * f.values.row(1) + w->a2 * f.values.row(2);
  out.values /= gamma_fn(alpha);
  out.values.row(0).setZero();
  return out;
}

SampledFn frac_integral_right(const SampledFn& f, double alpha) {
  SampledFn reflected(f.grid, reversed_rows(f.values));
  SampledFn res = frac_integral_left(reflected, alpha);
  return SampledFn(f.grid, reversed_rows(res.values));
}

SampledFn frac_integral_left_weighted(const SampledFn& h, double alpha, double p) {
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::domain_error("frac_integral_left_weighted: alpha must lie in (0,1]");
  if (!(p > -1.0) || alpha + p < 0.0)
    throw std::domain_error("frac_integral_left_weighted: need p > -1 and alpha + p >= 0");
  const Eigen::Index n = h.grid.steps();
  const double dt = h.grid.dt();
  const auto w = integral_weights(n, alpha);
  const auto cell = weighted_cell_moments(n, alpha, p);

  const SampledFn weighted = multiply_power_weight(h, p);
  SampledFn out(h.grid, h.dim());
  out.values = convolve_cells(weighted.values, *w, n);
  // swap the interpolated first cell for the exact y^p moments
  out.values -= w->c0 * weighted.values.row(0) + w->c1 * weighted.values.row(1);
  out.values += cell->mu0 * h.values.row(0) +
                cell->mu1 * ((h.values.row(1) - h.values.row(0)) / dt);
  out.values /= gamma_fn(alpha);
  if (alpha + p == 0.0)
    out.values.row(0) = gamma_fn(1.0 - alpha) * h.values.row(0);
  else
    out.values.row(0).setZero();
  return out;
}

SampledFn frac_derivative_left(const SampledFn& f, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("frac_derivative_left: alpha must lie in (0,1)");
  const Eigen::Index n = f.grid.steps();
  const auto w = weyl_weights(n, alpha);

  // conv_i = sum_{j<=i-2} f_j d0[i-j] + f_{j+1} d1[i-j]
  Eigen::MatrixXd conv = Eigen::MatrixXd::Zero(n + 1, f.dim());
  for (Eigen::Index k = 2; k <= n; ++k) {
    conv.middleRows(k, n - k + 1) += w->d0[k] * f.values.middleRows(0, n - k + 1) +
                                     w->d1[k] * f.values.middleRows(1, n - k + 1);
  }

  SampledFn out(f.grid, f.dim());
  const double inv_gamma = 1.0 / gamma_fn(1.0 - alpha);
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double ti = f.grid.t(i);
    const Eigen::RowVectorXd fi = f.values.row(i);
    Eigen::RowVectorXd tail = fi * w->sum01[i] - conv.row(i);
    tail += (fi - f.values.row(i - 1)) * w->last_cell;
    out.values.row(i) = inv_gamma * (fi * std::pow(ti, -alpha) + alpha * tail);
  }
  out.values.row(0) = 2.0 * out.values.row(1) - out.values.row(2);
  return out;
}

SampledFn frac_derivative_right(const SampledFn& f, double alpha) {
  SampledFn reflected(f.grid, reversed_rows(f.values));
  SampledFn res = frac_derivative_left(reflected, alpha);
  return SampledFn(f.grid, reversed_rows(res.values));
}

SampledFn frac_derivative_left_weighted(const SampledFn& h, double alpha, double p) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("frac_derivative_left_weighted: alpha must lie in (0,1)");
  if (!(p > -1.0) || alpha + std::abs(p) >= 1.0)
    throw std::domain_error("frac_derivative_left_weighted: need p > -1 and alpha + |p| < 1");
  const Eigen::Index n = h.grid.steps();
  const double dt = h.grid.dt();
  const auto w = weyl_weights(n, alpha);
  const auto cm = weyl_cell_moments(n, alpha, p);
  const SampledFn f = multiply_power_weight(h, p);

  Eigen::MatrixXd conv = Eigen::MatrixXd::Zero(n + 1, h.dim());
  for (Eigen::Index k = 2; k <= n; ++k) {
    conv.middleRows(k, n - k + 1) += w->d0[k] * f.values.middleRows(0, n - k + 1) +
                                     w->d1[k] * f.values.middleRows(1, n - k + 1);
  }

  SampledFn out(h.grid, h.dim());
  const double inv_gamma = 1.0 / gamma_fn(1.0 - alpha);
  const Eigen::RowVectorXd h0 = h.values.row(0);
  const Eigen::RowVectorXd dh = h.values.row(1) - h.values.row(0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double ti = h.grid.t(i);
    const Eigen::RowVectorXd fi = f.values.row(i);
    Eigen::RowVectorXd tail(h.dim());
    if (i == 1) {
      tail = h0 * cm->first_node_h0 + dh * cm->first_node_h1;
    } else {
      tail = fi * w->sum01[i] - conv.row(i);
      tail += (fi - f.values.row(i - 1)) * w->last_cell;
      // swap the interpolated origin cell for the exact y^p moments
      tail -= (fi - f.values.row(0)) * w->d0[i] + (fi - f.values.row(1)) * w->d1[i];
      tail += fi * cm->kappa[i] - h0 * cm->nu0[i] - dh * (cm->nu1[i] / dt);
    }
    out.values.row(i) = inv_gamma * (fi * std::pow(ti, -alpha) + alpha * tail);
  }
  out.values.row(0) = 2.0 * out.values.row(1) - out.values.row(2);
  return out;
}

SampledFn multiply_power_weight(const SampledFn& f, double p) {
  SampledFn out(f.grid, f.dim());
  const Eigen::Index n = f.grid.steps();
  for (Eigen::Index i = 1; i <= n; ++i)
    out.values.row(i) = std::pow(f.grid.t(i), p) * f.values.row(i);
  if (p < 0.0)
    out.values.row(0) = 2.0 * out.values.row(1) - out.values.row(2);
  else if (p == 0.0)
    out.values.row(0) = f.values.row(0);
  // p > 0: row 0 stays zero
  if (!out.values.allFinite())
    throw std::runtime_error("multiply_power_weight: non-finite output");
  return out;
}

SampledFn finite_difference(const SampledFn& f) {
  const Eigen::Index n = f.grid.steps();
  const double inv2dt = 0.5 / f.grid.dt();
  SampledFn out(f.grid, f.dim());
  out.values.middleRows(1, n - 1) =
      inv2dt * (f.values.middleRows(2, n - 1) - f.values.middleRows(0, n - 1));
  out.values.row(0) =
      inv2dt * (-3.0 * f.values.row(0) + 4.0 * f.values.row(1) - f.values.row(2));
  out.values.row(n) =
      inv2dt * (3.0 * f.values.row(n) - 4.0 * f.values.row(n - 1) + f.values.row(n - 2));
  return out;
}

}  // namespace ompath
