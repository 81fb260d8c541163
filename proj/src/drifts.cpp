#include "ompath/drifts.hpp"

#include "ompath/special_functions.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ompath {

DriftSpec zero_drift(Eigen::Index dim) {
  DriftSpec spec;
  spec.dim = dim;
  spec.b = [dim](const Eigen::VectorXd&, const LawView&) {
    return Eigen::VectorXd::Zero(dim).eval();
  };
  spec.jacobian = [dim](const Eigen::VectorXd&, const LawView&) {
    return Eigen::MatrixXd::Zero(dim, dim).eval();
  };
  return spec;
}

DriftSpec linear_decay_drift(Eigen::Index dim) {
  DriftSpec spec;
  spec.dim = dim;
  spec.b = [](const Eigen::VectorXd& x, const LawView&) { return (-x).eval(); };
  spec.jacobian = [dim](const Eigen::VectorXd&, const LawView&) {
    return (-Eigen::MatrixXd::Identity(dim, dim)).eval();
  };
  return spec;
}

DriftSpec example1_sine_drift() {
  DriftSpec spec;
  spec.dim = 1;
  spec.b = [](const Eigen::VectorXd&, const LawView& law) {
    Eigen::VectorXd out(1);
    out[0] = std::sin(law.mean[0]);
    return out;
  };
  spec.jacobian = [](const Eigen::VectorXd&, const LawView&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();  // no spatial dependence
  };
  return spec;
}

DriftSpec example2_pendulum_drift() {
  const double K = std::pow(gamma_fn(0.25), 4) / (4.0 * M_PI);
  DriftSpec spec;
  spec.dim = 2;
  spec.b = [K](const Eigen::VectorXd& x, const LawView& law) {
    Eigen::VectorXd out(2);
    out[0] = x[1];
    out[1] = -K * std::sin(law.mean[0]);
    return out;
  };
  spec.jacobian = [](const Eigen::VectorXd&, const LawView&) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2, 2);
    jac(0, 1) = 1.0;  // divergence-free
    return jac;
  };
  return spec;
}

namespace {

// RK4 for m' = g(m); the mean equations of the built-in drifts are closed.
Eigen::MatrixXd integrate_mean_ode(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                   const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const double h = grid.dt();
  Eigen::MatrixXd means(grid.nodes(), x0.size());
  Eigen::VectorXd m = x0;
  means.row(0) = m.transpose();
  for (Eigen::Index i = 0; i < grid.steps(); ++i) {
    const Eigen::VectorXd k1 = g(m);
    const Eigen::VectorXd k2 = g(m + 0.5 * h * k1);
    const Eigen::VectorXd k3 = g(m + 0.5 * h * k2);
    const Eigen::VectorXd k4 = g(m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    means.row(i + 1) = m.transpose();
  }
  return means;
}

}  // namespace

LawPath exact_mean_law(const std::string& drift_name, const Eigen::VectorXd& x0,
                       const TimeGrid& grid) {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> mean_rhs;
  if (drift_name == "zero") {
    mean_rhs = [](const Eigen::VectorXd& m) { return (0.0 * m).eval(); };
  } else if (drift_name == "linear-decay") {
    mean_rhs = [](const Eigen::VectorXd& m) { return (-m).eval(); };
  } else if (drift_name == "example1-sine") {
    mean_rhs = [](const Eigen::VectorXd& m) {
      Eigen::VectorXd out(1);
      out[0] = std::sin(m[0]);
      return out;
    };
  } else if (drift_name == "example2-pendulum") {
    const double K = std::pow(gamma_fn(0.25), 4) / (4.0 * M_PI);
    mean_rhs = [K](const Eigen::VectorXd& m) {
      Eigen::VectorXd out(2);
      out[0] = m[1];
      out[1] = -K * std::sin(m[0]);
      return out;
    };
  } else {
    throw std::invalid_argument("exact_mean_law: unknown drift '" + drift_name + "'");
  }
  return law_path_from_means(grid, integrate_mean_ode(mean_rhs, x0, grid));
}

DriftSpec drift_by_name(const std::string& name, Eigen::Index dim) {
  if (name == "zero") return zero_drift(dim);
  if (name == "linear-decay") return linear_decay_drift(dim);
  if (name == "example1-sine") {
    if (dim != 1) throw std::invalid_argument("example1-sine is one-dimensional");
    return example1_sine_drift();
  }
  if (name == "example2-pendulum") {
    if (dim != 2) throw std::invalid_argument("example2-pendulum is two-dimensional");
    return example2_pendulum_drift();
  }
  throw std::invalid_argument("unknown drift '" + name +
                              "'; available: zero, linear-decay, example1-sine, example2-pendulum");
}

std::vector<std::string> drift_names() {
  return {"zero", "linear-decay", "example1-sine", "example2-pendulum"};
}

}  // namespace ompath
