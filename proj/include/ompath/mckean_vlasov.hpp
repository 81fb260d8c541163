#pragma once

#include "ompath/special_functions.hpp"
#include "ompath/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ompath {

/// Equal-weight empirical measure with one atom per row.
struct EmpiricalLaw {
  Eigen::MatrixXd atoms;  // N x dim
};

inline Eigen::VectorXd empirical_mean(const EmpiricalLaw& law) {
  return law.atoms.colwise().mean().transpose();
}

/// What a drift sees of the law at one time: the mean is always available,
/// atoms only in FullEmpirical mode.
struct LawView {
  Eigen::VectorXd mean;
  const Eigen::MatrixXd* atoms = nullptr;  // null in MeanOnly mode
};

enum class LawMode { FullEmpirical, MeanOnly };

/// Drift b(x, law) with optional spatial Jacobian.  When the Jacobian is
/// absent a central finite-difference substitute with step 1e-6*(1+|x|)
/// is used.  b must be bounded and Lipschitz for the model hypotheses to
/// apply; that is the caller's contract, exercised by the built-in drifts.
struct DriftSpec {
  Eigen::Index dim = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const LawView&)> b;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const LawView&)> jacobian;  // optional
  LawMode law_mode = LawMode::MeanOnly;
};

/// Jacobian of the drift at (x, law): supplied one, else finite differences.
Eigen::MatrixXd drift_jacobian(const DriftSpec& drift, const Eigen::VectorXd& x,
                               const LawView& law);

/// trace of drift_jacobian
double drift_divergence(const DriftSpec& drift, const Eigen::VectorXd& x, const LawView& law);

/// N particle paths on a shared grid.
struct Ensemble {
  TimeGrid grid;
  std::vector<Path> paths;

  Eigen::Index size() const { return static_cast<Eigen::Index>(paths.size()); }
  Eigen::Index dim() const { return paths.empty() ? 0 : paths.front().dim(); }
};

/// Time-indexed laws used to freeze the distributional drift coefficient:
/// nodewise means always, nodewise atom sets only in FullEmpirical mode.
struct LawPath {
  TimeGrid grid;
  LawMode mode = LawMode::MeanOnly;
  Eigen::MatrixXd means;                  // (n+1) x dim
  std::vector<Eigen::MatrixXd> atoms;     // per node, FullEmpirical only

  LawView at(Eigen::Index node) const {
    LawView view;
    view.mean = means.row(node).transpose();
    if (mode == LawMode::FullEmpirical) view.atoms = &atoms[static_cast<std::size_t>(node)];
    return view;
  }
};

/// Explicit Euler simulation of the interacting particle system
///   X^k_{i+1} = X^k_i + b(X^k_i, mu_i) dt + (B^{H,k}_{i+1} - B^{H,k}_i),
/// with mu_i the empirical law of the N particles at the step start and
/// independent fBm paths drawn from streams (seed, k).
Ensemble simulate_ensemble(const DriftSpec& drift, const Eigen::VectorXd& x0,
                           const HurstModel& model, const TimeGrid& grid, Eigen::Index N,
                           std::uint64_t seed);

/// Nodewise empirical laws of an ensemble.
LawPath law_path(const Ensemble& ensemble, LawMode mode);

/// Law path with prescribed nodewise means (MeanOnly); covers analytically
/// known laws and the Dirac law of a deterministic path.
LawPath law_path_from_means(const TimeGrid& grid, Eigen::MatrixXd means);

/// Exact L2-Wasserstein distance between two equal-size one-dimensional
/// empirical measures (sorted coupling).
double wasserstein2_1d(const EmpiricalLaw& mu, const EmpiricalLaw& nu);

}  // namespace ompath
