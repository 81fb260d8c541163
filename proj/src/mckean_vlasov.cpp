#include "ompath/mckean_vlasov.hpp"

#include "ompath/fbm_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ompath {

Eigen::MatrixXd drift_jacobian(const DriftSpec& drift, const Eigen::VectorXd& x,
                               const LawView& law) {
  if (drift.jacobian) return drift.jacobian(x, law);
  const Eigen::Index d = drift.dim;
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (drift.b(xp, law) - drift.b(xm, law)) / (2.0 * h);
  }
  return jac;
}

double drift_divergence(const DriftSpec& drift, const Eigen::VectorXd& x, const LawView& law) {
  return drift_jacobian(drift, x, law).trace();
}

Ensemble simulate_ensemble(const DriftSpec& drift, const Eigen::VectorXd& x0,
                           const HurstModel& model, const TimeGrid& grid, Eigen::Index N,
                           std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("simulate_ensemble: need N >= 2 particles");
  if (x0.size() != drift.dim)
    throw std::invalid_argument("simulate_ensemble: x0 dimension differs from drift dimension");

  const Eigen::Index n = grid.steps();
  const Eigen::Index d = drift.dim;
  const double dt = grid.dt();

  if (!model.classical()) kernel_cell_averages(grid, model);  // warm the shared cache

  Ensemble ensemble{grid, {}};
  ensemble.paths.reserve(static_cast<std::size_t>(N));
  std::vector<Path> noise;
  noise.reserve(static_cast<std::size_t>(N));
  for (Eigen::Index k = 0; k < N; ++k) {
    noise.push_back(sample_fbm_volterra(grid, model, d, seed, static_cast<std::uint64_t>(k)));
    ensemble.paths.emplace_back(grid, d);
    ensemble.paths.back().values.row(0) = x0.transpose();
  }

  EmpiricalLaw law_now;
  law_now.atoms.resize(N, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < N; ++k) law_now.atoms.row(k) = ensemble.paths[k].values.row(i);
    LawView view;
    view.mean = empirical_mean(law_now);
    if (drift.law_mode == LawMode::FullEmpirical) view.atoms = &law_now.atoms;

    for (Eigen::Index k = 0; k < N; ++k) {
      auto& values = ensemble.paths[k].values;
      const Eigen::VectorXd state = values.row(i).transpose();
      values.row(i + 1) = values.row(i) + dt * drift.b(state, view).transpose() +
                          (noise[k].values.row(i + 1) - noise[k].values.row(i));
      if (!values.row(i + 1).allFinite())
        throw std::runtime_error("simulate_ensemble: non-finite state for particle " +
                                 std::to_string(k) + " at step " + std::to_string(i + 1) +
                                 " (drift blow-up?)");
    }
  }
  return ensemble;
}

LawPath law_path(const Ensemble& ensemble, LawMode mode) {
  const Eigen::Index nodes = ensemble.grid.nodes();
  const Eigen::Index N = ensemble.size();
  const Eigen::Index d = ensemble.dim();

  LawPath lp{ensemble.grid, mode, Eigen::MatrixXd(nodes, d), {}};
  if (mode == LawMode::FullEmpirical) lp.atoms.resize(static_cast<std::size_t>(nodes));
  for (Eigen::Index i = 0; i < nodes; ++i) {
    Eigen::MatrixXd atoms(N, d);
    for (Eigen::Index k = 0; k < N; ++k) atoms.row(k) = ensemble.paths[k].values.row(i);
    lp.means.row(i) = atoms.colwise().mean();
    if (mode == LawMode::FullEmpirical) lp.atoms[static_cast<std::size_t>(i)] = std::move(atoms);
  }
  return lp;
}

LawPath law_path_from_means(const TimeGrid& grid, Eigen::MatrixXd means) {
  if (means.rows() != grid.nodes())
    throw std::invalid_argument("law_path_from_means: one mean per grid node required");
  return LawPath{grid, LawMode::MeanOnly, std::move(means), {}};
}

double wasserstein2_1d(const EmpiricalLaw& mu, const EmpiricalLaw& nu) {
  if (mu.atoms.cols() != 1 || nu.atoms.cols() != 1)
    throw std::invalid_argument("wasserstein2_1d: only one-dimensional laws are supported");
  if (mu.atoms.rows() != nu.atoms.rows())
    throw std::invalid_argument("wasserstein2_1d: atom counts must match");

  std::vector<double> a(mu.atoms.data(), mu.atoms.data() + mu.atoms.rows());
  std::vector<double> b(nu.atoms.data(), nu.atoms.data() + nu.atoms.rows());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace ompath
