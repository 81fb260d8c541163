#include "ompath/om_functional.hpp"

#include "ompath/frac_calculus.hpp"
#include "ompath/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ompath {

SampledFn phi_dot(const Path& phi, const HurstModel& model) {
  return apply_KH_inverse(phi, model);
}

SampledFn drift_transform(const Path& phi, const DriftSpec& drift, const LawPath& law,
                          const HurstModel& model) {
  if (law.grid != phi.grid)
    throw std::invalid_argument("drift_transform: law path and phi live on different grids");

  SampledFn sampled(phi.grid, drift.dim);
  for (Eigen::Index i = 0; i < phi.grid.nodes(); ++i)
    sampled.values.row(i) = drift.b(phi.values.row(i).transpose(), law.at(i)).transpose();

  if (model.classical()) return sampled;
  const double a = model.alpha;
  SampledFn out(phi.grid, drift.dim);
  if (model.regime == Regime::Singular) {
    SampledFn inner = frac_integral_left_weighted(sampled, a, a);
    out = multiply_power_weight(inner, -a);
  } else {
    SampledFn inner = frac_derivative_left_weighted(sampled, a, -a);
    out = multiply_power_weight(inner, a);
  }
  out.values /= model.d_H;  // (K^H)^{-1} of int_0^. b du, normalization as in apply_KH_inverse
  return out;
}

OMReport om_action(const Path& phi, const DriftSpec& drift, const LawPath& law,
                   const HurstModel& model) {
  if (law.grid != phi.grid)
    throw std::invalid_argument("om_action: law path and phi live on different grids");
  if (phi.dim() != drift.dim)
    throw std::invalid_argument("om_action: phi dimension differs from drift dimension");

  const SampledFn velocity = phi_dot(phi, model);
  const SampledFn transformed = drift_transform(phi, drift, law, model);

  const Eigen::Index nodes = phi.grid.nodes();
  Eigen::VectorXd quad(nodes), divergence(nodes);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    quad[i] = (velocity.values.row(i) - transformed.values.row(i)).squaredNorm();
    divergence[i] = drift_divergence(drift, phi.values.row(i).transpose(), law.at(i));
  }
  if (!quad.allFinite() || !divergence.allFinite())
    throw std::runtime_error("om_action: non-finite integrand");

  OMReport report;
  report.regime = model.regime;
  report.action_term = -0.5 * trapezoid(phi.grid, quad);
  report.divergence_term = -0.5 * model.d_H * trapezoid(phi.grid, divergence);
  report.J = report.action_term + report.divergence_term;
  return report;
}

namespace {

// stream-id namespaces: the numerator and denominator Monte Carlo runs use
// disjoint derived streams
constexpr std::uint64_t kNumeratorTag = 1ULL << 32;
constexpr std::uint64_t kDenominatorTag = 2ULL << 32;
constexpr std::uint64_t kLawTag = 3ULL << 32;

}  // namespace

Path sample_solution_path(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                          const Eigen::VectorXd& x0, std::uint64_t seed,
                          std::uint64_t stream) {
  const TimeGrid& grid = law.grid;
  const Eigen::Index n = grid.steps();
  const double dt = grid.dt();
  Path noise = sample_fbm_volterra(grid, model, drift.dim, seed, stream);
  Path x(grid, drift.dim);
  x.values.row(0) = x0.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd state = x.values.row(i).transpose();
    x.values.row(i + 1) = x.values.row(i) + dt * drift.b(state, law.at(i)).transpose() +
                          (noise.values.row(i + 1) - noise.values.row(i));
  }
  return x;
}

RatioEstimate estimate_ratio(const Path& phi, const DriftSpec& drift, const HurstModel& model,
                             const RatioQuery& query) {
  Ensemble prior = simulate_ensemble(drift, phi.initial().transpose(), model, phi.grid,
                                     query.law_particles, query.seed ^ kLawTag);
  return estimate_ratio(phi, drift, law_path(prior, drift.law_mode), model, query);
}

RatioEstimate estimate_ratio(const Path& phi, const DriftSpec& drift, const LawPath& law,
                             const HurstModel& model, const RatioQuery& query) {
  if (!(query.eps > 0.0) || query.M < 1)
    throw std::invalid_argument("estimate_ratio: need eps > 0 and M >= 1");
  validate_norm_for_model(query.norm, model);

  const TimeGrid& grid = phi.grid;
  if (!model.classical()) kernel_cell_averages(grid, model);
  const Eigen::VectorXd x0 = phi.initial().transpose();

  long hits_num = 0, hits_den = 0;
  for (long k = 0; k < query.M; ++k) {
    Path x = sample_solution_path(drift, law, model, x0, query.seed,
                                  kNumeratorTag + static_cast<std::uint64_t>(k));
    Path diff(grid, x.values - phi.values);
    if (path_norm(diff, query.norm) <= query.eps) ++hits_num;

    Path b = sample_fbm_volterra(grid, model, drift.dim, query.seed,
                                 kDenominatorTag + static_cast<std::uint64_t>(k));
    if (path_norm(b, query.norm) <= query.eps) ++hits_den;
  }

  if (hits_den == 0)
    throw std::runtime_error(
        "estimate_ratio: no denominator hits; enlarge eps or the sample count M");

  RatioEstimate est;
  est.hits_numerator = hits_num;
  est.hits_denominator = hits_den;
  est.samples = query.M;
  est.reliable = hits_num > 0;
  const double m = static_cast<double>(query.M);
  const double p_num = hits_num / m;
  const double p_den = hits_den / m;
  est.gamma = p_num / p_den;
  if (hits_num > 0) {
    const double var_log = (1.0 - p_num) / (m * p_num) + (1.0 - p_den) / (m * p_den);
    est.std_error = est.gamma * std::sqrt(var_log);
  }
  return est;
}

}  // namespace ompath
