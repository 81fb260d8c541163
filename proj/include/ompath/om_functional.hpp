#pragma once

#include "ompath/fbm_kernel.hpp"
#include "ompath/mckean_vlasov.hpp"
#include "ompath/types.hpp"

#include <cstdint>

namespace ompath {

/// Onsager-Machlup action split into its two integrals:
///   J = -1/2 int |phi_dot - transformed drift|^2  -  1/2 int d_H div b.
struct OMReport {
  double J = 0.0;
  double action_term = 0.0;      // always <= 0
  double divergence_term = 0.0;
  Regime regime = Regime::Classical;
};

/// phi_dot = (K^H)^{-1}(phi - phi(0)), the density of the centered path in
/// the Cameron-Martin space.  Componentwise for vector paths.
SampledFn phi_dot(const Path& phi, const HurstModel& model);

/// The drift as it enters the action: g_i = b(phi(t_i), law_i) pushed through
/// the regime's weighted operator chain,
///   singular:  s^-a I^a_{0+} s^a g,   regular:  s^a D^a_{0+} s^-a g,
/// and g itself in the classical regime.
SampledFn drift_transform(const Path& phi, const DriftSpec& drift, const LawPath& law,
                          const HurstModel& model);

/// Action of a path against a frozen law path, trapezoid rule over the grid.
OMReport om_action(const Path& phi, const DriftSpec& drift, const LawPath& law,
                   const HurstModel& model);

struct RatioQuery {
  double eps = 1.0;
  NormSpec norm = NormSpec::sup();
  long M = 10000;          // Monte Carlo samples per side
  std::uint64_t seed = 0;
  Eigen::Index law_particles = 2000;  // ensemble size of the prior law-freezing run
};

struct RatioEstimate {
  double gamma = 0.0;
  double std_error = 0.0;     // delta-method standard error of gamma
  long hits_numerator = 0;
  long hits_denominator = 0;
  long samples = 0;
  bool reliable = false;      // both hit counts positive
};

/// Monte Carlo estimate of gamma_eps(phi) = P(||X-phi|| <= eps) / P(||B^H|| <= eps).
/// The law is frozen from a prior particle run, then M fresh solution paths
/// and M fresh fBm paths are drawn from independent derived streams.
RatioEstimate estimate_ratio(const Path& phi, const DriftSpec& drift, const HurstModel& model,
                             const RatioQuery& query);

/// Variant with a caller-supplied frozen law (skips the particle run).
RatioEstimate estimate_ratio(const Path& phi, const DriftSpec& drift, const LawPath& law,
                             const HurstModel& model, const RatioQuery& query);

/// One explicit-Euler path of the frozen-law equation
///   X_{i+1} = X_i + b(X_i, law_i) dt + (B^H_{i+1} - B^H_i),
/// drawing its noise from stream (seed, stream).
Path sample_solution_path(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                          const Eigen::VectorXd& x0, std::uint64_t seed, std::uint64_t stream);

}  // namespace ompath
