#pragma once

#include "ompath/special_functions.hpp"
#include "ompath/types.hpp"

#include <cstdint>
#include <memory>

namespace ompath {

/// Covariance of fractional Brownian motion, (|t|^2H + |s|^2H - |t-s|^2H)/2.
double fbm_covariance(double t, double s, const HurstModel& model);

/// Volterra kernel K^H(t,s) of the fBm integral representation, 0 < s < t <= 1.
///
/// The singular regime uses the kernel of the H < 1/2 representation with its
/// (theta-s)^(H-3/2) endpoint singularity removed analytically (integration by
/// parts plus a power-law change of variable); the regular regime integrates
/// the single-integral H >= 1/2 form after the matching change of variable.
/// Relative accuracy target 1e-8.
double kernel_KH(double t, double s, const HurstModel& model);

/// Cell-averaged kernel weights: entry (i-1, j) holds the average of
/// K^H(t_i, .) over [t_j, t_{j+1}] for j < i.  Cached per (grid, H).
std::shared_ptr<const Eigen::MatrixXd> kernel_cell_averages(const TimeGrid& grid,
                                                            const HurstModel& model);

/// The operator (K^H h)(t) = integral_0^t K^H(t,s) h(s) ds, computed through
/// its fractional-integral factorization.  Componentwise over h's columns.
Path apply_KH(const SampledFn& h, const HurstModel& model);

/// Inverse operator applied to the centered path p - p(0), using the
/// differentiable-path form: finite-difference h', then the weighted
/// fractional chain of the regime.  Classical regime returns h' itself.
SampledFn apply_KH_inverse(const Path& p, const HurstModel& model);

/// fBm path from i.i.d. normal increments pushed through the cell-averaged
/// Volterra kernel; the classical regime is an exact cumulative sum.
/// (seed, stream) selects a reproducible noise stream.
Path sample_fbm_volterra(const TimeGrid& grid, const HurstModel& model, Eigen::Index dim,
                         std::uint64_t seed, std::uint64_t stream = 0);

/// Exact-covariance fBm sampler (dense Cholesky factorization, n <= 2048).
/// On a round-off factorization failure a single 1e-12 diagonal jitter is
/// applied; a second failure is a hard error.
Path sample_fbm_cholesky(const TimeGrid& grid, const HurstModel& model, Eigen::Index dim,
                         std::uint64_t seed, std::uint64_t stream = 0);

/// Sup of the nodewise Euclidean norms.
double norm_sup(const Path& p);

/// Exact discrete Hoelder norm of order beta over all node pairs, O(n^2).
double norm_holder(const Path& p, double beta);

struct NormSpec {
  enum class Kind { Sup, Holder };
  Kind kind = Kind::Sup;
  double beta = 0.0;  // required iff kind == Holder

  static NormSpec sup() { return {Kind::Sup, 0.0}; }
  static NormSpec holder(double beta) { return {Kind::Holder, beta}; }
};

double path_norm(const Path& p, const NormSpec& norm);

/// Checks the theorem-admissible Hoelder window for the regime:
/// singular 0 < beta < H - 1/4, regular H - 1/2 < beta < H - 1/4
/// (classical uses the singular window).  Throws std::domain_error otherwise.
void validate_norm_for_model(const NormSpec& norm, const HurstModel& model);

struct SmallBallEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  long hits = 0;
  long samples = 0;
  bool any_hits = false;  // false: enlarge eps or M
};

/// Plain Monte Carlo estimate of P(||B^H|| <= eps) over M sampled paths.
/// Path k draws from stream (seed, k), so the result is schedule-independent.
SmallBallEstimate estimate_small_ball(const TimeGrid& grid, const HurstModel& model,
                                      const NormSpec& norm, double eps, long M,
                                      std::uint64_t seed);

}  // namespace ompath
