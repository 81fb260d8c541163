#pragma once

#include "ompath/mckean_vlasov.hpp"
#include "ompath/om_functional.hpp"
#include "ompath/types.hpp"

#include <stdexcept>
#include <vector>

namespace ompath {

struct MppOptions {
  int max_iters = 5000;
  double grad_tol = 1e-6;    // sup norm of the discrete gradient
  double ls_shrink = 0.5;
  double ls_c1 = 1e-4;
  double fd_step = 1e-6;     // relative finite-difference step
  int ls_max_shrinks = 60;
};

struct MppResult {
  Path path;
  double J = 0.0;
  int iters = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::vector<double> objective_history;  // F after the start and each accepted step
};

/// Thrown when Armijo backtracking cannot find a descent step; carries the
/// best iterate reached.
struct LineSearchFailure : std::runtime_error {
  explicit LineSearchFailure(MppResult r)
      : std::runtime_error("minimize_action: line search failed after maximum shrinks"),
        best(std::move(r)) {}
  MppResult best;
};

/// Most probable transition path between pinned endpoints: direct minimization
/// of F(phi) = -om_action(phi) over the interior node values.  Gradient
/// descent with Armijo backtracking (the trial step warm-started from a
/// Barzilai-Borwein estimate), central finite-difference gradients,
/// initialized from the straight line x0 -> x1.
MppResult minimize_action(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                          const TimeGrid& grid, const MppOptions& opts = {});

/// The exact discrete objective minimize_action descends for a candidate
/// path: -om_action evaluated on the doubled-grid piecewise-linear lift of
/// phi.  (The lift closes the sawtooth null space of nodewise central
/// differences; reported J values still come from om_action on phi's grid.)
double mpp_objective(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                     const Path& phi);

/// Classical-regime Euler-Lagrange residual of L = (phi' - b)^2 + div b,
///   r = dL/dphi - d/dt dL/dphi',
/// central differences, interior nodes only (endpoint rows are zero).
/// Throws std::domain_error for a non-classical model.
SampledFn el_residual_classical(const Path& phi, const DriftSpec& drift, const LawPath& law,
                                const HurstModel& model);

/// Reference trajectory of Z'' + K sin Z = 0, K = Gamma(1/4)^4 / (4 pi),
/// from (Z, Z') = (-pi/2, 0): classic RK4 on the grid.  The constant K makes
/// the transit to (pi/2, 0) take exactly unit time.  Columns are (Z, Z').
Path pendulum_reference(const TimeGrid& grid);

}  // namespace ompath
