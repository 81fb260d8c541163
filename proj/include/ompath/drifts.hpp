#pragma once

#include "ompath/mckean_vlasov.hpp"

#include <string>
#include <vector>

namespace ompath {

/// b = 0.
DriftSpec zero_drift(Eigen::Index dim);

/// b(x) = -x, no law dependence.
DriftSpec linear_decay_drift(Eigen::Index dim);

/// b(x, mu) = sin(mean(mu)), scalar; pi is a stable equilibrium of the
/// noise-free flow and x + B^H solves the equation started at x = pi.
DriftSpec example1_sine_drift();

/// Two-dimensional stochastic pendulum drift
///   b((x,y), mu) = ( y, -K sin(mean_x(mu)) ),  K = Gamma(1/4)^4 / (4 pi).
DriftSpec example2_pendulum_drift();

/// The exact mean path of the built-in drifts: each has a closed nodewise
/// mean ODE m' = E b (law-only or linear drifts), integrated here by RK4.
/// Freezing the law from these means avoids the O(1/sqrt(N)) particle noise.
LawPath exact_mean_law(const std::string& drift_name, const Eigen::VectorXd& x0,
                       const TimeGrid& grid);

/// Catalog lookup by CLI name: zero, linear-decay, example1-sine,
/// example2-pendulum.  Throws std::invalid_argument for unknown names.
DriftSpec drift_by_name(const std::string& name, Eigen::Index dim);

std::vector<std::string> drift_names();

}  // namespace ompath
