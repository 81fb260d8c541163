#pragma once

#include "ompath/types.hpp"

namespace ompath {

/// Left Riemann-Liouville fractional integral of order alpha in (0,1].
///
/// (I^a_{0+} f)(t) = 1/Gamma(a) * integral_0^t (t-y)^(a-1) f(y) dy, evaluated
/// at the grid nodes with a product-trapezoidal rule: f is replaced by its
/// piecewise-linear interpolant and the weakly singular moments are taken
/// exactly on each cell.  alpha = 1 reduces to the plain trapezoid
/// antiderivative.
SampledFn frac_integral_left(const SampledFn& f, double alpha);

/// Right fractional integral (I^a_{1-} f)(t) = 1/Gamma(a) * integral_t^1 (y-t)^(a-1) f(y) dy.
SampledFn frac_integral_right(const SampledFn& f, double alpha);

/// Left Riemann-Liouville fractional derivative of order alpha in (0,1),
/// evaluated through the Weyl representation
///   D^a_{0+} f(x) = 1/Gamma(1-a) * ( f(x)/x^a + a * integral_0^x (f(x)-f(y)) / (x-y)^(a+1) dy ).
/// The node t_0 is filled by linear extrapolation from t_1, t_2.
SampledFn frac_derivative_left(const SampledFn& f, double alpha);

/// Right fractional derivative, the t -> 1-t mirror of frac_derivative_left.
SampledFn frac_derivative_right(const SampledFn& f, double alpha);

/// Pointwise weight values[i] <- t_i^p * values[i].  For p < 0 the node t_0 is
/// assigned by linear extrapolation from the weighted values at t_1, t_2.
SampledFn multiply_power_weight(const SampledFn& f, double p);

/// Fused I^alpha_{0+}(s^p h) for p > -1, alpha + p >= 0.  Away from the origin
/// this is frac_integral_left of the weighted samples; on the first cell the
/// power factor y^p is kept inside the exact moments instead of being
/// interpolated, which matters whenever h(0) != 0 and p < 0.  The node t_0
/// carries the analytic limit (h(0) Gamma(1-alpha) when p = -alpha, else 0).
SampledFn frac_integral_left_weighted(const SampledFn& h, double alpha, double p);

/// Fused D^alpha_{0+}(s^p h), the Weyl-form counterpart: the origin cell of
/// the singular integral keeps y^p inside exact moments.  Every node couples
/// to that cell, so this is what makes the derivative chains accurate when
/// h(0) != 0 and p < 0.  Needs p > -1, alpha + |p| < 1.
SampledFn frac_derivative_left_weighted(const SampledFn& h, double alpha, double p);

/// Second-order finite differences: central at interior nodes, one-sided
/// three-point stencils at the endpoints.  Exact on quadratics.
SampledFn finite_difference(const SampledFn& f);

}  // namespace ompath
