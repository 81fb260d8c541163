#pragma once

namespace ompath {

/// Path-roughness regime of the driving fractional noise.
enum class Regime { Singular, Classical, Regular };

const char* regime_name(Regime r);

/// Hurst parameter together with the derived model constants.
///
/// alpha = |H - 1/2| is the order of every fractional operator in the model;
/// c_H scales the Volterra kernel and d_H scales the divergence term of the
/// action.  Both constants equal 1 in the classical regime.
struct HurstModel {
  double H;
  double alpha;
  Regime regime;
  double c_H;
  double d_H;

  bool classical() const { return regime == Regime::Classical; }
};

/// Gamma function for positive arguments. Throws std::domain_error otherwise.
double gamma_fn(double x);

/// Euler beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta_fn(double a, double b);

/// Builds the model for H in (1/4,1); H within 1e-12 of 1/2 is classical.
HurstModel make_hurst_model(double H);

}  // namespace ompath
