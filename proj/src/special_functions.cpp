#include "ompath/special_functions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ompath {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Singular: return "singular";
    case Regime::Classical: return "classical";
    case Regime::Regular: return "regular";
  }
  return "unknown";
}

double gamma_fn(double x) {
  if (!(x > 0.0))
    throw std::domain_error("gamma_fn: argument must be positive, got " + std::to_string(x));
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_fn: arguments must be positive");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

HurstModel make_hurst_model(double H) {
  if (!(H > 0.25) || !(H < 1.0))
    throw std::domain_error("make_hurst_model: H must lie in (1/4,1), got " + std::to_string(H));

  HurstModel m;
  m.H = H;
  m.alpha = std::abs(H - 0.5);
  // alpha appears as a fractional order; treat H within 1e-12 of 1/2 as exact.
  if (m.alpha < 1e-12) {
    m.regime = Regime::Classical;
    m.alpha = 0.0;
    m.H = 0.5;
    m.c_H = 1.0;
    m.d_H = 1.0;
    return m;
  }
  m.regime = (H < 0.5) ? Regime::Singular : Regime::Regular;
  const double num = 2.0 * H * gamma_fn(1.5 - H);
  const double den = gamma_fn(H + 0.5) * gamma_fn(2.0 - 2.0 * H);
  m.c_H = std::sqrt(num / den);
  m.d_H = std::sqrt(num * gamma_fn(H + 0.5) / gamma_fn(2.0 - 2.0 * H));
  return m;
}

}  // namespace ompath
