// 16-point Gauss-Legendre rule on [0,1], shared by the quadrature internals.
#pragma once

namespace ompath::detail {

inline constexpr int kGauss16N = 16;
inline constexpr double kGauss16X[kGauss16N] = {
    0.0052995325041750337, 0.0277124884633837046, 0.0671843988060841224,
    0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
    0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
    0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
    0.8777022041775015132, 0.9328156011939158776, 0.9722875115366162954,
    0.9947004674958249663};
inline constexpr double kGauss16W[kGauss16N] = {
    0.0135762297058770482, 0.0311267619693239469, 0.0475792558412463928,
    0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
    0.0913017075224617918, 0.0947253052275342510, 0.0947253052275342510,
    0.0913017075224617918, 0.0845782596975012679, 0.0747979944082883680,
    0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239469,
    0.0135762297058770482};

template <class F>
double gauss16(F&& f, double a, double b) {
  const double len = b - a;
  double acc = 0.0;
  for (int q = 0; q < kGauss16N; ++q) acc += kGauss16W[q] * f(a + len * kGauss16X[q]);
  return acc * len;
}

}  // namespace ompath::detail
