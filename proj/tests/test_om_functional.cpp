#include "ompath/om_functional.hpp"

#include "ompath/drifts.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ompath;

namespace {

LawPath dirac_law(const TimeGrid& grid, double value, Eigen::Index dim = 1) {
  return law_path_from_means(grid, Eigen::MatrixXd::Constant(grid.nodes(), dim, value));
}

Path line(const TimeGrid& grid, double x0, double slope) {
  Path p(grid, 1);
  for (Eigen::Index i = 0; i < grid.nodes(); ++i) p.values(i, 0) = x0 + slope * grid.t(i);
  return p;
}

}  // namespace

TEST_CASE("phi_dot on classical lines and constants") {
  const HurstModel half = make_hurst_model(0.5);
  TimeGrid grid(64);
  SampledFn v = phi_dot(line(grid, 2.0, 0.7), half);
  CHECK((v.values.array() - 0.7).abs().maxCoeff() < 1e-12);

  for (double H : {0.3, 0.5, 0.7}) {
    SampledFn zero = phi_dot(line(grid, 1.3, 0.0), make_hurst_model(H));
    CHECK(zero.values.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("phi_dot round trip: apply_KH(phi_dot(phi)) + x recovers phi") {
  // In the regular regime phi_dot itself is s^(-alpha)-singular at the
  // origin, so this direction converges but is limited by how the grid
  // represents that singularity (the inverse-after-forward direction is the
  // tight one, tested with the operators).
  for (double H : {0.3, 0.7}) {
    const HurstModel m = make_hurst_model(H);
    double prev = 1e9;
    for (Eigen::Index n : {64, 128, 256}) {
      TimeGrid grid(n);
      Path phi(grid, 1);
      for (Eigen::Index i = 0; i <= n; ++i) {
        const double t = grid.t(i);
        phi.values(i, 0) = 0.4 + t * (1.0 - t);
      }
      Path back = apply_KH(phi_dot(phi, m), m);
      const double err = (back.values.array() + 0.4 - phi.values.array()).abs().maxCoeff();
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < (H < 0.5 ? 1e-3 : 2.5e-2));
  }
}

TEST_CASE("drift transform vanishes for zero drift in every regime") {
  TimeGrid grid(48);
  for (double H : {0.3, 0.5, 0.7}) {
    const HurstModel m = make_hurst_model(H);
    SampledFn g = drift_transform(line(grid, 0.2, 1.0), zero_drift(1), dirac_law(grid, 0.0), m);
    CHECK(g.values.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("classical drift transform is the raw sampled drift") {
  TimeGrid grid(48);
  const HurstModel half = make_hurst_model(0.5);
  Path phi = line(grid, 0.0, 1.0);
  SampledFn g = drift_transform(phi, linear_decay_drift(1), dirac_law(grid, 0.0), half);
  CHECK((g.values + phi.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("singular drift transform of a constant drift: power-rule closed form") {
  // s^-a I^a s^a 1 = Gamma(1+a)/Gamma(1+2a) s^a, then the d_H normalization
  const HurstModel m = make_hurst_model(0.3);
  const double a = m.alpha;
  TimeGrid grid(256);
  DriftSpec one;
  one.dim = 1;
  one.b = [](const Eigen::VectorXd&, const LawView&) {
    return Eigen::VectorXd::Constant(1, 1.0).eval();
  };
  one.jacobian = [](const Eigen::VectorXd&, const LawView&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  SampledFn g = drift_transform(line(grid, 0.0, 1.0), one, dirac_law(grid, 0.0), m);
  const double coeff = gamma_fn(1.0 + a) / gamma_fn(1.0 + 2.0 * a) / m.d_H;
  double worst = 0.0, worst_interior = 0.0;
  for (Eigen::Index i = 1; i <= grid.steps(); ++i) {
    const double err = std::abs(g.values(i, 0) - coeff * std::pow(grid.t(i), a));
    worst = std::max(worst, err);
    if (grid.t(i) >= 0.1) worst_interior = std::max(worst_interior, err);
  }
  CHECK(worst < 2e-3);           // boundary layer at the first nodes
  CHECK(worst_interior < 2e-4);
  // spot value against the defining-integral oracle route
  const double t_probe = 0.5;
  const double direct =
      oracles::frac_integral_left_of([&](double y) { return std::pow(y, a); }, t_probe, a) *
      std::pow(t_probe, -a) / m.d_H;
  CHECK(g.values(128, 0) == doctest::Approx(direct).epsilon(1e-3));
}

TEST_CASE("om action trivial and classical values") {
  TimeGrid grid(128);
  const HurstModel half = make_hurst_model(0.5);
  const LawPath law = dirac_law(grid, 0.0);

  for (double H : {0.3, 0.5, 0.7}) {
    OMReport rest = om_action(line(grid, 1.0, 0.0), zero_drift(1), law,
                              make_hurst_model(H));
    CHECK(rest.J == doctest::Approx(0.0).epsilon(1e-10));
  }

  OMReport straight = om_action(line(grid, 1.0, -0.8), zero_drift(1), law, half);
  CHECK(straight.J == doctest::Approx(-0.32).epsilon(1e-8));
  CHECK(straight.action_term == straight.J);
  CHECK(straight.divergence_term == 0.0);
  CHECK(straight.J == straight.action_term + straight.divergence_term);
  CHECK(straight.action_term <= 0.0);
}

TEST_CASE("example 1 classical action of the straight transition path") {
  TimeGrid grid(128);
  const HurstModel half = make_hurst_model(0.5);
  const LawPath law = dirac_law(grid, M_PI);  // exact law mean of X = pi + B
  Path phi = line(grid, M_PI, 2.0 - M_PI);
  OMReport rep = om_action(phi, example1_sine_drift(), law, half);
  CHECK(rep.J == doctest::Approx(-0.5 * (2.0 - M_PI) * (2.0 - M_PI)).epsilon(1e-9));
  CHECK(rep.divergence_term == doctest::Approx(0.0));
}

TEST_CASE("pendulum drift has zero divergence term") {
  TimeGrid grid(64);
  const LawPath law =
      law_path_from_means(grid, Eigen::MatrixXd::Zero(grid.nodes(), 2));
  Path phi(grid, 2);
  for (Eigen::Index i = 0; i < grid.nodes(); ++i) {
    phi.values(i, 0) = std::sin(grid.t(i));
    phi.values(i, 1) = grid.t(i);
  }
  for (double H : {0.3, 0.5, 0.7}) {
    OMReport rep = om_action(phi, example2_pendulum_drift(), law, make_hurst_model(H));
    CHECK(rep.divergence_term == doctest::Approx(0.0));
  }
}

TEST_CASE("divergence term uses the jacobian trace") {
  TimeGrid grid(64);
  const HurstModel half = make_hurst_model(0.5);
  const LawPath law = dirac_law(grid, 0.0, 2);
  Path rest(grid, 2);
  // b = -x in two dimensions: J = -1/2 int |0 - (-x)|^2 - 1/2 int tr(-I)
  OMReport rep = om_action(rest, linear_decay_drift(2), law, half);
  CHECK(rep.divergence_term == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.action_term == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("law invariance when the drift ignores the law") {
  TimeGrid grid(96);
  const HurstModel m = make_hurst_model(0.7);
  Path phi = line(grid, 0.3, 0.9);
  OMReport a = om_action(phi, linear_decay_drift(1), dirac_law(grid, -5.0), m);
  OMReport b = om_action(phi, linear_decay_drift(1), dirac_law(grid, 11.0), m);
  CHECK(a.J == doctest::Approx(b.J).epsilon(1e-13));
}

TEST_CASE("shift covariance of the classical zero-drift action") {
  TimeGrid grid(64);
  const HurstModel half = make_hurst_model(0.5);
  const LawPath law = dirac_law(grid, 0.0);
  Path a(grid, 1), b(grid, 1);
  for (Eigen::Index i = 0; i < grid.nodes(); ++i) {
    const double psi = std::sin(2.0 * grid.t(i));
    a.values(i, 0) = 0.0 + psi;
    b.values(i, 0) = 4.2 + psi;
  }
  CHECK(om_action(a, zero_drift(1), law, half).J ==
        doctest::Approx(om_action(b, zero_drift(1), law, half).J).epsilon(1e-12));
}

TEST_CASE("regime continuity near H = 1/2 for zero drift") {
  TimeGrid grid(256);
  const LawPath law = dirac_law(grid, 0.0);
  Path phi(grid, 1);
  for (Eigen::Index i = 0; i < grid.nodes(); ++i) {
    const double t = grid.t(i);
    phi.values(i, 0) = 0.5 * t + 0.3 * t * (1.0 - t);
  }
  const double classical = om_action(phi, zero_drift(1), law, make_hurst_model(0.5)).J;
  for (double H : {0.5 - 1e-3, 0.5 + 1e-3}) {
    const double J = om_action(phi, zero_drift(1), law, make_hurst_model(H)).J;
    CHECK(std::abs(J - classical) <= 0.05 * std::abs(classical));
  }
}

TEST_CASE("ratio estimate: zero drift at the rest path") {
  TimeGrid grid(64);
  const HurstModel half = make_hurst_model(0.5);
  RatioQuery q;
  q.eps = 1.0;
  q.M = 4000;
  q.seed = 12;
  q.law_particles = 16;
  RatioEstimate est = estimate_ratio(line(grid, 0.0, 0.0), zero_drift(1), half, q);
  CHECK(est.reliable);
  CHECK(std::abs(est.gamma - 1.0) <= 3.0 * est.std_error);

  q.eps = 1e-5;
  CHECK_THROWS_AS(estimate_ratio(line(grid, 0.0, 0.0), zero_drift(1), half, q),
                  std::runtime_error);

  // a far-away tube: denominator healthy, numerator empty -> flagged zero
  RatioQuery far;
  far.eps = 1.0;
  far.M = 500;
  far.seed = 12;
  far.law_particles = 8;
  RatioEstimate none = estimate_ratio(line(grid, 0.0, 30.0), zero_drift(1), half, far);
  CHECK_FALSE(none.reliable);
  CHECK(none.gamma == 0.0);
  CHECK(none.hits_denominator > 0);
}

TEST_CASE("ratio diagnostic tightens as eps shrinks (example 1, classical)") {
  TimeGrid grid(64);
  const HurstModel half = make_hurst_model(0.5);
  const LawPath law = dirac_law(grid, M_PI);
  Path phi = line(grid, M_PI, 0.5);
  const double J = om_action(phi, example1_sine_drift(), law, half).J;

  RatioQuery wide, narrow;
  wide.eps = 1.25;
  narrow.eps = 0.75;
  wide.M = narrow.M = 20000;
  wide.seed = narrow.seed = 5;
  RatioEstimate rw = estimate_ratio(phi, example1_sine_drift(), law, half, wide);
  RatioEstimate rn = estimate_ratio(phi, example1_sine_drift(), law, half, narrow);
  const double dev_w = std::abs(std::log(rw.gamma) - J);
  const double dev_n = std::abs(std::log(rn.gamma) - J);
  const double se_log =
      rw.std_error / rw.gamma + rn.std_error / rn.gamma;
  CHECK(dev_n <= dev_w + 2.0 * se_log);
}
