#include "ompath/fbm_kernel.hpp"

#include "ompath/special_functions.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ompath;

TEST_CASE("covariance function") {
  const HurstModel m = make_hurst_model(0.65);
  CHECK(fbm_covariance(0.4, 0.4, m) == doctest::Approx(std::pow(0.4, 1.3)).epsilon(1e-14));
  CHECK(fbm_covariance(0.7, 0.0, m) == doctest::Approx(0.0).epsilon(1e-14));
  const HurstModel half = make_hurst_model(0.5);
  CHECK(fbm_covariance(0.3, 0.8, half) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(fbm_covariance(0.9, 0.2, half) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("kernel values") {
  const HurstModel half = make_hurst_model(0.5);
  for (double s : {0.1, 0.5, 0.9})
    CHECK(kernel_KH(1.0, s, half) == doctest::Approx(1.0).epsilon(1e-14));

  // frozen high-accuracy quadrature values of the defining integrals
  const HurstModel high = make_hurst_model(0.7);
  CHECK(kernel_KH(1.0, 0.5, high) == doctest::Approx(0.97714049739361676).epsilon(1e-8));
  CHECK(kernel_KH(0.75, 0.25, high) == doctest::Approx(0.99772679730313518).epsilon(1e-8));

  const HurstModel low = make_hurst_model(0.3);
  CHECK(kernel_KH(1.0, 0.5, low) == doctest::Approx(0.87301411433866806).epsilon(1e-8));
  CHECK(kernel_KH(0.75, 0.25, low) == doctest::Approx(0.89822478459416793).epsilon(1e-8));

  CHECK_THROWS_AS(kernel_KH(0.5, 0.5, high), std::domain_error);
  CHECK_THROWS_AS(kernel_KH(0.5, 0.7, high), std::domain_error);
  CHECK_THROWS_AS(kernel_KH(0.5, 0.0, high), std::domain_error);
}

TEST_CASE("apply_KH classical is plain integration") {
  const HurstModel half = make_hurst_model(0.5);
  TimeGrid grid(128);
  SampledFn ones(grid, 1);
  ones.values.setOnes();
  Path out = apply_KH(ones, half);
  for (Eigen::Index i = 0; i <= grid.steps(); ++i)
    CHECK(out.values(i, 0) == doctest::Approx(grid.t(i)).epsilon(1e-12));
}

TEST_CASE("apply_KH agrees with direct kernel quadrature") {
  TimeGrid grid(256);
  for (double H : {0.3, 0.7}) {
    const HurstModel m = make_hurst_model(H);
    auto kernel = [&](double t, double s) { return kernel_KH(t, s, m); };
    const std::vector<std::function<double(double)>> hs = {
        [](double) { return 1.0; },
        [](double s) { return s; },
        [](double s) { return std::sin(M_PI * s); },
    };
    for (const auto& h : hs) {
      SampledFn hf(grid, 1);
      for (Eigen::Index i = 0; i <= grid.steps(); ++i) hf.values(i, 0) = h(grid.t(i));
      Path composed = apply_KH(hf, m);
      double worst = 0.0;
      // probe a spread of nodes; the oracle quadrature is expensive
      for (Eigen::Index i : {4, 16, 64, 128, 192, 256}) {
        const double direct = oracles::volterra_apply(kernel, h, grid.t(i), m.alpha);
        worst = std::max(worst, std::abs(composed.values(i, 0) - direct));
      }
      CHECK(worst < 1e-3);
      if (H == 0.7 && std::abs(h(0.3) - 1.0) < 1e-15) CHECK(worst < 1e-4);
    }
  }
}

TEST_CASE("apply_KH is linear") {
  TimeGrid grid(64);
  const HurstModel m = make_hurst_model(0.35);
  SampledFn h(grid, 1);
  for (Eigen::Index i = 0; i <= grid.steps(); ++i) h.values(i, 0) = std::cos(2.0 * grid.t(i));
  SampledFn twice(grid, 2.0 * h.values);
  Path a = apply_KH(twice, m);
  Path b = apply_KH(h, m);
  CHECK((a.values - 2.0 * b.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("inverse operator on classical lines") {
  const HurstModel half = make_hurst_model(0.5);
  TimeGrid grid(64);
  Path p(grid, 1);
  for (Eigen::Index i = 0; i <= grid.steps(); ++i) p.values(i, 0) = 2.0 + 0.7 * grid.t(i);
  SampledFn out = apply_KH_inverse(p, half);
  CHECK((out.values.array() - 0.7).abs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse operator closed form, H = 0.7, linear path") {
  // (K^H)^{-1}(x + t) = s^a D^a_{0+} s^{-a} 1 = Gamma(1-a)/Gamma(1-2a) s^{-a}
  const HurstModel m = make_hurst_model(0.7);
  const double a = m.alpha;
  TimeGrid grid(256);
  Path p(grid, 1);
  for (Eigen::Index i = 0; i <= grid.steps(); ++i) p.values(i, 0) = 1.5 + grid.t(i);
  SampledFn out = apply_KH_inverse(p, m);
  const double coeff = gamma_fn(1.0 - a) / gamma_fn(1.0 - 2.0 * a) / m.d_H;
  // the Weyl chain's origin extrapolation pollutes a neighbourhood of t = 0
  // that shrinks under refinement; check away from it and check the decay
  double worst = 0.0;
  for (Eigen::Index i = grid.steps() / 5; i <= grid.steps(); ++i)
    worst = std::max(worst,
                     std::abs(out.values(i, 0) - coeff * std::pow(grid.t(i), -a)));
  CHECK(worst < 2e-3);

  TimeGrid fine(1024);
  Path pf(fine, 1);
  for (Eigen::Index i = 0; i <= fine.steps(); ++i) pf.values(i, 0) = 1.5 + fine.t(i);
  SampledFn outf = apply_KH_inverse(pf, m);
  double worst_fine = 0.0;
  for (Eigen::Index i = fine.steps() / 5; i <= fine.steps(); ++i)
    worst_fine = std::max(worst_fine,
                          std::abs(outf.values(i, 0) - coeff * std::pow(fine.t(i), -a)));
  CHECK(worst_fine < worst);
}

TEST_CASE("round trip inverse(apply) refines to the identity") {
  for (double H : {0.3, 0.7}) {
    const HurstModel m = make_hurst_model(H);
    double prev = 1e9;
    for (Eigen::Index n : {64, 128, 256}) {
      TimeGrid grid(n);
      SampledFn h(grid, 1);
      for (Eigen::Index i = 0; i <= n; ++i) {
        const double t = grid.t(i);
        h.values(i, 0) = t * (1.0 - t);
      }
      SampledFn back = apply_KH_inverse(apply_KH(h, m), m);
      const double err = (back.values - h.values).cwiseAbs().maxCoeff();
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 5e-3);
  }
}

TEST_CASE("volterra sampler basics") {
  TimeGrid grid(64);
  const HurstModel m = make_hurst_model(0.7);
  Path a = sample_fbm_volterra(grid, m, 1, 42, 0);
  Path b = sample_fbm_volterra(grid, m, 1, 42, 0);
  Path c = sample_fbm_volterra(grid, m, 1, 42, 1);
  CHECK(a.values == b.values);  // bit-identical under the same stream
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 1e-8);
  CHECK(a.values.row(0).cwiseAbs().maxCoeff() == 0.0);

  Path w = sample_fbm_volterra(grid, make_hurst_model(0.5), 2, 7, 3);
  CHECK(w.values.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.dim() == 2);

  // classical increments are i.i.d. N(0, 1/n): pooled moment check
  TimeGrid cg(64);
  double sum = 0.0, sumsq = 0.0;
  const long paths = 400;
  for (long k = 0; k < paths; ++k) {
    Path b = sample_fbm_volterra(cg, make_hurst_model(0.5), 1, 99, k);
    for (Eigen::Index i = 1; i <= cg.steps(); ++i) {
      const double inc = b.values(i, 0) - b.values(i - 1, 0);
      sum += inc;
      sumsq += inc * inc;
    }
  }
  const double count = static_cast<double>(paths * cg.steps());
  const double mean = sum / count;
  const double var = sumsq / count;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(cg.dt() / count));
  CHECK(std::abs(var - cg.dt()) < 3.0 * cg.dt() * std::sqrt(2.0 / count));
}

TEST_CASE("volterra sampler variance at t = 1") {
  // E[(B^H_1)^2] = 1; Monte Carlo with 20000 streams, 3 sigma band
  TimeGrid grid(64);
  const HurstModel m = make_hurst_model(0.7);
  const long M = 20000;
  double acc = 0.0;
  for (long k = 0; k < M; ++k) {
    Path b = sample_fbm_volterra(grid, m, 1, 2024, static_cast<std::uint64_t>(k));
    acc += b.values(grid.steps(), 0) * b.values(grid.steps(), 0);
  }
  const double var = acc / M;
  const double se = std::sqrt(2.0 / M);  // Var(Z^2) = 2 for Z ~ N(0,1)
  CHECK(std::abs(var - 1.0) < 3.0 * se + 0.01);
}

TEST_CASE("volterra empirical covariance matches the analytic one") {
  TimeGrid grid(64);
  const long M = 4000;
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> probes = {
      {16, 16}, {32, 16}, {32, 32}, {48, 32}, {64, 16}, {64, 32}, {64, 48}, {64, 64}};
  for (double H : {0.3, 0.7}) {
    const HurstModel m = make_hurst_model(H);
    std::vector<Eigen::VectorXd> paths;
    paths.reserve(M);
    for (long k = 0; k < M; ++k)
      paths.push_back(
          sample_fbm_volterra(grid, m, 1, 99, static_cast<std::uint64_t>(k)).values.col(0));
    for (auto [i, j] : probes) {
      double acc = 0.0;
      for (const auto& p : paths) acc += p[i] * p[j];
      const double emp = acc / M;
      const double target = fbm_covariance(grid.t(i), grid.t(j), m);
      const double var_prod = fbm_covariance(grid.t(i), grid.t(i), m) *
                                  fbm_covariance(grid.t(j), grid.t(j), m) +
                              target * target;
      const double se = std::sqrt(var_prod / M);
      CHECK(std::abs(emp - target) < 3.0 * se + 0.01);
    }
  }
}

TEST_CASE("cholesky sampler marginal and jitter guard") {
  TimeGrid grid(64);
  const HurstModel m = make_hurst_model(0.7);
  const long M = 4000;
  double acc = 0.0;
  for (long k = 0; k < M; ++k) {
    Path b = sample_fbm_cholesky(grid, m, 1, 5, static_cast<std::uint64_t>(k));
    acc += b.values(grid.steps(), 0) * b.values(32, 0);
  }
  // E[B_1 B_0.5] = (1 + 0.5^1.4 - 0.5^1.4)/2 = 0.5
  const double emp = acc / M;
  const double var_prod = fbm_covariance(1.0, 1.0, m) * fbm_covariance(0.5, 0.5, m) + 0.25;
  CHECK(std::abs(emp - 0.5) < 3.0 * std::sqrt(var_prod / M));

  CHECK_THROWS_AS(sample_fbm_cholesky(TimeGrid(4096), m, 1, 0), std::invalid_argument);
}

TEST_CASE("two samplers agree in law (KS at level 0.01)") {
  TimeGrid grid(64);
  const HurstModel m = make_hurst_model(0.7);
  const std::size_t M = 3000;
  std::vector<double> a(M), b(M);
  for (std::size_t k = 0; k < M; ++k) {
    a[k] = sample_fbm_volterra(grid, m, 1, 11, k).values(grid.steps(), 0);
    b[k] = sample_fbm_cholesky(grid, m, 1, 12, k).values(grid.steps(), 0);
  }
  CHECK(oracles::ks_statistic(a, b) < oracles::ks_critical_001(M, M));
}

TEST_CASE("path norms") {
  TimeGrid grid(2);
  Path spike(grid, 1);
  spike.values << 0.0, 1.0, 0.0;
  CHECK(norm_sup(spike) == doctest::Approx(1.0));
  // brute force over the three pairs: max(1/0.5^0.5, 1/0.5^0.5, 0)
  CHECK(norm_holder(spike, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  TimeGrid fine(64);
  Path line(fine, 1);
  for (Eigen::Index i = 0; i <= fine.steps(); ++i) line.values(i, 0) = -2.5 * fine.t(i);
  CHECK(norm_holder(line, 0.4) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(norm_sup(line) == doctest::Approx(2.5).epsilon(1e-13));

  Path flat(fine, 2);
  flat.values.setConstant(0.8);
  CHECK(norm_sup(Path(fine, flat.values.array() - 0.8)) == 0.0);
  CHECK(norm_holder(Path(fine, flat.values.array() - 0.8), 0.3) == 0.0);
  CHECK_THROWS_AS(norm_holder(flat, 1.5), std::domain_error);
}

TEST_CASE("norm window validation per regime") {
  CHECK_NOTHROW(validate_norm_for_model(NormSpec::sup(), make_hurst_model(0.3)));
  CHECK_NOTHROW(validate_norm_for_model(NormSpec::sup(), make_hurst_model(0.7)));
  CHECK_NOTHROW(validate_norm_for_model(NormSpec::holder(0.04), make_hurst_model(0.3)));
  CHECK_THROWS_AS(validate_norm_for_model(NormSpec::holder(0.06), make_hurst_model(0.3)),
                  std::domain_error);
  CHECK_NOTHROW(validate_norm_for_model(NormSpec::holder(0.3), make_hurst_model(0.7)));
  CHECK_THROWS_AS(validate_norm_for_model(NormSpec::holder(0.15), make_hurst_model(0.7)),
                  std::domain_error);
  CHECK_THROWS_AS(validate_norm_for_model(NormSpec::holder(0.5), make_hurst_model(0.7)),
                  std::domain_error);
}

TEST_CASE("small-ball estimator sanity") {
  TimeGrid grid(128);
  const HurstModel half = make_hurst_model(0.5);

  SmallBallEstimate sure = estimate_small_ball(grid, half, NormSpec::sup(), 10.0, 400, 3);
  CHECK(sure.probability == doctest::Approx(1.0));

  SmallBallEstimate tight = estimate_small_ball(grid, half, NormSpec::sup(), 0.8, 2000, 3);
  SmallBallEstimate loose = estimate_small_ball(grid, half, NormSpec::sup(), 1.2, 2000, 3);
  CHECK(tight.probability <= loose.probability);  // nested events, common streams
  CHECK(tight.any_hits);

  SmallBallEstimate none = estimate_small_ball(grid, half, NormSpec::sup(), 1e-4, 50, 3);
  CHECK(none.probability == 0.0);
  CHECK_FALSE(none.any_hits);
}

TEST_CASE("small-ball matches the reflection series for Brownian sup") {
  // discrete-grid bias shrinks like 1/sqrt(n); n = 2048 keeps it inside the band
  TimeGrid grid(2048);
  const HurstModel half = make_hurst_model(0.5);
  const long M = 2000;
  SmallBallEstimate est = estimate_small_ball(grid, half, NormSpec::sup(), 1.0, M, 17);
  const double target = oracles::brownian_sup_ball(1.0);
  CHECK(std::abs(est.probability - target) < 3.0 * est.std_error);
}
