// ompath: batch CLI over the Onsager-Machlup library.  Every command is
// deterministic given its full flag set and writes CSV plus flat key=value
// metadata into --out.
#include "ompath/csv_io.hpp"
#include "ompath/drifts.hpp"
#include "ompath/fbm_kernel.hpp"
#include "ompath/mckean_vlasov.hpp"
#include "ompath/mpp_solver.hpp"
#include "ompath/om_functional.hpp"
#include "ompath/rng.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ompath;

namespace {

struct Cli {
  std::string out = "ompath-out";
  double H = 0.5;
  long n = 128;
  long N = 2000;
  long M = 10000;
  long paths = 3;
  long dim = 1;
  long bundle = 5;
  double eps = 1.0;
  std::string norm = "sup";
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string drift = "zero";
  std::string law = "ode";
  std::string sampler = "volterra";
  std::string phi_file;
  std::vector<double> x0{0.0};
  std::vector<double> x1{1.0};
  std::vector<double> eps_list;
  std::vector<double> H_list{0.3, 0.5, 0.7};
  long max_iters = 5000;
  double grad_tol = 1e-6;
  bool probe_cov = false;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

NormSpec parse_norm(const Cli& cli) {
  if (cli.norm == "sup") return NormSpec::sup();
  if (cli.norm == "holder") return NormSpec::holder(cli.beta);
  throw std::domain_error("unknown norm '" + cli.norm + "' (use sup or holder)");
}

std::string vec_str(const Eigen::VectorXd& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << format_full(v[i]);
  }
  return os.str();
}

void echo_config(const fs::path& dir, const std::string& command, const KeyValues& extra) {
  KeyValues kv{{"command", command}};
  kv.insert(kv.end(), extra.begin(), extra.end());
  write_kv((dir / "config.txt").string(), kv);
}

fs::path make_out_dir(const Cli& cli) {
  fs::path dir(cli.out);
  fs::create_directories(dir);
  return dir;
}

std::string path_file(const fs::path& dir, const std::string& stem, long k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03ld.csv", stem.c_str(), k);
  return (dir / buf).string();
}

// law freezing for a named drift: exact mean ODE or an N-particle run
LawPath freeze_law(const Cli& cli, const std::string& drift_name, const DriftSpec& drift,
                   const Eigen::VectorXd& x0, const HurstModel& model, const TimeGrid& grid) {
  if (cli.law == "ode") return exact_mean_law(drift_name, x0, grid);
  if (cli.law == "ensemble") {
    Ensemble e = simulate_ensemble(drift, x0, model, grid, cli.N, cli.seed ^ 0x1a77ULL);
    return law_path(e, drift.law_mode);
  }
  throw std::domain_error("unknown law mode '" + cli.law + "' (use ode or ensemble)");
}

KeyValues base_meta(const Cli& cli, const HurstModel& model) {
  return {{"H", format_full(model.H)},
          {"alpha", format_full(model.alpha)},
          {"regime", regime_name(model.regime)},
          {"n", std::to_string(cli.n)},
          {"seed", std::to_string(cli.seed)}};
}

int cmd_simulate_fbm(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);

  for (long k = 0; k < cli.paths; ++k) {
    Path p = (cli.sampler == "cholesky")
                 ? sample_fbm_cholesky(grid, model, cli.dim, cli.seed, k)
                 : sample_fbm_volterra(grid, model, cli.dim, cli.seed, k);
    write_path_csv(path_file(dir, "path", k), p);
  }

  if (cli.probe_cov) {
    const long M = cli.M;
    const Eigen::Index n = grid.steps();
    const std::vector<std::pair<Eigen::Index, Eigen::Index>> probes = {
        {n / 4, n / 4}, {n / 2, n / 4}, {n / 2, n / 2},     {3 * n / 4, n / 2},
        {n, n / 4},     {n, n / 2},     {n, 3 * n / 4},     {n, n}};
    std::vector<double> acc(probes.size(), 0.0);
    for (long m = 0; m < M; ++m) {
      Path b = sample_fbm_volterra(grid, model, 1, cli.seed, 0x2000000ULL + m);
      for (std::size_t q = 0; q < probes.size(); ++q)
        acc[q] += b.values(probes[q].first, 0) * b.values(probes[q].second, 0);
    }
    std::ofstream tab((dir / "probe_cov.csv").string());
    tab << "t,s,empirical,analytic,mc_se\n";
    for (std::size_t q = 0; q < probes.size(); ++q) {
      const double t = grid.t(probes[q].first), s = grid.t(probes[q].second);
      const double emp = acc[q] / M;
      const double ana = fbm_covariance(t, s, model);
      const double var = fbm_covariance(t, t, model) * fbm_covariance(s, s, model) + ana * ana;
      tab << format_full(t) << "," << format_full(s) << "," << format_full(emp) << ","
          << format_full(ana) << "," << format_full(std::sqrt(var / M)) << "\n";
    }
  }

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"paths", std::to_string(cli.paths)});
  meta.push_back({"dim", std::to_string(cli.dim)});
  meta.push_back({"sampler", cli.sampler});
  echo_config(dir, "simulate-fbm", meta);
  return 0;
}

int cmd_simulate_mkv(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);
  const Eigen::VectorXd x0 = to_vector(cli.x0);
  const DriftSpec drift = drift_by_name(cli.drift, x0.size());

  Ensemble e = simulate_ensemble(drift, x0, model, grid, cli.N, cli.seed);
  for (Eigen::Index k = 0; k < e.size(); ++k)
    write_path_csv(path_file(dir, "particle", k), e.paths[k]);
  LawPath lp = law_path(e, LawMode::MeanOnly);
  write_path_csv((dir / "mean.csv").string(), Path(grid, lp.means));

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"drift", cli.drift});
  meta.push_back({"N", std::to_string(cli.N)});
  meta.push_back({"x0", vec_str(x0)});
  echo_config(dir, "simulate-mkv", meta);
  return 0;
}

Path load_or_make_phi(const Cli& cli, const TimeGrid& grid, Eigen::Index dim) {
  if (!cli.phi_file.empty()) {
    Path p = read_path_csv(cli.phi_file);
    if (p.grid != grid)
      throw std::domain_error("phi file grid (" + std::to_string(p.grid.steps()) +
                              " steps) does not match --n " + std::to_string(grid.steps()));
    if (p.dim() != dim) throw std::domain_error("phi file dimension differs from drift");
    return p;
  }
  return linear_path(grid, to_vector(cli.x0), to_vector(cli.x1));
}

int cmd_om_eval(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);
  const Eigen::VectorXd x0 = to_vector(cli.x0);
  const DriftSpec drift = drift_by_name(cli.drift, x0.size());
  const Path phi = load_or_make_phi(cli, grid, drift.dim);
  const LawPath law = freeze_law(cli, cli.drift, drift, phi.initial().transpose(), model, grid);

  const OMReport rep = om_action(phi, drift, law, model);
  KeyValues kv{{"J", format_full(rep.J)},
               {"action_term", format_full(rep.action_term)},
               {"divergence_term", format_full(rep.divergence_term)},
               {"regime", regime_name(rep.regime)},
               {"n", std::to_string(cli.n)},
               {"H", format_full(model.H)}};
  write_kv((dir / "omreport.txt").string(), kv);

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"drift", cli.drift});
  meta.push_back({"law", cli.law});
  echo_config(dir, "om-eval", meta);
  return 0;
}

int cmd_mpp(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);
  const Eigen::VectorXd x0 = to_vector(cli.x0);
  const Eigen::VectorXd x1 = to_vector(cli.x1);
  const DriftSpec drift = drift_by_name(cli.drift, x0.size());
  const LawPath law = freeze_law(cli, cli.drift, drift, x0, model, grid);

  MppOptions opts;
  opts.max_iters = static_cast<int>(cli.max_iters);
  opts.grad_tol = cli.grad_tol;
  const MppResult result = minimize_action(drift, law, model, x0, x1, grid, opts);

  write_path_csv((dir / "mpp.csv").string(), result.path);
  KeyValues kv{{"J", format_full(result.J)},
               {"iters", std::to_string(result.iters)},
               {"grad_norm", format_full(result.grad_norm)},
               {"converged", result.converged ? "1" : "0"},
               {"H", format_full(model.H)},
               {"n", std::to_string(cli.n)},
               {"law", cli.law},
               {"law_seed", std::to_string(cli.seed)}};
  write_kv((dir / "mpp_meta.txt").string(), kv);

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"drift", cli.drift});
  meta.push_back({"x0", vec_str(x0)});
  meta.push_back({"x1", vec_str(x1)});
  echo_config(dir, "mpp", meta);
  return 0;
}

int cmd_ratio(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);
  const Eigen::VectorXd x0 = to_vector(cli.x0);
  const DriftSpec drift = drift_by_name(cli.drift, x0.size());
  const Path phi = load_or_make_phi(cli, grid, drift.dim);
  const NormSpec norm = parse_norm(cli);
  validate_norm_for_model(norm, model);

  RatioQuery query;
  query.eps = cli.eps;
  query.norm = norm;
  query.M = cli.M;
  query.seed = cli.seed;
  query.law_particles = cli.N;

  const LawPath law = freeze_law(cli, cli.drift, drift, phi.initial().transpose(), model, grid);
  const RatioEstimate est = estimate_ratio(phi, drift, law, model, query);
  const OMReport rep = om_action(phi, drift, law, model);

  KeyValues kv{{"gamma", format_full(est.gamma)},
               {"std_error", format_full(est.std_error)},
               {"log_gamma", format_full(est.gamma > 0 ? std::log(est.gamma) : 0.0)},
               {"J", format_full(rep.J)},
               {"hits_numerator", std::to_string(est.hits_numerator)},
               {"hits_denominator", std::to_string(est.hits_denominator)},
               {"M", std::to_string(cli.M)},
               {"eps", format_full(cli.eps)},
               {"norm", cli.norm},
               {"beta", format_full(cli.beta)},
               {"reliable", est.reliable ? "1" : "0"},
               {"note", model.regime == Regime::Regular && cli.norm == "sup"
                            ? "sup norm is a diagnostic default; the regular-regime theorem "
                              "is stated for Hoelder norms"
                            : "norm within the theorem window"}};
  write_kv((dir / "ratio.txt").string(), kv);

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"drift", cli.drift});
  meta.push_back({"law", cli.law});
  meta.push_back({"M", std::to_string(cli.M)});
  echo_config(dir, "ratio", meta);
  return 0;
}

int cmd_small_ball(const Cli& cli) {
  const HurstModel model = make_hurst_model(cli.H);
  const TimeGrid grid(cli.n);
  const fs::path dir = make_out_dir(cli);
  const NormSpec norm = parse_norm(cli);
  if (norm.kind == NormSpec::Kind::Holder) validate_norm_for_model(norm, model);

  std::vector<double> eps_values = cli.eps_list;
  if (eps_values.empty()) eps_values.push_back(cli.eps);

  std::ofstream tab((dir / "smallball.csv").string());
  tab << "eps,probability,std_error,hits,scaled_log\n";
  for (double eps : eps_values) {
    const SmallBallEstimate est = estimate_small_ball(grid, model, norm, eps, cli.M, cli.seed);
    const double scaled =
        est.any_hits ? std::pow(eps, 1.0 / model.H) * std::log(est.probability) : 0.0;
    tab << format_full(eps) << "," << format_full(est.probability) << ","
        << format_full(est.std_error) << "," << est.hits << "," << format_full(scaled) << "\n";
  }

  KeyValues meta = base_meta(cli, model);
  meta.push_back({"M", std::to_string(cli.M)});
  meta.push_back({"norm", cli.norm});
  echo_config(dir, "small-ball", meta);
  return 0;
}

// shared by example1/example2: solve the MPP, write outputs, sample a bundle
// of solution paths near the tube
void run_example(const Cli& cli, const std::string& drift_name, const Eigen::VectorXd& x0,
                 const Eigen::VectorXd& x1, const fs::path& dir) {
  const TimeGrid grid(cli.n);
  const DriftSpec drift = drift_by_name(drift_name, x0.size());

  for (double H : cli.H_list) {
    const HurstModel model = make_hurst_model(H);
    const LawPath law = freeze_law(cli, drift_name, drift, x0, model, grid);

    MppOptions opts;
    opts.max_iters = static_cast<int>(cli.max_iters);
    opts.grad_tol = cli.grad_tol;
    const MppResult result = minimize_action(drift, law, model, x0, x1, grid, opts);

    char tag[16];
    std::snprintf(tag, sizeof tag, "H%.2f", H);
    write_path_csv((dir / ("mpp_" + std::string(tag) + ".csv")).string(), result.path);

    const OMReport rep = om_action(result.path, drift, law, model);
    write_kv((dir / ("omreport_" + std::string(tag) + ".txt")).string(),
             {{"J", format_full(rep.J)},
              {"action_term", format_full(rep.action_term)},
              {"divergence_term", format_full(rep.divergence_term)},
              {"regime", regime_name(rep.regime)},
              {"n", std::to_string(cli.n)},
              {"H", format_full(model.H)},
              {"iters", std::to_string(result.iters)},
              {"grad_norm", format_full(result.grad_norm)},
              {"converged", result.converged ? "1" : "0"}});

    // bundle: the closest of 20x candidates to the transition tube
    if (cli.bundle > 0) {
      const long candidates = cli.bundle * 20;
      std::vector<std::pair<double, long>> ranked;
      std::vector<Path> sims;
      sims.reserve(candidates);
      for (long k = 0; k < candidates; ++k) {
        Path x = sample_solution_path(drift, law, model, x0, cli.seed, 0x3000000ULL + k);
        Path diff(grid, x.values - result.path.values);
        ranked.push_back({norm_sup(diff), k});
        sims.push_back(std::move(x));
      }
      std::sort(ranked.begin(), ranked.end());
      for (long b = 0; b < cli.bundle && b < candidates; ++b)
        write_path_csv(path_file(dir, "sample_" + std::string(tag), b),
                       sims[static_cast<std::size_t>(ranked[b].second)]);
    }
  }
}

int cmd_example1(const Cli& cli) {
  const fs::path dir = make_out_dir(cli);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, M_PI);
  Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, 2.0);
  run_example(cli, "example1-sine", x0, x1, dir);

  KeyValues meta{{"n", std::to_string(cli.n)},
                 {"seed", std::to_string(cli.seed)},
                 {"law", cli.law},
                 {"N", std::to_string(cli.N)},
                 {"bundle", std::to_string(cli.bundle)}};
  echo_config(dir, "example1", meta);
  return 0;
}

int cmd_example2(const Cli& cli) {
  const fs::path dir = make_out_dir(cli);
  Eigen::VectorXd x0(2), x1(2);
  x0 << -0.5 * M_PI, 0.0;
  x1 << 0.5 * M_PI, 0.0;
  run_example(cli, "example2-pendulum", x0, x1, dir);

  const TimeGrid grid(cli.n);
  Path ref = pendulum_reference(grid);
  write_path_csv((dir / "pendulum_reference.csv").string(), ref);

  KeyValues gaps;
  for (double H : cli.H_list) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "H%.2f", H);
    Path mpp = read_path_csv((dir / ("mpp_" + std::string(tag) + ".csv")).string());
    const double gap = (mpp.values.col(0) - ref.values.col(0)).cwiseAbs().maxCoeff();
    gaps.push_back({std::string("sup_gap_") + tag, format_full(gap)});
  }
  write_kv((dir / "gap.txt").string(), gaps);

  KeyValues meta{{"n", std::to_string(cli.n)},
                 {"seed", std::to_string(cli.seed)},
                 {"law", cli.law},
                 {"N", std::to_string(cli.N)},
                 {"bundle", std::to_string(cli.bundle)}};
  echo_config(dir, "example2", meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Onsager-Machlup machinery for fBm-driven mean-field SDEs"};
  app.require_subcommand(1);

  Cli cli;
  std::string config_file;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cli.out, "output directory");
    sub->add_option("--seed", cli.seed, "RNG seed");
    sub->add_option("--n", cli.n, "grid steps on [0,1]")->check(CLI::PositiveNumber);
    sub->add_option("--config", config_file,
                    "flat key=value file; explicit flags take precedence");
    return sub;
  };

  auto* fbm = add_common(app.add_subcommand("simulate-fbm", "sample fBm paths"));
  fbm->add_option("--H", cli.H, "Hurst parameter in (1/4,1)");
  fbm->add_option("--paths", cli.paths, "number of paths");
  fbm->add_option("--dim", cli.dim, "path dimension");
  fbm->add_option("--sampler", cli.sampler, "volterra or cholesky");
  fbm->add_option("--M", cli.M, "Monte Carlo size of the covariance probe");
  fbm->add_flag("--probe-cov", cli.probe_cov, "write an empirical covariance probe table");

  auto* mkv = add_common(app.add_subcommand("simulate-mkv", "simulate the particle system"));
  mkv->add_option("--H", cli.H);
  mkv->add_option("--drift", cli.drift, "zero | linear-decay | example1-sine | example2-pendulum");
  mkv->add_option("--N", cli.N, "particles")->check(CLI::PositiveNumber);
  mkv->add_option("--x0", cli.x0, "initial state components");

  auto* ome = add_common(app.add_subcommand("om-eval", "evaluate the action of a path"));
  ome->add_option("--H", cli.H);
  ome->add_option("--drift", cli.drift);
  ome->add_option("--phi", cli.phi_file, "path CSV; default is the line x0 -> x1");
  ome->add_option("--x0", cli.x0);
  ome->add_option("--x1", cli.x1);
  ome->add_option("--law", cli.law, "ode | ensemble");
  ome->add_option("--N", cli.N, "ensemble size for --law ensemble");

  auto* mpp = add_common(app.add_subcommand("mpp", "most probable transition path"));
  mpp->add_option("--H", cli.H);
  mpp->add_option("--drift", cli.drift);
  mpp->add_option("--x0", cli.x0);
  mpp->add_option("--x1", cli.x1);
  mpp->add_option("--law", cli.law);
  mpp->add_option("--N", cli.N);
  mpp->add_option("--max-iters", cli.max_iters);
  mpp->add_option("--grad-tol", cli.grad_tol);

  auto* ratio = add_common(app.add_subcommand("ratio", "tube-probability ratio estimate"));
  ratio->add_option("--H", cli.H);
  ratio->add_option("--drift", cli.drift);
  ratio->add_option("--phi", cli.phi_file);
  ratio->add_option("--x0", cli.x0);
  ratio->add_option("--x1", cli.x1);
  ratio->add_option("--eps", cli.eps)->check(CLI::PositiveNumber);
  ratio->add_option("--M", cli.M)->check(CLI::PositiveNumber);
  ratio->add_option("--norm", cli.norm);
  ratio->add_option("--beta", cli.beta);
  ratio->add_option("--law", cli.law);
  ratio->add_option("--N", cli.N);

  auto* ball = add_common(app.add_subcommand("small-ball", "Monte Carlo small-ball estimates"));
  ball->add_option("--H", cli.H);
  ball->add_option("--eps", cli.eps_list, "one or more radii");
  ball->add_option("--M", cli.M)->check(CLI::PositiveNumber);
  ball->add_option("--norm", cli.norm);
  ball->add_option("--beta", cli.beta);

  auto* ex1 = add_common(app.add_subcommand("example1", "sine mean-field transition pi -> 2"));
  ex1->add_option("--Hs", cli.H_list, "Hurst values");
  ex1->add_option("--law", cli.law);
  ex1->add_option("--N", cli.N);
  ex1->add_option("--bundle", cli.bundle, "sample paths written per H");
  ex1->add_option("--max-iters", cli.max_iters);
  ex1->add_option("--grad-tol", cli.grad_tol);

  auto* ex2 = add_common(app.add_subcommand("example2", "stochastic pendulum transition"));
  ex2->add_option("--Hs", cli.H_list);
  ex2->add_option("--law", cli.law);
  ex2->add_option("--N", cli.N);
  ex2->add_option("--bundle", cli.bundle);
  ex2->add_option("--max-iters", cli.max_iters);
  ex2->add_option("--grad-tol", cli.grad_tol);

  // venting vector options through a comma delimiter keeps config values flat
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options()) {
      opt->delimiter(',');
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  // two-phase parse: config-file pairs become flags placed before the
  // explicit ones, so the command line wins under the take-last policy
  std::vector<std::string> tokens(argv + 1, argv + argc);
  std::string cfg;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].rfind("--config=", 0) == 0) cfg = tokens[i].substr(9);
    else if (tokens[i] == "--config" && i + 1 < tokens.size()) cfg = tokens[i + 1];
  }
  if (!cfg.empty() && !tokens.empty()) {
    std::ifstream in(cfg);
    if (!in) {
      std::cerr << "invalid parameters: cannot open config file " << cfg << "\n";
      return 2;
    }
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto sep = line.find('=');
      if (sep == std::string::npos) {
        std::cerr << "invalid parameters: config line without '=': " << line << "\n";
        return 2;
      }
      injected.push_back("--" + line.substr(0, sep) + "=" + line.substr(sep + 1));
    }
    tokens.insert(tokens.begin() + 1, injected.begin(), injected.end());
  }

  try {
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (fbm->parsed()) return cmd_simulate_fbm(cli);
    if (mkv->parsed()) return cmd_simulate_mkv(cli);
    if (ome->parsed()) return cmd_om_eval(cli);
    if (mpp->parsed()) return cmd_mpp(cli);
    if (ratio->parsed()) return cmd_ratio(cli);
    if (ball->parsed()) return cmd_small_ball(cli);
    if (ex1->parsed()) return cmd_example1(cli);
    if (ex2->parsed()) return cmd_example2(cli);
  } catch (const std::domain_error& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
