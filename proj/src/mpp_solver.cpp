#include "ompath/mpp_solver.hpp"

#include "ompath/frac_calculus.hpp"
#include "ompath/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace ompath {
namespace {

// linear interpolation of nodewise data onto the twice-refined grid
Eigen::MatrixXd lift_to_doubled(const Eigen::MatrixXd& coarse) {
  const Eigen::Index n = coarse.rows() - 1;
  Eigen::MatrixXd fine(2 * n + 1, coarse.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    fine.row(2 * i) = coarse.row(i);
    fine.row(2 * i + 1) = 0.5 * (coarse.row(i) + coarse.row(i + 1));
  }
  fine.row(2 * n) = coarse.row(n);
  return fine;
}

LawPath lift_law(const LawPath& law) {
  LawPath fine{TimeGrid(2 * law.grid.steps()), law.mode, lift_to_doubled(law.means), {}};
  if (law.mode == LawMode::FullEmpirical) {
    const std::size_t nodes = law.atoms.size();
    fine.atoms.resize(2 * nodes - 1);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
      fine.atoms[2 * i] = law.atoms[i];
      fine.atoms[2 * i + 1] = 0.5 * (law.atoms[i] + law.atoms[i + 1]);
    }
    fine.atoms[2 * nodes - 2] = law.atoms[nodes - 1];
  }
  return fine;
}

// The action evaluated on the interior node values.  The quadratic term is
// computed after lifting the candidate onto the doubled grid: the nodewise
// central differences of om_action have a sawtooth null space, and a direct
// minimization happily pays nothing for zigzag — at the midpoints of the
// lifted path the same stencil is the true cell slope, which closes that
// loophole while keeping the operator discretizations untouched.
class InteriorObjective {
 public:
  InteriorObjective(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                    const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, const TimeGrid& grid)
      : drift_(drift),
        model_(model),
        grid_(grid),
        fine_law_(lift_law(law)),
        phi_(grid, x0.size()),
        fine_phi_(fine_law_.grid, x0.size()) {
    phi_.values.row(0) = x0.transpose();
    phi_.values.row(grid.steps()) = x1.transpose();
  }

  Eigen::Index size() const { return (grid_.steps() - 1) * phi_.dim(); }

  const Path& path_for(const Eigen::VectorXd& u) {
    const Eigen::Index d = phi_.dim();
    for (Eigen::Index i = 1; i < grid_.steps(); ++i)
      phi_.values.row(i) = u.segment((i - 1) * d, d).transpose();
    return phi_;
  }

  double operator()(const Eigen::VectorXd& u) {
    fine_phi_.values = lift_to_doubled(path_for(u).values);
    return -om_action(fine_phi_, drift_, fine_law_, model_).J;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& u, double fd_step) {
    Eigen::VectorXd g(u.size());
    Eigen::VectorXd probe = u;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const double h = fd_step * (1.0 + std::abs(u[j]));
      const double saved = probe[j];
      probe[j] = saved + h;
      const double fp = (*this)(probe);
      probe[j] = saved - h;
      const double fm = (*this)(probe);
      probe[j] = saved;
      g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
  }

 private:
  const DriftSpec& drift_;
  const HurstModel& model_;
  TimeGrid grid_;
  LawPath fine_law_;
  Path phi_;
  Path fine_phi_;
};

}  // namespace

double mpp_objective(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                     const Path& phi) {
  Path fine(TimeGrid(2 * phi.grid.steps()), lift_to_doubled(phi.values));
  return -om_action(fine, drift, lift_law(law), model).J;
}

MppResult minimize_action(const DriftSpec& drift, const LawPath& law, const HurstModel& model,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
                          const TimeGrid& grid, const MppOptions& opts) {
  if (law.grid != grid)
    throw std::invalid_argument("minimize_action: law path lives on a different grid");

  InteriorObjective objective(drift, law, model, x0, x1, grid);

  // straight-line initialization, interior nodes packed row by row
  const Path init = linear_path(grid, x0, x1);
  const Eigen::Index d = init.dim();
  Eigen::VectorXd u(objective.size());
  for (Eigen::Index i = 1; i < grid.steps(); ++i)
    u.segment((i - 1) * d, d) = init.values.row(i).transpose();

  std::vector<double> history;
  auto result_at = [&](const Eigen::VectorXd& v, int iters, double gnorm, bool conv) {
    Path path = objective.path_for(v);
    MppResult r{path, om_action(path, drift, law, model).J, iters, gnorm, conv, history};
    return r;
  };

  double f = objective(u);
  history.push_back(f);
  Eigen::VectorXd grad = objective.gradient(u, opts.fd_step);
  Eigen::VectorXd prev_u, prev_grad;
  double step = 1.0;
  int iters = 0;

  while (true) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.grad_tol) return result_at(u, iters, gnorm, true);
    if (iters >= opts.max_iters) return result_at(u, iters, gnorm, false);

    // Barzilai-Borwein warm start for the trial step, safeguarded below
    if (iters > 0) {
      const Eigen::VectorXd s = u - prev_u;
      const Eigen::VectorXd y = grad - prev_grad;
      const double sy = s.dot(y);
      step = (sy > 0.0) ? s.squaredNorm() / sy : step / opts.ls_shrink;
      step = std::clamp(step, 1e-12, 1e6);
    }

    const double gsq = grad.squaredNorm();
    double t = step;
    int shrinks = 0;
    Eigen::VectorXd candidate = u - t * grad;
    double f_candidate = objective(candidate);
    while (!(f_candidate <= f - opts.ls_c1 * t * gsq)) {
      if (++shrinks > opts.ls_max_shrinks) throw LineSearchFailure(result_at(u, iters, gnorm, false));
      t *= opts.ls_shrink;
      candidate = u - t * grad;
      f_candidate = objective(candidate);
    }

    prev_u = std::move(u);
    prev_grad = std::move(grad);
    u = std::move(candidate);
    f = f_candidate;
    history.push_back(f);
    step = t;
    grad = objective.gradient(u, opts.fd_step);
    ++iters;
  }
}

SampledFn el_residual_classical(const Path& phi, const DriftSpec& drift, const LawPath& law,
                                const HurstModel& model) {
  if (!model.classical())
    throw std::domain_error("el_residual_classical: only the classical regime is supported");
  if (law.grid != phi.grid)
    throw std::invalid_argument("el_residual_classical: grid mismatch");

  const Eigen::Index n = phi.grid.steps();
  const Eigen::Index d = phi.dim();

  // L = |phi' - b|^2 + div b with d_H = 1; any other regime is unsupported
  SampledFn velocity = finite_difference(SampledFn(phi.grid, phi.values));

  SampledFn momentum(phi.grid, d);  // dL/dphi' = 2 (phi' - b)
  Eigen::MatrixXd force(phi.grid.nodes(), d);
  for (Eigen::Index i = 0; i < phi.grid.nodes(); ++i) {
    const Eigen::VectorXd x = phi.values.row(i).transpose();
    const LawView view = law.at(i);
    const Eigen::VectorXd b = drift.b(x, view);
    const Eigen::VectorXd residual_dir = velocity.values.row(i).transpose() - b;
    momentum.values.row(i) = 2.0 * residual_dir.transpose();

    // dL/dphi = -2 J^T (phi' - b) + grad div b, the gradient of the
    // divergence taken by central differences
    const Eigen::MatrixXd jac = drift_jacobian(drift, x, view);
    Eigen::VectorXd grad_div(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      grad_div[j] = (drift_divergence(drift, xp, view) - drift_divergence(drift, xm, view)) /
                    (2.0 * h);
    }
    force.row(i) = (-2.0 * jac.transpose() * residual_dir + grad_div).transpose();
  }

  SampledFn momentum_rate = finite_difference(momentum);
  SampledFn residual(phi.grid, d);
  residual.values = force - momentum_rate.values;
  residual.values.row(0).setZero();
  residual.values.row(n).setZero();
  return residual;
}

Path pendulum_reference(const TimeGrid& grid) {
  const double K = std::pow(gamma_fn(0.25), 4) / (4.0 * M_PI);
  const double h = grid.dt();

  auto accel = [K](double z) { return -K * std::sin(z); };

  Path p(grid, 2);
  double z = -0.5 * M_PI;
  double v = 0.0;
  p.values(0, 0) = z;
  p.values(0, 1) = v;
  for (Eigen::Index i = 0; i < grid.steps(); ++i) {
    const double k1z = v, k1v = accel(z);
    const double k2z = v + 0.5 * h * k1v, k2v = accel(z + 0.5 * h * k1z);
    const double k3z = v + 0.5 * h * k2v, k3v = accel(z + 0.5 * h * k2z);
    const double k4z = v + h * k3v, k4v = accel(z + h * k3z);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    p.values(i + 1, 0) = z;
    p.values(i + 1, 1) = v;
  }
  return p;
}

}  // namespace ompath
