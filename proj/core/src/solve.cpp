#include "mgl/solve.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <limits>

namespace mgl {

const char* solver_method_name(SolverMethod method) {
  switch (method) {
    case SolverMethod::ProxGradient: return "prox-gradient";
    case SolverMethod::AcceleratedProxGradient: return "accelerated-prox-gradient";
    case SolverMethod::ProxNewtonExact: return "prox-newton-exact";
    case SolverMethod::ProxNewtonBfgs: return "prox-newton-bfgs";
  }
  return "?";
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "prox-gradient" || name == "pg") return SolverMethod::ProxGradient;
  if (name == "accelerated-prox-gradient" || name == "apg")
    return SolverMethod::AcceleratedProxGradient;
  if (name == "prox-newton-exact" || name == "pn") return SolverMethod::ProxNewtonExact;
  if (name == "prox-newton-bfgs" || name == "pn-bfgs") return SolverMethod::ProxNewtonBfgs;
  throw std::invalid_argument("unknown solver method: " + name);
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver: tol must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("solver: backtrack factor must be in (0,1)");
  if (!(armijo > 0.0 && armijo <= 0.5))
    throw std::invalid_argument("solver: armijo constant must be in (0, 0.5]");
  if (!(init_step > 0.0)) throw std::invalid_argument("solver: init_step must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
}

double FitResult::objective() const {
  return objective_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : objective_trace.back();
}

int PathResult::total_iterations() const {
  int total = 0;
  for (const FitResult& fit : fits) total += fit.iterations;
  return total;
}

namespace {

constexpr double kNormFloor = 1e-12;
constexpr double kMinStep = 1e-18;

void finish(FitResult& res, const std::vector<EdgeGroup>& groups) {
  res.group_norms.resize(static_cast<Eigen::Index>(groups.size()));
  res.active_groups.clear();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double norm = group_norm(res.theta, groups[g]);
    res.group_norms[static_cast<Eigen::Index>(g)] = norm;
    if (norm > kActiveSetThreshold) res.active_groups.push_back(static_cast<int>(g));
  }
}

// Spectral norm estimate by power iteration with a fixed starting vector.
double spectral_norm_estimate(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply, int dim) {
  Eigen::VectorXd v(dim);
  // deterministic quasi-random start
  for (int i = 0; i < dim; ++i) v[i] = std::sin(0.7 * (i + 1)) + 0.01;
  v.normalize();
  Eigen::VectorXd w(dim);
  double norm = 0.0;
  for (int it = 0; it < 50; ++it) {
    apply(v, w);
    const double wn = w.norm();
    if (wn <= 0.0) return 0.0;
    if (it > 5 && std::abs(wn - norm) <= 1e-6 * wn) return wn;
    norm = wn;
    v = w / wn;
  }
  return norm;
}

struct ProxGradientState {
  Eigen::VectorXd x;
  double fx = 0.0;
  double obj = 0.0;  // f + penalty
};

// One backtracking proximal gradient step from y: returns the accepted point,
// its smooth value and the accepted step size.
bool backtracked_step(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                      const PenaltySpec& pen, const Eigen::VectorXd& y, double fy,
                      const Eigen::VectorXd& grad, double trial_step, double shrink,
                      Eigen::VectorXd& out, double& f_out, double& step_out) {
  double t = trial_step;
  Eigen::VectorXd diff;
  while (true) {
    out = y - t * grad;
    prox_in_place(out, t, groups, pen);
    diff = out - y;
    const double fc = f.value(out);
    if (fc <= fy + grad.dot(diff) + diff.squaredNorm() / (2.0 * t)) {
      f_out = fc;
      step_out = t;
      return true;
    }
    t *= shrink;
    if (t < kMinStep) return false;  // no representable progress
  }
}

FitResult solve_prox_gradient(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                              const PenaltySpec& pen, const Eigen::VectorXd& init,
                              const SolverConfig& cfg, bool accelerated) {
  cfg.validate();
  FitResult res;
  Eigen::VectorXd x = init;
  double fx = f.value(x);
  if (!std::isfinite(fx)) throw SolverError("prox-gradient: infeasible initial point");
  double obj = fx + penalty_value(x, groups, pen);
  res.objective_trace.push_back(obj);

  Eigen::VectorXd y = x, x_prev = x, grad(f.dim()), cand;
  double momentum = 1.0;
  double step = cfg.init_step;
  bool first = true;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    double fy;
    try {
      fy = f.value_and_gradient(y, grad);
    } catch (const std::domain_error&) {
      // extrapolation left the feasible region; restart momentum at x
      y = x;
      momentum = 1.0;
      fy = f.value_and_gradient(y, grad);
    }
    if (!grad.allFinite()) throw SolverError("prox-gradient: non-finite gradient");

    double fc = 0.0, accepted_step = step;
    const double trial = first ? cfg.init_step : 2.0 * step;
    bool moved = backtracked_step(f, groups, pen, y, fy, grad, trial, cfg.backtrack, cand, fc,
                                  accepted_step);
    double cand_obj = moved ? fc + penalty_value(cand, groups, pen) : obj;

    if (accelerated && (!moved || cand_obj > obj)) {
      // objective increase: restart momentum and take a plain step from x
      y = x;
      momentum = 1.0;
      fy = f.value_and_gradient(y, grad);
      moved = backtracked_step(f, groups, pen, y, fy, grad, accepted_step, cfg.backtrack, cand, fc,
                               accepted_step);
      cand_obj = moved ? fc + penalty_value(cand, groups, pen) : obj;
    }
    first = false;
    if (!moved) {  // descent below floating point resolution
      res.converged = true;
      res.iterations = iter;
      break;
    }
    step = accepted_step;

    const double rel = (cand - x).norm() / std::max(x.norm(), kNormFloor);
    x_prev = x;
    x = cand;
    fx = fc;
    obj = std::min(cand_obj, obj);
    res.objective_trace.push_back(obj);
    res.iterations = iter;

    if (accelerated) {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x + ((momentum - 1.0) / next) * (x - x_prev);
      momentum = next;
    } else {
      y = x;
    }
    if (rel < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.theta = x;
  finish(res, groups);
  return res;
}

// Minimizes the penalized quadratic model
//   q(u) = g0^T (u - xk) + 1/2 (u - xk)^T H (u - xk) + penalty(u)
// by accelerated proximal gradient, warm started at xk, until the composite
// residual drops below eta.
Eigen::VectorXd solve_subproblem(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply_h, double lip,
    const Eigen::VectorXd& g0, const Eigen::VectorXd& xk, const std::vector<EdgeGroup>& groups,
    const PenaltySpec& pen, double eta, int max_iter) {
  const double step = 1.0 / std::max(lip, 1e-12);
  Eigen::VectorXd u = xk, v = xk, u_prev = xk;
  Eigen::VectorXd grad_v(xk.size()), grad_u(xk.size()), hu(xk.size()), cand(xk.size());
  double momentum = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    apply_h(v - xk, grad_v);
    grad_v += g0;
    cand = v - step * grad_v;
    prox_in_place(cand, step, groups, pen);

    // composite residual at the candidate
    apply_h(cand - xk, hu);
    grad_u = g0 + hu;
    Eigen::VectorXd fixed = cand - step * grad_u;
    prox_in_place(fixed, step, groups, pen);
    const double resid = (cand - fixed).norm() / step;

    // gradient-based adaptive restart
    if ((v - cand).dot(cand - u) > 0.0) {
      momentum = 1.0;
      v = cand;
    } else {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      v = cand + ((momentum - 1.0) / next) * (cand - u);
      momentum = next;
    }
    u_prev = u;
    u = cand;
    if (resid <= eta) break;
  }
  return u;
}

FitResult solve_prox_newton(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                            const PenaltySpec& pen, const Eigen::VectorXd& init,
                            const SolverConfig& cfg, bool bfgs) {
  cfg.validate();
  const int dim = f.dim();
  FitResult res;
  Eigen::VectorXd x = init;
  Eigen::VectorXd grad(dim);
  double fx;
  try {
    fx = f.value_and_gradient(x, grad);
  } catch (const std::domain_error&) {
    throw SolverError("prox-newton: infeasible initial point");
  }
  if (!std::isfinite(fx) || !grad.allFinite())
    throw SolverError("prox-newton: non-finite objective or gradient at the initial point");
  double obj = fx + penalty_value(x, groups, pen);
  res.objective_trace.push_back(obj);

  Eigen::MatrixXd hess;           // dense exact or BFGS approximation
  bool hess_dense = false;
  if (bfgs) {
    hess = Eigen::MatrixXd::Identity(dim, dim);
    hess_dense = true;
  }
  bool bfgs_scaled = false;
  Eigen::VectorXd s_pending, y_pending;
  bool have_pending = false;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    // outer optimality: composite residual with unit step
    Eigen::VectorXd fixed = prox(x - grad, 1.0, groups, pen);
    const double resid = (x - fixed).norm();
    if (resid <= 1e-15 * std::max(1.0, x.norm())) {
      res.converged = true;
      res.iterations = iter;
      break;
    }

    if (bfgs) {
      if (have_pending) {
        const double sy = s_pending.dot(y_pending);
        if (sy > 1e-12 * s_pending.norm() * y_pending.norm()) {
          if (!bfgs_scaled) {
            hess = (y_pending.squaredNorm() / sy) * Eigen::MatrixXd::Identity(dim, dim);
            bfgs_scaled = true;
          }
          const Eigen::VectorXd bs = hess * s_pending;
          const double sbs = s_pending.dot(bs);
          if (sbs > 0.0) hess -= (bs * bs.transpose()) / sbs;
          hess += (y_pending * y_pending.transpose()) / sy;
        }
        have_pending = false;
      }
    } else if (dim <= SmoothObjective::kDenseHessianLimit) {
      hess = f.dense_hessian(x);
      hess_dense = true;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < 1e-12) {
        // numerically singular model Hessian for this iteration
        const double scale = std::max(hess.trace() / dim, 1e-8);
        hess = scale * Eigen::MatrixXd::Identity(dim, dim);
      }
    } else {
      hess_dense = false;
    }

    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply_h;
    if (hess_dense) {
      apply_h = [&hess](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = hess * v; };
    } else {
      apply_h = [&f, &x](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        f.hessian_vector(x, v, out);
      };
    }

    Eigen::VectorXd direction;
    if (pen.lambda == 0.0 && hess_dense) {
      // unpenalized subproblem: exact Newton step
      direction = Eigen::LDLT<Eigen::MatrixXd>(hess).solve(-grad);
    } else {
      const double lip = hess_dense ? spectral_norm_estimate(apply_h, dim)
                                    : spectral_norm_estimate(apply_h, dim);
      const double eta = std::min(0.1, std::sqrt(resid)) * resid;
      const Eigen::VectorXd u =
          solve_subproblem(apply_h, lip, grad, x, groups, pen, eta, cfg.inner_max_iter);
      direction = u - x;
    }
    if (!direction.allFinite()) throw SolverError("prox-newton: non-finite search direction");

    const double dir_norm = direction.norm();
    if (dir_norm <= cfg.tol * std::max(x.norm(), kNormFloor)) {
      res.converged = true;
      res.iterations = iter;
      break;
    }

    // Armijo line search on the composite objective
    double t = 1.0;
    Eigen::VectorXd xt;
    double obj_t = obj;
    bool moved = false;
    while (t >= 1e-14) {
      xt = x + t * direction;
      const double ft = f.value(xt);
      const double cand_obj = ft + penalty_value(xt, groups, pen);
      if (cand_obj <= obj - 0.5 * t * cfg.armijo * dir_norm * dir_norm) {
        obj_t = cand_obj;
        moved = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!moved) {  // no acceptable step: treat as converged at resolution
      res.converged = true;
      res.iterations = iter;
      break;
    }

    Eigen::VectorXd grad_new(dim);
    const double fx_new = f.value_and_gradient(xt, grad_new);
    if (!grad_new.allFinite()) throw SolverError("prox-newton: non-finite gradient");
    if (bfgs) {
      s_pending = xt - x;
      y_pending = grad_new - grad;
      have_pending = true;
    }

    const double rel = (xt - x).norm() / std::max(x.norm(), kNormFloor);
    x = xt;
    fx = fx_new;
    grad = grad_new;
    obj = obj_t;
    res.objective_trace.push_back(obj);
    res.iterations = iter;
    if (rel < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.theta = x;
  finish(res, groups);
  return res;
}

}  // namespace

FitResult prox_gradient_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                              const PenaltySpec& penalty, const Eigen::VectorXd& init,
                              const SolverConfig& config) {
  const bool accelerated = config.method != SolverMethod::ProxGradient;
  return solve_prox_gradient(f, groups, penalty, init, config, accelerated);
}

FitResult prox_newton_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                            const PenaltySpec& penalty, const Eigen::VectorXd& init,
                            const SolverConfig& config) {
  bool bfgs = config.method == SolverMethod::ProxNewtonBfgs;
  if (!bfgs && !f.has_hessian()) bfgs = true;  // no exact Hessian available
  return solve_prox_newton(f, groups, penalty, init, config, bfgs);
}

FitResult solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                const PenaltySpec& penalty, const Eigen::VectorXd& init,
                const SolverConfig& config) {
  switch (config.method) {
    case SolverMethod::ProxGradient:
    case SolverMethod::AcceleratedProxGradient:
      return prox_gradient_solve(f, groups, penalty, init, config);
    case SolverMethod::ProxNewtonExact:
    case SolverMethod::ProxNewtonBfgs:
      return prox_newton_solve(f, groups, penalty, init, config);
  }
  throw std::logic_error("unreachable");
}

PathResult path_solve_grid(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                           const Eigen::VectorXd& weights, const std::vector<double>& lambdas,
                           const Eigen::VectorXd& init, const SolverConfig& config,
                           const PathOptions& options) {
  if (lambdas.empty()) throw std::invalid_argument("path: need at least one grid point");
  PathResult path;
  path.lambda_max = lambdas.front();
  path.lambdas = lambdas;

  PenaltySpec spec;
  spec.weights = weights;
  Eigen::VectorXd start = init;
  for (double lambda : lambdas) {
    spec.lambda = lambda;
    const auto t0 = std::chrono::steady_clock::now();
    FitResult fit;
    try {
      fit = solve(f, groups, spec, start, config);
      if (options.warm_start) start = fit.theta;
    } catch (const std::exception& err) {
      fit.failed = true;
      fit.message = err.what();
      fit.theta = start;
    }
    const auto t1 = std::chrono::steady_clock::now();
    path.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    path.fits.push_back(std::move(fit));
  }
  return path;
}

PathResult path_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                      const Eigen::VectorXd& weights, const GridSpec& grid,
                      const Eigen::VectorXd& init, const SolverConfig& config,
                      double lambda_max_value, const PathOptions& options) {
  if (grid.points < 1) throw std::invalid_argument("path: need at least one grid point");
  if (!(grid.ratio > 0.0 && grid.ratio < 1.0))
    throw std::invalid_argument("path: grid ratio must be in (0,1)");
  std::vector<double> lambdas(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    const double frac = grid.points == 1 ? 0.0 : static_cast<double>(i) / (grid.points - 1);
    lambdas[static_cast<std::size_t>(i)] = lambda_max_value * std::pow(grid.ratio, frac);
  }
  PathResult path = path_solve_grid(f, groups, weights, lambdas, init, config, options);
  path.lambda_max = lambda_max_value;
  return path;
}

}  // namespace mgl
