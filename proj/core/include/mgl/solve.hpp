#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

#include "mgl/objective.hpp"
#include "mgl/penalty.hpp"
#include "mgl/theta.hpp"

namespace mgl {

enum class SolverMethod {
  ProxGradient,
  AcceleratedProxGradient,
  ProxNewtonExact,
  ProxNewtonBfgs,
};

const char* solver_method_name(SolverMethod method);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::ProxNewtonExact;
  double tol = 1e-6;        ///< relative-change stopping threshold
  int max_iter = 1000;
  double backtrack = 0.5;   ///< line search shrink factor, in (0,1)
  double armijo = 1e-4;     ///< Armijo constant, in (0, 0.5]
  double init_step = 1.0;
  int inner_max_iter = 500; ///< proximal Newton subproblem iterations

  void validate() const;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Groups with norm above this threshold form the reported active set. The
/// prox produces exact zeros, so the threshold only filters inner-solve
/// residue left by proximal Newton line searches.
inline constexpr double kActiveSetThreshold = 1e-6;

struct FitResult {
  Eigen::VectorXd theta;
  std::vector<double> objective_trace;  ///< f + penalty at accepted iterates, nonincreasing
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
  Eigen::VectorXd group_norms;          ///< one norm per penalized group
  std::vector<int> active_groups;       ///< indices of groups above threshold

  double objective() const;
};

/// Descending lambda grid: `points` values log-spaced from lambda_max down to
/// ratio * lambda_max.
struct GridSpec {
  int points = 50;
  double ratio = 1e-4;
};

struct PathResult {
  double lambda_max = 0.0;
  std::vector<double> lambdas;   ///< strictly decreasing, lambdas[0] = lambda_max
  std::vector<FitResult> fits;
  std::vector<double> seconds;   ///< wall time per grid point

  int total_iterations() const;
};

/// Minimizes f + penalty from `init` with the method in `config`.
/// Throws SolverError on an infeasible initial point or non-finite gradient.
FitResult solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                const PenaltySpec& penalty, const Eigen::VectorXd& init,
                const SolverConfig& config);

/// Proximal gradient with backtracking; the accelerated variant restarts its
/// momentum whenever the composite objective would increase, so the trace is
/// nonincreasing for both.
FitResult prox_gradient_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                              const PenaltySpec& penalty, const Eigen::VectorXd& init,
                              const SolverConfig& config);

/// Proximal Newton: a penalized quadratic model is solved per iteration by an
/// inner accelerated proximal gradient loop to a forcing-sequence tolerance
/// min(0.1, sqrt(r)) * r in the composite residual r, then the step is
/// accepted under the Armijo condition
///   F(x + t p) <= F(x) - (t alpha / 2) ||p||^2.
/// The BFGS variant maintains a dense quasi-Newton Hessian; a numerically
/// singular exact Hessian falls back to a scaled identity for that iteration.
FitResult prox_newton_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                            const PenaltySpec& penalty, const Eigen::VectorXd& init,
                            const SolverConfig& config);

struct PathOptions {
  bool warm_start = true;  ///< cold start (benchmarking) when false
};

/// Fits the whole grid, warm starting each point at the previous solution.
/// Solver failures are recorded per grid point without aborting the path.
PathResult path_solve(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                      const Eigen::VectorXd& weights, const GridSpec& grid,
                      const Eigen::VectorXd& init, const SolverConfig& config,
                      double lambda_max_value, const PathOptions& options = {});

/// Same, over an explicit lambda grid.
PathResult path_solve_grid(const SmoothObjective& f, const std::vector<EdgeGroup>& groups,
                           const Eigen::VectorXd& weights, const std::vector<double>& lambdas,
                           const Eigen::VectorXd& init, const SolverConfig& config,
                           const PathOptions& options = {});

}  // namespace mgl
