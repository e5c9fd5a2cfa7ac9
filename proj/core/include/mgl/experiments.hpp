#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "mgl/schema.hpp"
#include "mgl/solve.hpp"

namespace mgl {

enum class Estimator { PL, MLE, Nodewise, CRF };

const char* estimator_name(Estimator estimator);
Estimator parse_estimator(const std::string& name);

/// Single-fit default: lambda = 5 sqrt(log(p+q) / n).
double default_lambda(int var_count, int n);

/// One seed per trial, derived deterministically from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct PhaseTransitionConfig {
  int size = 4;                       ///< ladder size (p = q = size)
  std::vector<int> sample_sizes = {50, 100, 200, 500, 1000};
  int trials = 20;
  std::uint64_t seed = 1;
  bool calibrated = true;
  std::vector<Estimator> estimators = {Estimator::PL};
  SolverConfig solver;
};

struct PhaseTransitionRow {
  Estimator estimator;
  int n = 0;
  int trials = 0;
  double recovery = 0.0;  ///< fraction of trials with exactly recovered edge set
};

/// Samples from the ladder truth, fits at lambda = 5 sqrt(log(p+q)/n) and
/// reports the exact-recovery fraction per (sample size, estimator).
std::vector<PhaseTransitionRow> phase_transition(const PhaseTransitionConfig& config);

struct CompareConfig {
  std::vector<Estimator> estimators = {Estimator::PL, Estimator::Nodewise};
  GridSpec grid;
  std::vector<double> lambdas;  ///< explicit grid override (else from lambda_max)
  bool calibrated = true;
  SolverConfig solver;
  std::vector<int> crf_feature_vars;  ///< variable indices used as features by the CRF
};

/// Long-format evaluation record. metric is "node:<name>" for a per-variable
/// held-out conditional loss, "pl_total" for their sum over modeled nodes, or
/// "nll_total" for the exact held-out negative log likelihood (emitted only
/// when the model is within the enumeration cap and the estimator is
/// generative).
struct CompareCell {
  Estimator estimator;
  double lambda = 0.0;
  std::string metric;
  double value = 0.0;
};

/// Trains every estimator on `train` over a shared lambda grid and evaluates
/// per-variable held-out conditional losses (and the exact likelihood where
/// computable) on `holdout`.
std::vector<CompareCell> compare_estimators(const Dataset& train, const Dataset& holdout,
                                            const CompareConfig& config);

}  // namespace mgl
