#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>

#include "mgl/objective.hpp"
#include "mgl/penalty.hpp"
#include "mgl/schema.hpp"
#include "mgl/solve.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Enumeration cap for exact likelihood work (tighter than the sampler cap
/// because per-state Gaussian moments are needed).
inline constexpr std::uint64_t kMleEnumerationCap = 10'000;

/// log Z(Theta) with its cached pieces:
///   log Z = log sum_y exp(sum_{r<=j} phi + 1/2 gamma(y)^T B^{-1} gamma(y))
///           + (p/2) log(2 pi) - 1/2 log det B,
/// finite iff B is positive definite.
struct LogPartition {
  double value = 0.0;
  Eigen::MatrixXd b_inverse;
  double log_det_b = 0.0;
  Eigen::MatrixXd gamma_table;      ///< one row per discrete state
  Eigen::VectorXd state_log_prob;   ///< normalized log p(y)
};

LogPartition log_partition_detail(const Theta& theta, std::uint64_t cap = kMleEnumerationCap);
double log_partition(const Theta& theta);

/// Expected sufficient statistics under p(.; theta), laid out like a flat
/// parameter vector. This equals the gradient of log Z.
Eigen::VectorXd expected_sufficient_stats(const Theta& theta,
                                          std::uint64_t cap = kMleEnumerationCap);

/// Exact negative log likelihood over a dataset for small models. Value is
/// +infinity when B is not positive definite.
class MleObjective final : public SmoothObjective {
 public:
  struct Options {
    bool normalize = true;
    std::uint64_t cap = kMleEnumerationCap;
  };

  MleObjective(Dataset data, std::shared_ptr<const ParamLayout> layout);
  MleObjective(Dataset data, std::shared_ptr<const ParamLayout> layout, Options options);

  const ParamLayout& layout() const { return *layout_; }
  const Dataset& data() const { return data_; }

  int dim() const override { return layout_->dim(); }
  double value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const override;

 private:
  Dataset data_;
  std::shared_ptr<const ParamLayout> layout_;
  Options options_;
  Eigen::VectorXd empirical_mean_;  // mean of per-sample sufficient statistics
};

/// Convenience wrappers (normalized by n).
double nll(const Theta& theta, const Dataset& data);
Eigen::VectorXd nll_gradient(const Theta& theta, const Dataset& data);

/// Penalized exact maximum likelihood via the composite solvers. The exact
/// Hessian is not materialized, so proximal Newton runs in BFGS mode.
FitResult fit_mle(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config);

}  // namespace mgl
