#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "mgl/objective.hpp"
#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Negative log pseudolikelihood: the sum over samples of the negative log
/// conditional of every included node given the rest. Value is +infinity
/// whenever any included beta_ss <= 0, which lets line searches reject
/// infeasible trial points; the -1/2 log beta_ss term keeps minimizers
/// interior.
class PLObjective final : public SmoothObjective {
 public:
  struct Options {
    bool normalize = true;           ///< divide by n (raw sums when false)
    Eigen::VectorXd sample_weights;  ///< empty = unit weights
    /// Restriction to a subset of conditionals (used by the node-wise
    /// baseline); empty in both means all nodes.
    std::vector<int> cont_nodes;
    std::vector<int> disc_nodes;
    bool restrict_nodes = false;
  };

  PLObjective(Dataset data, std::shared_ptr<const ParamLayout> layout);
  PLObjective(Dataset data, std::shared_ptr<const ParamLayout> layout, Options options);

  const ParamLayout& layout() const { return *layout_; }
  std::shared_ptr<const ParamLayout> layout_ptr() const { return layout_; }
  const Dataset& data() const { return data_; }

  int dim() const override { return layout_->dim(); }
  double value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const override;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const override;
  bool has_hessian() const override { return true; }
  void hessian_vector(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                      Eigen::VectorXd& out) const override;
  Eigen::MatrixXd dense_hessian(const Eigen::VectorXd& theta) const override;

  /// Per-node average negative log conditional (diagnostics, held-out
  /// evaluation). Order: continuous nodes, then categorical nodes.
  Eigen::VectorXd per_node_values(const Eigen::VectorXd& theta) const;

 private:
  Dataset data_;
  std::shared_ptr<const ParamLayout> layout_;
  Options options_;
};

}  // namespace mgl
