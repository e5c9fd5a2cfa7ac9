#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "mgl/objective.hpp"
#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Parameter layout of the conditional model p(x, y | f): all Theta blocks,
/// followed by F*p feature-continuous coefficients gamma_ls and, per (l, r),
/// a length-L_r feature-discrete block eta_lr. gamma_ls shifts alpha_s by
/// gamma_ls * f_l per sample; eta_lr(k) shifts phi_rr(k,k) by eta_lr(k) * f_l.
class CrfLayout {
 public:
  CrfLayout(std::shared_ptr<const ParamLayout> base, int feature_count);

  const ParamLayout& base() const { return *base_; }
  std::shared_ptr<const ParamLayout> base_ptr() const { return base_; }
  const Schema& schema() const { return base_->schema(); }
  int feature_count() const { return feature_count_; }
  int dim() const { return dim_; }

  int gamma(int l, int s) const { return gamma_begin_ + l * schema().p + s; }
  /// Start of the length-L_r block eta_lr.
  int eta_begin(int l, int r) const {
    return eta_begin_ + l * levels_total_ + level_prefix_[static_cast<std::size_t>(r)];
  }

  /// Base edge groups followed by FeatCont and FeatDisc groups.
  const std::vector<EdgeGroup>& groups() const { return groups_; }

 private:
  std::shared_ptr<const ParamLayout> base_;
  int feature_count_ = 0;
  int gamma_begin_ = 0;
  int eta_begin_ = 0;
  int levels_total_ = 0;
  int dim_ = 0;
  std::vector<int> level_prefix_;
  std::vector<EdgeGroup> groups_;
};

/// beta_ss = 1, everything else (including gamma, eta) 0.
Eigen::VectorXd crf_independence_init(const CrfLayout& layout);

/// Negative log pseudolikelihood of the conditional model. With
/// feature_count = 0 this is bit-identical to PLObjective on the same data.
class CrfObjective final : public SmoothObjective {
 public:
  struct Options {
    bool normalize = true;
    Eigen::VectorXd sample_weights;  // empty = unit
  };

  CrfObjective(Dataset data, Eigen::MatrixXd features, std::shared_ptr<const CrfLayout> layout);
  CrfObjective(Dataset data, Eigen::MatrixXd features, std::shared_ptr<const CrfLayout> layout,
               Options options);

  const CrfLayout& layout() const { return *layout_; }
  std::shared_ptr<const CrfLayout> layout_ptr() const { return layout_; }
  const Dataset& data() const { return data_; }
  const Eigen::MatrixXd& features() const { return features_; }

  int dim() const override { return layout_->dim(); }
  double value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const override;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const override;
  bool has_hessian() const override { return true; }
  void hessian_vector(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                      Eigen::VectorXd& out) const override;
  Eigen::MatrixXd dense_hessian(const Eigen::VectorXd& theta) const override;

  /// Held-out diagnostics: per-node average negative log conditional.
  Eigen::VectorXd per_node_values(const Eigen::VectorXd& theta) const;

 private:
  Dataset data_;
  Eigen::MatrixXd features_;
  std::shared_ptr<const CrfLayout> layout_;
  Options options_;
};

/// A dataset split into modeled variables and a standardized feature matrix.
/// Categorical feature variables expand into one indicator column per level;
/// all feature columns are standardized at ingestion.
struct FeatureSplit {
  Dataset modeled;
  Eigen::MatrixXd features;
  std::vector<std::string> feature_names;
  std::vector<int> feature_vars;   ///< original variable indices
  Eigen::VectorXd feature_mean;    ///< standardization offsets (train moments)
  Eigen::VectorXd feature_sd;
};

/// Moves the given variables (indices into the schema's variable order) out of
/// the modeled set and into the feature matrix.
FeatureSplit split_features(const Dataset& data, const std::vector<int>& feature_vars);

/// Same split applied to new data using the reference split's level structure
/// and standardization moments (for held-out evaluation).
FeatureSplit split_features_as(const Dataset& data, const FeatureSplit& reference);

}  // namespace mgl
