#include "mgl/crf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "pl_engine.hpp"

namespace mgl {

CrfLayout::CrfLayout(std::shared_ptr<const ParamLayout> base, int feature_count)
    : base_(std::move(base)), feature_count_(feature_count) {
  if (feature_count_ < 0) throw std::invalid_argument("crf: negative feature count");
  const Schema& schema = base_->schema();
  level_prefix_.resize(static_cast<std::size_t>(schema.q));
  levels_total_ = 0;
  for (int r = 0; r < schema.q; ++r) {
    level_prefix_[static_cast<std::size_t>(r)] = levels_total_;
    levels_total_ += schema.level_count(r);
  }
  gamma_begin_ = base_->dim();
  eta_begin_ = gamma_begin_ + feature_count_ * schema.p;
  dim_ = eta_begin_ + feature_count_ * levels_total_;

  groups_ = base_->groups();
  for (int l = 0; l < feature_count_; ++l)
    for (int s = 0; s < schema.p; ++s)
      groups_.push_back({GroupKind::FeatCont, l, s, gamma(l, s), 1});
  for (int l = 0; l < feature_count_; ++l)
    for (int r = 0; r < schema.q; ++r)
      groups_.push_back({GroupKind::FeatDisc, l, r, eta_begin(l, r), schema.level_count(r)});
}

Eigen::VectorXd crf_independence_init(const CrfLayout& layout) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.dim());
  for (int s = 0; s < layout.schema().p; ++s) theta[layout.base().beta_diag(s)] = 1.0;
  return theta;
}

namespace {

detail::SweepSpec build_spec(const Dataset& data, const CrfLayout& layout,
                             const Eigen::MatrixXd& features,
                             const CrfObjective::Options& options) {
  detail::SweepSpec spec = detail::make_sweep_spec(data, layout.base());
  spec.crf = &layout;
  spec.features = &features;
  spec.normalize = options.normalize;
  if (options.sample_weights.size() > 0) {
    if (options.sample_weights.size() != data.n())
      throw std::invalid_argument("crf: sample_weights size mismatch");
    spec.sample_weights = &options.sample_weights;
  }
  return spec;
}

}  // namespace

CrfObjective::CrfObjective(Dataset data, Eigen::MatrixXd features,
                           std::shared_ptr<const CrfLayout> layout)
    : CrfObjective(std::move(data), std::move(features), std::move(layout), Options()) {}

CrfObjective::CrfObjective(Dataset data, Eigen::MatrixXd features,
                           std::shared_ptr<const CrfLayout> layout, Options options)
    : data_(std::move(data)),
      features_(std::move(features)),
      layout_(std::move(layout)),
      options_(std::move(options)) {
  data_.validate();
  if (!(data_.schema == layout_->schema()))
    throw std::invalid_argument("crf: dataset schema does not match layout");
  if (features_.cols() != layout_->feature_count())
    throw std::invalid_argument("crf: feature matrix has wrong column count");
  if (layout_->feature_count() > 0 && features_.rows() != data_.n())
    throw std::invalid_argument("crf: feature matrix has wrong row count");
  if (layout_->feature_count() == 0 && features_.rows() == 0)
    features_.resize(data_.n(), 0);
}

double CrfObjective::value(const Eigen::VectorXd& theta) const {
  return detail::sweep_value(build_spec(data_, *layout_, features_, options_), theta);
}

Eigen::VectorXd CrfObjective::gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd grad;
  value_and_gradient(theta, grad);
  return grad;
}

double CrfObjective::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  return detail::sweep_value_and_gradient(build_spec(data_, *layout_, features_, options_), theta,
                                          grad);
}

void CrfObjective::hessian_vector(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                  Eigen::VectorXd& out) const {
  detail::sweep_hessian_vector(build_spec(data_, *layout_, features_, options_), theta, v, out);
}

Eigen::MatrixXd CrfObjective::dense_hessian(const Eigen::VectorXd& theta) const {
  if (dim() > kDenseHessianLimit)
    throw std::logic_error("dense Hessian is gated at dimension <= 2000; use hessian_vector");
  return detail::sweep_dense_hessian(build_spec(data_, *layout_, features_, options_), theta);
}

Eigen::VectorXd CrfObjective::per_node_values(const Eigen::VectorXd& theta) const {
  return detail::sweep_per_node_values(build_spec(data_, *layout_, features_, options_), theta);
}

namespace {

FeatureSplit split_features_impl(const Dataset& data, const std::vector<int>& feature_vars,
                                 const FeatureSplit* reference) {
  const Schema& schema = data.schema;
  const int n = data.n();
  std::vector<bool> is_feature(static_cast<std::size_t>(schema.var_count()), false);
  for (int v : feature_vars) {
    if (v < 0 || v >= schema.var_count())
      throw std::invalid_argument("split_features: variable index out of range");
    is_feature[static_cast<std::size_t>(v)] = true;
  }

  FeatureSplit split;
  split.feature_vars = feature_vars;

  Schema modeled;
  std::vector<int> keep_cont, keep_disc;
  for (int v = 0; v < schema.var_count(); ++v) {
    if (is_feature[static_cast<std::size_t>(v)]) continue;
    if (v < schema.p) {
      keep_cont.push_back(v);
    } else {
      keep_disc.push_back(v - schema.p);
      modeled.levels.push_back(schema.level_count(v - schema.p));
    }
  }
  modeled.p = static_cast<int>(keep_cont.size());
  modeled.q = static_cast<int>(keep_disc.size());
  for (int s : keep_cont) modeled.names.push_back(schema.variable_name(s));
  for (int j : keep_disc) modeled.names.push_back(schema.variable_name(schema.p + j));
  if (modeled.var_count() < 1)
    throw std::invalid_argument("split_features: no modeled variables left");

  Eigen::MatrixXd x(n, modeled.p);
  Eigen::MatrixXi y(n, modeled.q);
  for (std::size_t c = 0; c < keep_cont.size(); ++c)
    x.col(static_cast<Eigen::Index>(c)) = data.x.col(keep_cont[c]);
  for (std::size_t c = 0; c < keep_disc.size(); ++c)
    y.col(static_cast<Eigen::Index>(c)) = data.y.col(keep_disc[c]);
  split.modeled = Dataset(modeled, std::move(x), std::move(y));

  // expand features: raw continuous columns, one indicator per level otherwise
  std::vector<Eigen::VectorXd> cols;
  std::vector<std::string> names;
  for (int v : feature_vars) {
    if (v < schema.p) {
      cols.emplace_back(data.x.col(v));
      names.push_back(schema.variable_name(v));
    } else {
      const int j = v - schema.p;
      for (int l = 0; l < schema.level_count(j); ++l) {
        Eigen::VectorXd ind(n);
        for (int i = 0; i < n; ++i) ind[i] = data.y(i, j) == l ? 1.0 : 0.0;
        cols.push_back(std::move(ind));
        names.push_back(schema.variable_name(v) + "=" + std::to_string(l + 1));
      }
    }
  }
  const int f_count = static_cast<int>(cols.size());
  split.features.resize(n, f_count);
  for (int c = 0; c < f_count; ++c) split.features.col(c) = cols[static_cast<std::size_t>(c)];
  split.feature_names = std::move(names);

  if (reference) {
    if (reference->feature_mean.size() != f_count)
      throw std::invalid_argument("split_features: reference split has different feature count");
    split.feature_mean = reference->feature_mean;
    split.feature_sd = reference->feature_sd;
  } else {
    split.feature_mean.resize(f_count);
    split.feature_sd.resize(f_count);
    for (int c = 0; c < f_count; ++c) {
      const double mean = split.features.col(c).mean();
      double sd = n > 1 ? std::sqrt((split.features.col(c).array() - mean).square().sum() / (n - 1))
                        : 0.0;
      if (sd <= 0.0) sd = 1.0;  // constant feature column
      split.feature_mean[c] = mean;
      split.feature_sd[c] = sd;
    }
  }
  for (int c = 0; c < f_count; ++c)
    split.features.col(c) =
        (split.features.col(c).array() - split.feature_mean[c]) / split.feature_sd[c];
  return split;
}

}  // namespace

FeatureSplit split_features(const Dataset& data, const std::vector<int>& feature_vars) {
  return split_features_impl(data, feature_vars, nullptr);
}

FeatureSplit split_features_as(const Dataset& data, const FeatureSplit& reference) {
  return split_features_impl(data, reference.feature_vars, &reference);
}

}  // namespace mgl
