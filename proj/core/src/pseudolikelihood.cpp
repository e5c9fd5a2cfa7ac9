#include "mgl/pseudolikelihood.hpp"

#include <stdexcept>
#include <utility>

#include "pl_engine.hpp"

namespace mgl {

namespace {

detail::SweepSpec build_spec(const Dataset& data, const ParamLayout& layout,
                             const PLObjective::Options& options) {
  detail::SweepSpec spec = detail::make_sweep_spec(data, layout);
  spec.normalize = options.normalize;
  if (options.sample_weights.size() > 0) {
    if (options.sample_weights.size() != data.n())
      throw std::invalid_argument("pseudolikelihood: sample_weights size mismatch");
    spec.sample_weights = &options.sample_weights;
  }
  if (options.restrict_nodes) {
    spec.cont_nodes = options.cont_nodes;
    spec.disc_nodes = options.disc_nodes;
  }
  return spec;
}

}  // namespace

PLObjective::PLObjective(Dataset data, std::shared_ptr<const ParamLayout> layout)
    : PLObjective(std::move(data), std::move(layout), Options()) {}

PLObjective::PLObjective(Dataset data, std::shared_ptr<const ParamLayout> layout, Options options)
    : data_(std::move(data)), layout_(std::move(layout)), options_(std::move(options)) {
  data_.validate();
  if (!(data_.schema == layout_->schema()))
    throw std::invalid_argument("pseudolikelihood: dataset schema does not match layout");
}

double PLObjective::value(const Eigen::VectorXd& theta) const {
  const detail::SweepSpec spec = build_spec(data_, *layout_, options_);
  return detail::sweep_value(spec, theta);
}

Eigen::VectorXd PLObjective::gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd grad;
  value_and_gradient(theta, grad);
  return grad;
}

double PLObjective::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  const detail::SweepSpec spec = build_spec(data_, *layout_, options_);
  return detail::sweep_value_and_gradient(spec, theta, grad);
}

void PLObjective::hessian_vector(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                 Eigen::VectorXd& out) const {
  const detail::SweepSpec spec = build_spec(data_, *layout_, options_);
  detail::sweep_hessian_vector(spec, theta, v, out);
}

Eigen::MatrixXd PLObjective::dense_hessian(const Eigen::VectorXd& theta) const {
  if (dim() > kDenseHessianLimit)
    throw std::logic_error("dense Hessian is gated at dimension <= 2000; use hessian_vector");
  const detail::SweepSpec spec = build_spec(data_, *layout_, options_);
  return detail::sweep_dense_hessian(spec, theta);
}

Eigen::VectorXd PLObjective::per_node_values(const Eigen::VectorXd& theta) const {
  const detail::SweepSpec spec = build_spec(data_, *layout_, options_);
  return detail::sweep_per_node_values(spec, theta);
}

}  // namespace mgl
