#include "mgl/objective.hpp"

#include <stdexcept>

namespace mgl {

void SmoothObjective::hessian_vector(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                     Eigen::VectorXd&) const {
  throw std::logic_error("objective does not provide a Hessian");
}

Eigen::MatrixXd SmoothObjective::dense_hessian(const Eigen::VectorXd&) const {
  throw std::logic_error("objective does not provide a Hessian");
}

HessianOperator SmoothObjective::hessian(const Eigen::VectorXd& theta) const {
  HessianOperator op;
  op.dim = dim();
  const Eigen::VectorXd at = theta;
  op.apply = [this, at](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    hessian_vector(at, v, out);
  };
  if (dim() <= kDenseHessianLimit) op.dense = dense_hessian(theta);
  return op;
}

}  // namespace mgl
