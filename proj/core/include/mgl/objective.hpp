#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace mgl {

/// Hessian of a smooth objective at a point, exposed operator-first.
/// `apply` computes H*v exactly; `dense` is materialized only for small
/// dimensions (see SmoothObjective::dense_hessian).
struct HessianOperator {
  int dim = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
  std::optional<Eigen::MatrixXd> dense;
};

/// Smooth part f of a composite objective f + penalty, over a flat parameter
/// vector. Infeasible points (beta_ss <= 0) evaluate to +infinity; gradient
/// and Hessian calls at infeasible points throw std::domain_error.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const = 0;

  /// Default implementation calls value and gradient separately.
  virtual double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    grad = gradient(theta);
    return value(theta);
  }

  virtual bool has_hessian() const { return false; }

  /// Exact Hessian-vector product. Throws std::logic_error when no Hessian is
  /// available.
  virtual void hessian_vector(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                              Eigen::VectorXd& out) const;

  /// Dense materialization, gated at dim() <= kDenseHessianLimit.
  virtual Eigen::MatrixXd dense_hessian(const Eigen::VectorXd& theta) const;

  /// Operator-first view; materializes the dense form when within the gate.
  HessianOperator hessian(const Eigen::VectorXd& theta) const;

  static constexpr int kDenseHessianLimit = 2000;
};

}  // namespace mgl
