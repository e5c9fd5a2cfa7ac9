#pragma once

#include <Eigen/Core>

#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Log of the unnormalized joint density at one row:
///   -1/2 sum_{s,t} beta_st x_s x_t + sum_s alpha_s x_s
///   + sum_{s,j} rho_sj(y_j) x_s + sum_{r<=j} phi_rj(y_r, y_j),
/// with the phi sum taken over r <= j once (phi_rr contributing its diagonal).
/// Pure evaluation: beta_ss > 0 is not required. Throws std::invalid_argument
/// on dimension mismatch.
double joint_log_density_unnormalized(const Theta& theta, const MixedRow& row);

struct GaussianConditional {
  double mean = 0.0;
  double variance = 0.0;
};

/// Conditional law of x_s given the rest of the row:
///   mean = (alpha_s + sum_j rho_sj(y_j) - sum_{t != s} beta_st x_t) / beta_ss,
///   variance = 1 / beta_ss.
/// Throws std::domain_error when beta_ss <= 0.
GaussianConditional conditional_gaussian(const Theta& theta, int s, const MixedRow& row);

/// Conditional law of y_r given the rest of the row: softmax over levels l of
///   sum_s rho_sr(l) x_s + phi_rr(l,l) + sum_{j != r} phi_rj(l, y_j),
/// computed with max subtraction. The result sums to 1.
Eigen::VectorXd conditional_multinomial(const Theta& theta, int r, const MixedRow& row);

}  // namespace mgl
