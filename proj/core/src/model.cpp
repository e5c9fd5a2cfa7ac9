#include "mgl/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mgl {

namespace {

void check_row(const Schema& schema, const MixedRow& row) {
  if (row.x.size() != schema.p || row.y.size() != schema.q)
    throw std::invalid_argument("row does not conform to schema");
  for (int j = 0; j < schema.q; ++j)
    if (row.y[j] < 0 || row.y[j] >= schema.level_count(j))
      throw std::invalid_argument("row level code out of range");
}

}  // namespace

double joint_log_density_unnormalized(const Theta& theta, const MixedRow& row) {
  const Schema& schema = theta.schema();
  check_row(schema, row);
  double value = 0.0;
  for (int s = 0; s < schema.p; ++s) {
    value += -0.5 * theta.beta(s, s) * row.x[s] * row.x[s] + theta.alpha(s) * row.x[s];
    for (int t = s + 1; t < schema.p; ++t) value -= theta.beta(s, t) * row.x[s] * row.x[t];
  }
  for (int s = 0; s < schema.p; ++s)
    for (int j = 0; j < schema.q; ++j) value += theta.rho(s, j)[row.y[j]] * row.x[s];
  for (int r = 0; r < schema.q; ++r) {
    value += theta.phi_diag(r)[row.y[r]];
    for (int j = r + 1; j < schema.q; ++j) value += theta.phi(r, row.y[r], j, row.y[j]);
  }
  return value;
}

GaussianConditional conditional_gaussian(const Theta& theta, int s, const MixedRow& row) {
  const Schema& schema = theta.schema();
  check_row(schema, row);
  const double beta_ss = theta.beta(s, s);
  if (beta_ss <= 0.0) throw std::domain_error("conditional_gaussian: beta_ss must be positive");
  double numerator = theta.alpha(s);
  for (int j = 0; j < schema.q; ++j) numerator += theta.rho(s, j)[row.y[j]];
  for (int t = 0; t < schema.p; ++t)
    if (t != s) numerator -= theta.beta(s, t) * row.x[t];
  return {numerator / beta_ss, 1.0 / beta_ss};
}

Eigen::VectorXd conditional_multinomial(const Theta& theta, int r, const MixedRow& row) {
  const Schema& schema = theta.schema();
  check_row(schema, row);
  const int lr = schema.level_count(r);
  Eigen::VectorXd logits(lr);
  for (int l = 0; l < lr; ++l) {
    double v = theta.phi_diag(r)[l];
    for (int s = 0; s < schema.p; ++s) v += theta.rho(s, r)[l] * row.x[s];
    for (int j = 0; j < schema.q; ++j)
      if (j != r) v += theta.phi(r, l, j, row.y[j]);
    logits[l] = v;
  }
  const double m = logits.maxCoeff();
  Eigen::VectorXd probs = (logits.array() - m).exp();
  probs /= probs.sum();
  return probs;
}

}  // namespace mgl
