#include "mgl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgl {

Theta ladder_theta(int k) {
  if (k < 1) throw std::invalid_argument("ladder_theta: k must be >= 1");
  Schema schema;
  schema.p = k;
  schema.q = k;
  schema.levels.assign(static_cast<std::size_t>(k), 2);
  auto layout = std::make_shared<ParamLayout>(schema);
  Theta theta = Theta::independence(layout);

  int edge = 0;
  auto weight = [&edge]() { return (edge++ % 2 == 0) ? 0.5 : -0.5; };
  for (int s = 0; s + 1 < k; ++s) theta.set_beta(s, s + 1, weight());
  for (int s = 0; s < k; ++s) {
    const double w = weight();
    theta.rho(s, s) << w, -w;
  }
  for (int r = 0; r + 1 < k; ++r) {
    const double w = weight();
    theta.set_phi(r, 0, r + 1, 0, w);
    theta.set_phi(r, 0, r + 1, 1, -w);
    theta.set_phi(r, 1, r + 1, 0, -w);
    theta.set_phi(r, 1, r + 1, 1, w);
  }
  return theta;
}

std::vector<int> ladder_edge_groups(const ParamLayout& layout) {
  const Schema& schema = layout.schema();
  const int k = schema.p;
  if (schema.q != k) throw std::invalid_argument("ladder_edge_groups: layout is not a ladder");
  std::vector<int> edges;
  for (int s = 0; s + 1 < k; ++s) edges.push_back(layout.group_index_cc(s, s + 1));
  for (int s = 0; s < k; ++s) edges.push_back(layout.group_index_cd(s, s));
  for (int r = 0; r + 1 < k; ++r) edges.push_back(layout.group_index_dd(r, r + 1));
  std::sort(edges.begin(), edges.end());
  return edges;
}

Theta independence_theta(std::shared_ptr<const ParamLayout> layout, const Eigen::VectorXd& means,
                         const Eigen::VectorXd& sds,
                         const std::vector<Eigen::VectorXd>& probs) {
  const Schema& schema = layout->schema();
  if (means.size() != schema.p || sds.size() != schema.p)
    throw std::invalid_argument("independence_theta: wrong continuous moment sizes");
  if (static_cast<int>(probs.size()) != schema.q)
    throw std::invalid_argument("independence_theta: wrong probs count");
  Theta theta(std::move(layout));
  for (int s = 0; s < schema.p; ++s) {
    const double var = sds[s] * sds[s];
    if (var <= 0.0) throw std::invalid_argument("independence_theta: sd must be positive");
    theta.set_beta(s, s, 1.0 / var);
    theta.set_alpha(s, means[s] / var);
  }
  for (int r = 0; r < schema.q; ++r) {
    const Eigen::VectorXd& pr = probs[static_cast<std::size_t>(r)];
    if (pr.size() != schema.level_count(r) || pr.minCoeff() <= 0.0)
      throw std::invalid_argument("independence_theta: invalid level probabilities");
    Eigen::VectorXd logp = pr.array().log();
    logp.array() -= logp.mean();
    theta.phi_diag(r) = logp;
  }
  return theta;
}

}  // namespace mgl
