#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Synthetic ground truth for recovery experiments: k continuous and k binary
/// variables arranged as a ladder. Edges are the continuous chain x_i - x_{i+1},
/// the discrete chain y_i - y_{i+1} and the mixed rungs x_i - y_i, so all three
/// edge kinds appear. beta_ss = 1; edge blocks are centered with magnitude 0.5
/// and alternating sign, which keeps B positive definite for every k.
Theta ladder_theta(int k);

/// Indices (into layout.groups()) of the ladder's true edges.
std::vector<int> ladder_edge_groups(const ParamLayout& layout);

/// Fully factorized model: x_s ~ N(mean_s, sd_s^2) independently and
/// y_r ~ Categorical(probs_r), via beta_ss = 1/sd^2, alpha_s = mean/sd^2 and
/// centered log-probability node potentials.
Theta independence_theta(std::shared_ptr<const ParamLayout> layout, const Eigen::VectorXd& means,
                         const Eigen::VectorXd& sds,
                         const std::vector<Eigen::VectorXd>& probs);

}  // namespace mgl
