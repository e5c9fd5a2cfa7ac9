#include "mgl/nodewise.hpp"

#include <memory>
#include <stdexcept>

#include "mgl/pseudolikelihood.hpp"

namespace mgl {

std::pair<int, int> group_nodes(const EdgeGroup& group, const Schema& schema) {
  switch (group.kind) {
    case GroupKind::ContCont: return {group.a, group.b};
    case GroupKind::ContDisc: return {group.a, schema.p + group.b};
    case GroupKind::DiscDisc: return {schema.p + group.a, schema.p + group.b};
    default: throw std::invalid_argument("group_nodes: feature groups have no node pair");
  }
}

NodewiseFit fit_separate(const Dataset& data, const ParamLayout& layout,
                         const std::vector<double>& lambdas, const Eigen::VectorXd& weights,
                         const SolverConfig& config) {
  const Schema& schema = layout.schema();
  auto shared_layout = std::make_shared<ParamLayout>(layout);
  const Theta init = Theta::independence(shared_layout);

  NodewiseFit fit;
  fit.lambdas = lambdas;
  fit.per_node.reserve(static_cast<std::size_t>(schema.p + schema.q));
  for (int node = 0; node < schema.p + schema.q; ++node) {
    PLObjective::Options options;
    options.restrict_nodes = true;
    if (node < schema.p)
      options.cont_nodes = {node};
    else
      options.disc_nodes = {node - schema.p};
    PLObjective objective(data, shared_layout, options);
    // Groups not touching this node have zero gradient and stay at zero from
    // the zero init, so the shared weight vector applies unchanged.
    fit.per_node.push_back(
        path_solve_grid(objective, layout.groups(), weights, lambdas, init.flat(), config));
  }
  return fit;
}

std::vector<int> combine_edges(const NodewiseFit& fit, std::size_t lambda_index,
                               const ParamLayout& layout, EdgeRule rule) {
  const Schema& schema = layout.schema();
  const auto& groups = layout.groups();
  std::vector<int> edges;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto [u, v] = group_nodes(groups[g], schema);
    const FitResult& fit_u = fit.per_node[static_cast<std::size_t>(u)].fits[lambda_index];
    const FitResult& fit_v = fit.per_node[static_cast<std::size_t>(v)].fits[lambda_index];
    const bool active_u = group_norm(fit_u.theta, groups[g]) > kActiveSetThreshold;
    const bool active_v = group_norm(fit_v.theta, groups[g]) > kActiveSetThreshold;
    const bool present = rule == EdgeRule::And ? (active_u && active_v) : (active_u || active_v);
    if (present) edges.push_back(static_cast<int>(g));
  }
  return edges;
}

}  // namespace mgl
