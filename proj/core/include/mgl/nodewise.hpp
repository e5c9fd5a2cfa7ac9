#pragma once

#include <Eigen/Core>

#include <vector>

#include "mgl/penalty.hpp"
#include "mgl/schema.hpp"
#include "mgl/solve.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Separate node-wise regressions: node u's conditional negative log
/// likelihood plus group penalties on u's incoming edge blocks, with no
/// parameter sharing between the two directions of an edge. Each node's fits
/// live in a full-size parameter vector in which every block not touching u
/// stays zero.
struct NodewiseFit {
  std::vector<double> lambdas;
  std::vector<PathResult> per_node;  ///< size p + q, continuous nodes first
};

/// Fits every node independently over the given (descending) lambda grid.
/// Weights align with the layout's penalized groups, exactly as in the joint
/// fit; per-node intercepts (alpha_s, beta_ss, phi_rr) stay unpenalized.
NodewiseFit fit_separate(const Dataset& data, const ParamLayout& layout,
                         const std::vector<double>& lambdas, const Eigen::VectorXd& weights,
                         const SolverConfig& config);

enum class EdgeRule { And, Or };

/// Reconciles the two directed fits of each edge at one grid point: an edge is
/// present iff both (And) / either (Or) directed blocks exceed the active-set
/// threshold. Returns indices into layout.groups().
std::vector<int> combine_edges(const NodewiseFit& fit, std::size_t lambda_index,
                               const ParamLayout& layout, EdgeRule rule);

/// The two variable indices (continuous first, then categorical offset by p)
/// joined by a penalized group.
std::pair<int, int> group_nodes(const EdgeGroup& group, const Schema& schema);

}  // namespace mgl
