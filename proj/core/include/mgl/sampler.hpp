#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// Default cap on exact enumeration of the discrete state space.
inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

/// Exact tabulation of the discrete marginal p(y) over all joint states:
///   log p(y) = sum_{r<=j} phi_rj(y_r, y_j) + 1/2 gamma(y)^T B^{-1} gamma(y) - log_norm,
/// with gamma(y)_s = alpha_s + sum_j rho_sj(y_j). States are indexed in
/// mixed-radix order with the last variable fastest.
struct DiscreteMarginal {
  Schema schema;
  Eigen::VectorXd log_prob;  ///< normalized, sums (in exp) to 1
  double log_norm = 0.0;

  std::uint64_t state_count() const { return static_cast<std::uint64_t>(log_prob.size()); }
  void state(std::uint64_t index, Eigen::VectorXi& y) const;
  std::uint64_t index_of(const Eigen::VectorXi& y) const;
  double prob(std::uint64_t index) const;
};

/// Throws std::runtime_error when the state count exceeds `cap` (pointing at
/// the Gibbs path) or when B is not positive definite.
DiscreteMarginal discrete_marginal_exact(const Theta& theta,
                                         std::uint64_t cap = kEnumerationCap);

/// Single-site Gibbs over y using the full conditionals of the marginal p(y)
/// (x integrated out analytically). Returns n rows of 0-based level codes.
/// The chain is initialized from the node potentials and is reproducible
/// given the seed.
Eigen::MatrixXi gibbs_discrete(const Theta& theta, int n, int burn_in = 1000, int thin = 10,
                               std::uint64_t seed = 0);

struct SampleOptions {
  std::uint64_t enumeration_cap = kEnumerationCap;
  int gibbs_burn_in = 1000;
  int gibbs_thin = 10;
};

/// Draws n rows from the joint model: y from the exact discrete marginal
/// (inverse CDF) or Gibbs beyond the enumeration cap, then x | y from
/// N(B^{-1} gamma(y), B^{-1}) via the Cholesky factor of B. Reproducible
/// given the seed. Throws when B is not positive definite.
Dataset sample_joint(const Theta& theta, int n, std::uint64_t seed,
                     const SampleOptions& options = {});

}  // namespace mgl
