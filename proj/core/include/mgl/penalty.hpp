#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "mgl/objective.hpp"
#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl {

/// lambda plus one positive weight per penalized group, aligned with the
/// layout's group order. Node parameters (alpha_s, beta_ss, the phi_rr
/// diagonal) are never penalized.
struct PenaltySpec {
  double lambda = 0.0;
  Eigen::VectorXd weights;
  bool calibrated = false;

  static PenaltySpec unit(const std::vector<EdgeGroup>& groups, double lambda = 0.0);
};

/// lambda * sum_g w_g ||theta_g||, with |.|, ||.||_2, ||.||_F by group kind.
double penalty_value(const Eigen::VectorXd& flat, const std::vector<EdgeGroup>& groups,
                     const PenaltySpec& spec);
double penalty_value(const Theta& theta, const PenaltySpec& spec);

/// Proximal operator of the group penalty at step t: scalar soft-thresholding
/// for ContCont/FeatCont groups, group soft-thresholding for the rest;
/// unpenalized coordinates pass through unchanged.
void prox_in_place(Eigen::VectorXd& point, double step, const std::vector<EdgeGroup>& groups,
                   const PenaltySpec& spec);
Eigen::VectorXd prox(const Eigen::VectorXd& point, double step,
                     const std::vector<EdgeGroup>& groups, const PenaltySpec& spec);

/// Norm of one group's slice of a flat vector.
double group_norm(const Eigen::VectorXd& flat, const EdgeGroup& group);

/// Calibration weights from empirical moments:
///   w_st = sigma_s sigma_t,
///   w_sj = sigma_s sqrt(sum_a p_a (1 - p_a)),
///   w_rj = sqrt(sum_a p_a (1 - p_a) * sum_b q_b (1 - q_b)).
/// Degenerate columns (zero variance, single observed level) produce a
/// warning and are floored at kWeightFloor.
struct WeightReport {
  Eigen::VectorXd weights;
  std::vector<std::string> warnings;
};
WeightReport calibrated_weights(const Dataset& data, const ParamLayout& layout);

inline constexpr double kWeightFloor = 1e-8;

/// Closed-form fit of the node-only model (all edge groups fixed at zero):
/// per continuous node beta_ss = 1/var, alpha_s = mean/var (biased variance),
/// per categorical node phi_rr = centered log empirical frequencies.
/// Unobserved levels get a half count so the logits stay finite.
Eigen::VectorXd node_only_fit(const Dataset& data, const ParamLayout& layout);

/// Smallest lambda at which every edge group is zero: the node-only model is
/// optimal iff ||grad_g f|| <= lambda w_g for all groups, so this returns
/// max_g ||grad_g f(theta0)|| / w_g.
double lambda_max(const SmoothObjective& objective, const std::vector<EdgeGroup>& groups,
                  const Eigen::VectorXd& weights, const Eigen::VectorXd& theta0);

/// Convenience overload for the pseudolikelihood objective on a dataset.
double lambda_max(const Dataset& data, const ParamLayout& layout, const Eigen::VectorXd& weights);

}  // namespace mgl
