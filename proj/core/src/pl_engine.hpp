#pragma once

// Internal engine shared by the pseudolikelihood, conditional-model and
// node-wise objectives. Sums, per sample, the negative log conditional of
// each included node. Feature columns shift the node potentials per sample:
// alpha_s by sum_l gamma_ls f_l and phi_rr(k,k) by sum_l eta_lr(k) f_l.

#include <Eigen/Core>

#include <vector>

#include "mgl/crf.hpp"
#include "mgl/schema.hpp"
#include "mgl/theta.hpp"

namespace mgl::detail {

struct SweepSpec {
  const Dataset* data = nullptr;
  const ParamLayout* layout = nullptr;
  // Conditional-model extension; both null for the plain pseudolikelihood.
  const CrfLayout* crf = nullptr;
  const Eigen::MatrixXd* features = nullptr;  // n x F
  const Eigen::VectorXd* sample_weights = nullptr;  // size n, unit when null
  bool normalize = true;                            // divide by n
  std::vector<int> cont_nodes;  // included continuous conditionals
  std::vector<int> disc_nodes;  // included discrete conditionals

  int flat_dim() const { return crf ? crf->dim() : layout->dim(); }
  double weight(int i) const { return sample_weights ? (*sample_weights)[i] : 1.0; }
  double scale() const { return normalize ? 1.0 / static_cast<double>(data->n()) : 1.0; }
};

SweepSpec make_sweep_spec(const Dataset& data, const ParamLayout& layout);

double sweep_value(const SweepSpec& spec, const Eigen::VectorXd& theta);

double sweep_value_and_gradient(const SweepSpec& spec, const Eigen::VectorXd& theta,
                                Eigen::VectorXd& grad);

void sweep_hessian_vector(const SweepSpec& spec, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& dir, Eigen::VectorXd& out);

Eigen::MatrixXd sweep_dense_hessian(const SweepSpec& spec, const Eigen::VectorXd& theta);

// Per-node sums of negative log conditionals (normalized when spec.normalize);
// entries for excluded nodes are zero. Order: continuous 0..p-1, then
// categorical p..p+q-1.
Eigen::VectorXd sweep_per_node_values(const SweepSpec& spec, const Eigen::VectorXd& theta);

}  // namespace mgl::detail
