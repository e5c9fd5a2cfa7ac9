#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

#include "mgl/schema.hpp"

namespace mgl {

/// The three pairwise edge kinds plus the two feature-coefficient kinds used
/// by the conditional model.
enum class GroupKind {
  ContCont,  ///< scalar beta_st, s < t
  ContDisc,  ///< vector rho_sj of length L_j
  DiscDisc,  ///< matrix phi_rj of size L_r x L_j, r < j
  FeatCont,  ///< scalar gamma_ls (conditional model)
  FeatDisc,  ///< vector eta_lr of length L_r (conditional model)
};

const char* group_kind_name(GroupKind kind);

/// One penalized parameter block: its kind, the index pair it connects and
/// its [offset, offset+size) slice of the flat parameter vector.
struct EdgeGroup {
  GroupKind kind;
  int a = 0;  ///< s (ContCont, ContDisc), r (DiscDisc), feature l (Feat*)
  int b = 0;  ///< t (ContCont), j (ContDisc, DiscDisc), s or r (Feat*)
  int offset = 0;
  int size = 0;
};

/// Flat storage layout of the parameter set over a schema.
///
/// Canonical order: beta diagonal (p), alpha (p), beta upper triangle
/// (s<t row-major), rho blocks (s major, j minor), phi_rr diagonals,
/// phi_rj blocks (r<j row-major, each row-major L_r x L_j). Only the
/// diagonal of phi_rr is represented; its off-diagonal entries are fixed
/// at zero and never enter the model.
class ParamLayout {
 public:
  explicit ParamLayout(Schema schema);

  const Schema& schema() const { return schema_; }
  int dim() const { return dim_; }

  int beta_diag(int s) const { return s; }
  int alpha(int s) const { return schema_.p + s; }
  /// Canonical index of beta_st for s != t (order-insensitive).
  int beta_pair(int s, int t) const;
  /// Start of the length-L_j block rho_sj.
  int rho_begin(int s, int j) const { return rho_off_[static_cast<std::size_t>(s * schema_.q + j)]; }
  /// Start of the length-L_r diagonal of phi_rr.
  int phi_diag_begin(int r) const { return phi_diag_off_[static_cast<std::size_t>(r)]; }
  /// Start of the row-major L_r x L_j block phi_rj, r < j.
  int phi_pair_begin(int r, int j) const;
  /// Flat index of phi(level a of variable r, level b of variable j) for any
  /// r != j; resolves the symmetric storage phi_jr(b, a) = phi_rj(a, b).
  int phi_entry(int r, int a, int j, int b) const;

  /// Penalized edge groups in canonical order: ContCont, ContDisc, DiscDisc.
  const std::vector<EdgeGroup>& groups() const { return groups_; }
  int group_index_cc(int s, int t) const;
  int group_index_cd(int s, int j) const;
  int group_index_dd(int r, int j) const;

 private:
  Schema schema_;
  int dim_ = 0;
  std::vector<int> rho_off_;
  std::vector<int> phi_diag_off_;
  std::vector<int> phi_pair_off_;  // indexed r*q+j for r<j
  std::vector<EdgeGroup> groups_;
};

/// The full parameter set over a schema, stored as one flat vector plus the
/// layout that gives it structure. beta is symmetric with the upper triangle
/// stored once; phi_jr(b, a) aliases phi_rj(a, b).
class Theta {
 public:
  explicit Theta(std::shared_ptr<const ParamLayout> layout);
  Theta(std::shared_ptr<const ParamLayout> layout, Eigen::VectorXd flat);

  /// beta_ss = 1, everything else 0: the fully factorized starting point.
  static Theta independence(std::shared_ptr<const ParamLayout> layout);

  const ParamLayout& layout() const { return *layout_; }
  std::shared_ptr<const ParamLayout> layout_ptr() const { return layout_; }
  const Schema& schema() const { return layout_->schema(); }

  Eigen::VectorXd& flat() { return v_; }
  const Eigen::VectorXd& flat() const { return v_; }

  double beta(int s, int t) const;
  void set_beta(int s, int t, double value);
  double alpha(int s) const { return v_[layout_->alpha(s)]; }
  void set_alpha(int s, double value) { v_[layout_->alpha(s)] = value; }

  Eigen::Ref<const Eigen::VectorXd> rho(int s, int j) const;
  Eigen::Ref<Eigen::VectorXd> rho(int s, int j);
  Eigen::Ref<const Eigen::VectorXd> phi_diag(int r) const;
  Eigen::Ref<Eigen::VectorXd> phi_diag(int r);
  double phi(int r, int a, int j, int b) const;
  void set_phi(int r, int a, int j, int b, double value);

  /// Dense symmetric p x p matrix B = {beta_st}.
  Eigen::MatrixXd beta_matrix() const;

 private:
  std::shared_ptr<const ParamLayout> layout_;
  Eigen::VectorXd v_;
};

/// Returns the equivalent parametrization with each rho_sj mean-centered (the
/// removed mean moves into alpha_s) and each phi_rj doubly centered (row and
/// column offsets move into the phi_rr and phi_jj diagonals; the grand mean is
/// dropped). Both conditional distributions are invariant under this map, and
/// the map is idempotent.
Theta center(const Theta& theta);

}  // namespace mgl
