#include "mgl/theta.hpp"

#include <stdexcept>
#include <utility>

namespace mgl {

const char* group_kind_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::ContCont: return "cont-cont";
    case GroupKind::ContDisc: return "cont-disc";
    case GroupKind::DiscDisc: return "disc-disc";
    case GroupKind::FeatCont: return "feat-cont";
    case GroupKind::FeatDisc: return "feat-disc";
  }
  return "?";
}

ParamLayout::ParamLayout(Schema schema) : schema_(std::move(schema)) {
  schema_.validate();
  const int p = schema_.p;
  const int q = schema_.q;

  int off = 2 * p;  // beta diagonal, then alpha
  const int n_cc = p * (p - 1) / 2;
  const int beta_ut_begin = off;
  off += n_cc;

  rho_off_.resize(static_cast<std::size_t>(p * q));
  for (int s = 0; s < p; ++s)
    for (int j = 0; j < q; ++j) {
      rho_off_[static_cast<std::size_t>(s * q + j)] = off;
      off += schema_.level_count(j);
    }

  phi_diag_off_.resize(static_cast<std::size_t>(q));
  for (int r = 0; r < q; ++r) {
    phi_diag_off_[static_cast<std::size_t>(r)] = off;
    off += schema_.level_count(r);
  }

  phi_pair_off_.assign(static_cast<std::size_t>(q * q), -1);
  for (int r = 0; r < q; ++r)
    for (int j = r + 1; j < q; ++j) {
      phi_pair_off_[static_cast<std::size_t>(r * q + j)] = off;
      off += schema_.level_count(r) * schema_.level_count(j);
    }
  dim_ = off;

  groups_.reserve(static_cast<std::size_t>(n_cc + p * q + q * (q - 1) / 2));
  for (int s = 0; s < p; ++s)
    for (int t = s + 1; t < p; ++t)
      groups_.push_back({GroupKind::ContCont, s, t, beta_ut_begin + group_index_cc(s, t), 1});
  for (int s = 0; s < p; ++s)
    for (int j = 0; j < q; ++j)
      groups_.push_back({GroupKind::ContDisc, s, j, rho_begin(s, j), schema_.level_count(j)});
  for (int r = 0; r < q; ++r)
    for (int j = r + 1; j < q; ++j)
      groups_.push_back({GroupKind::DiscDisc, r, j, phi_pair_begin(r, j),
                         schema_.level_count(r) * schema_.level_count(j)});
}

int ParamLayout::beta_pair(int s, int t) const {
  if (s > t) std::swap(s, t);
  return 2 * schema_.p + group_index_cc(s, t);
}

int ParamLayout::phi_pair_begin(int r, int j) const {
  const int off = phi_pair_off_[static_cast<std::size_t>(r * schema_.q + j)];
  if (off < 0) throw std::invalid_argument("phi_pair_begin: need r < j");
  return off;
}

int ParamLayout::phi_entry(int r, int a, int j, int b) const {
  if (r < j) return phi_pair_begin(r, j) + a * schema_.level_count(j) + b;
  return phi_pair_begin(j, r) + b * schema_.level_count(r) + a;
}

int ParamLayout::group_index_cc(int s, int t) const {
  // position of (s,t), s<t, in row-major upper-triangle order
  const int p = schema_.p;
  return s * p - s * (s + 1) / 2 + (t - s - 1);
}

int ParamLayout::group_index_cd(int s, int j) const {
  return schema_.p * (schema_.p - 1) / 2 + s * schema_.q + j;
}

int ParamLayout::group_index_dd(int r, int j) const {
  const int q = schema_.q;
  return schema_.p * (schema_.p - 1) / 2 + schema_.p * q + r * q - r * (r + 1) / 2 + (j - r - 1);
}

Theta::Theta(std::shared_ptr<const ParamLayout> layout)
    : layout_(std::move(layout)), v_(Eigen::VectorXd::Zero(layout_->dim())) {}

Theta::Theta(std::shared_ptr<const ParamLayout> layout, Eigen::VectorXd flat)
    : layout_(std::move(layout)), v_(std::move(flat)) {
  if (v_.size() != layout_->dim()) throw std::invalid_argument("theta: flat vector has wrong size");
}

Theta Theta::independence(std::shared_ptr<const ParamLayout> layout) {
  Theta theta(std::move(layout));
  for (int s = 0; s < theta.schema().p; ++s) theta.v_[theta.layout_->beta_diag(s)] = 1.0;
  return theta;
}

double Theta::beta(int s, int t) const {
  if (s == t) return v_[layout_->beta_diag(s)];
  return v_[layout_->beta_pair(s, t)];
}

void Theta::set_beta(int s, int t, double value) {
  if (s == t)
    v_[layout_->beta_diag(s)] = value;
  else
    v_[layout_->beta_pair(s, t)] = value;
}

Eigen::Ref<const Eigen::VectorXd> Theta::rho(int s, int j) const {
  return v_.segment(layout_->rho_begin(s, j), schema().level_count(j));
}

Eigen::Ref<Eigen::VectorXd> Theta::rho(int s, int j) {
  return v_.segment(layout_->rho_begin(s, j), schema().level_count(j));
}

Eigen::Ref<const Eigen::VectorXd> Theta::phi_diag(int r) const {
  return v_.segment(layout_->phi_diag_begin(r), schema().level_count(r));
}

Eigen::Ref<Eigen::VectorXd> Theta::phi_diag(int r) {
  return v_.segment(layout_->phi_diag_begin(r), schema().level_count(r));
}

double Theta::phi(int r, int a, int j, int b) const {
  if (r == j) {
    if (a != b) return 0.0;  // off-diagonal of phi_rr is fixed at zero
    return v_[layout_->phi_diag_begin(r) + a];
  }
  return v_[layout_->phi_entry(r, a, j, b)];
}

void Theta::set_phi(int r, int a, int j, int b, double value) {
  if (r == j) {
    if (a != b) throw std::invalid_argument("set_phi: off-diagonal of phi_rr is fixed at zero");
    v_[layout_->phi_diag_begin(r) + a] = value;
    return;
  }
  v_[layout_->phi_entry(r, a, j, b)] = value;
}

Eigen::MatrixXd Theta::beta_matrix() const {
  const int p = schema().p;
  Eigen::MatrixXd b(p, p);
  for (int s = 0; s < p; ++s) {
    b(s, s) = beta(s, s);
    for (int t = s + 1; t < p; ++t) b(s, t) = b(t, s) = beta(s, t);
  }
  return b;
}

Theta center(const Theta& theta) {
  Theta out = theta;
  const Schema& schema = theta.schema();
  for (int s = 0; s < schema.p; ++s) {
    for (int j = 0; j < schema.q; ++j) {
      const double mean = out.rho(s, j).mean();
      out.rho(s, j).array() -= mean;
      out.set_alpha(s, out.alpha(s) + mean);
    }
  }
  for (int r = 0; r < schema.q; ++r) {
    for (int j = r + 1; j < schema.q; ++j) {
      const int lr = schema.level_count(r);
      const int lj = schema.level_count(j);
      Eigen::MatrixXd block(lr, lj);
      for (int a = 0; a < lr; ++a)
        for (int b = 0; b < lj; ++b) block(a, b) = out.phi(r, a, j, b);
      const double grand = block.mean();
      const Eigen::VectorXd row_mean = block.rowwise().mean();
      const Eigen::VectorXd col_mean = block.colwise().mean();
      for (int a = 0; a < lr; ++a)
        for (int b = 0; b < lj; ++b)
          out.set_phi(r, a, j, b, block(a, b) - row_mean[a] - col_mean[b] + grand);
      // row/column offsets become node potentials; the grand mean is dropped
      for (int a = 0; a < lr; ++a)
        out.set_phi(r, a, r, a, out.phi(r, a, r, a) + row_mean[a] - grand);
      for (int b = 0; b < lj; ++b)
        out.set_phi(j, b, j, b, out.phi(j, b, j, b) + col_mean[b] - grand);
    }
  }
  return out;
}

}  // namespace mgl
