#include "pl_engine.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mgl::detail {

namespace {

constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454836;  // log(2*pi)

// Linear predictor of the Gaussian conditional for node s at sample i:
// alpha_s + sum_j rho_sj(y_ij) - sum_{t != s} beta_st x_it (+ feature shift).
double gaussian_numerator(const SweepSpec& spec, const Eigen::VectorXd& th, int i, int s) {
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  double u = th[L.alpha(s)];
  for (int j = 0; j < schema.q; ++j) u += th[L.rho_begin(s, j) + d.y(i, j)];
  for (int t = 0; t < schema.p; ++t)
    if (t != s) u -= th[L.beta_pair(s, t)] * d.x(i, t);
  if (spec.crf)
    for (int l = 0; l < spec.crf->feature_count(); ++l)
      u += th[spec.crf->gamma(l, s)] * (*spec.features)(i, l);
  return u;
}

// Multinomial logits for node r at sample i.
void multinomial_logits(const SweepSpec& spec, const Eigen::VectorXd& th, int i, int r,
                        Eigen::VectorXd& logits) {
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int lr = schema.level_count(r);
  logits.resize(lr);
  for (int l = 0; l < lr; ++l) logits[l] = th[L.phi_diag_begin(r) + l];
  for (int s = 0; s < schema.p; ++s) {
    const double xs = d.x(i, s);
    const int off = L.rho_begin(s, r);
    for (int l = 0; l < lr; ++l) logits[l] += th[off + l] * xs;
  }
  for (int j = 0; j < schema.q; ++j) {
    if (j == r) continue;
    const int yj = d.y(i, j);
    for (int l = 0; l < lr; ++l) logits[l] += th[L.phi_entry(r, l, j, yj)];
  }
  if (spec.crf) {
    for (int fl = 0; fl < spec.crf->feature_count(); ++fl) {
      const double f = (*spec.features)(i, fl);
      const int off = spec.crf->eta_begin(fl, r);
      for (int l = 0; l < lr; ++l) logits[l] += th[off + l] * f;
    }
  }
}

double log_sum_exp(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

bool feasible(const SweepSpec& spec, const Eigen::VectorXd& th) {
  for (int s : spec.cont_nodes)
    if (th[spec.layout->beta_diag(s)] <= 0.0) return false;
  return true;
}

void require_feasible(const SweepSpec& spec, const Eigen::VectorXd& th) {
  if (!feasible(spec, th))
    throw std::domain_error("pseudolikelihood: beta_ss must be positive");
}

// Indices and coefficients of the affine map feeding the Gaussian conditional
// of node s at sample i (everything except beta_ss itself).
void gaussian_affine_coords(const SweepSpec& spec, int i, int s, std::vector<int>& idx,
                            std::vector<double>& coef) {
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  idx.clear();
  coef.clear();
  idx.push_back(L.alpha(s));
  coef.push_back(1.0);
  for (int j = 0; j < schema.q; ++j) {
    idx.push_back(L.rho_begin(s, j) + d.y(i, j));
    coef.push_back(1.0);
  }
  for (int t = 0; t < schema.p; ++t) {
    if (t == s) continue;
    idx.push_back(L.beta_pair(s, t));
    coef.push_back(-d.x(i, t));
  }
  if (spec.crf) {
    for (int l = 0; l < spec.crf->feature_count(); ++l) {
      idx.push_back(spec.crf->gamma(l, s));
      coef.push_back((*spec.features)(i, l));
    }
  }
}

// Per-level parameter indices and shared coefficients of the multinomial
// logits for node r at sample i: logit_l = sum_k coef[k] * th[idx[k][l]].
void multinomial_features(const SweepSpec& spec, int i, int r, std::vector<std::vector<int>>& idx,
                          std::vector<double>& coef) {
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int lr = schema.level_count(r);
  idx.clear();
  coef.clear();
  auto add_feature = [&](double c) -> std::vector<int>& {
    coef.push_back(c);
    idx.emplace_back(static_cast<std::size_t>(lr));
    return idx.back();
  };
  {
    auto& e = add_feature(1.0);
    for (int l = 0; l < lr; ++l) e[static_cast<std::size_t>(l)] = L.phi_diag_begin(r) + l;
  }
  for (int s = 0; s < schema.p; ++s) {
    auto& e = add_feature(d.x(i, s));
    for (int l = 0; l < lr; ++l) e[static_cast<std::size_t>(l)] = L.rho_begin(s, r) + l;
  }
  for (int j = 0; j < schema.q; ++j) {
    if (j == r) continue;
    auto& e = add_feature(1.0);
    for (int l = 0; l < lr; ++l) e[static_cast<std::size_t>(l)] = L.phi_entry(r, l, j, d.y(i, j));
  }
  if (spec.crf) {
    for (int fl = 0; fl < spec.crf->feature_count(); ++fl) {
      auto& e = add_feature((*spec.features)(i, fl));
      for (int l = 0; l < lr; ++l) e[static_cast<std::size_t>(l)] = spec.crf->eta_begin(fl, r) + l;
    }
  }
}

}  // namespace

SweepSpec make_sweep_spec(const Dataset& data, const ParamLayout& layout) {
  SweepSpec spec;
  spec.data = &data;
  spec.layout = &layout;
  spec.cont_nodes.resize(static_cast<std::size_t>(layout.schema().p));
  spec.disc_nodes.resize(static_cast<std::size_t>(layout.schema().q));
  for (int s = 0; s < layout.schema().p; ++s) spec.cont_nodes[static_cast<std::size_t>(s)] = s;
  for (int r = 0; r < layout.schema().q; ++r) spec.disc_nodes[static_cast<std::size_t>(r)] = r;
  return spec;
}

double sweep_value(const SweepSpec& spec, const Eigen::VectorXd& th) {
  if (!feasible(spec, th)) return std::numeric_limits<double>::infinity();
  const Dataset& d = *spec.data;
  const int n = d.n();
  Eigen::VectorXd logits;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = spec.weight(i);
    for (int s : spec.cont_nodes) {
      const double beta_ss = th[spec.layout->beta_diag(s)];
      const double dd = gaussian_numerator(spec, th, i, s) / beta_ss - d.x(i, s);
      total += w * (kHalfLog2Pi - 0.5 * std::log(beta_ss) + 0.5 * beta_ss * dd * dd);
    }
    for (int r : spec.disc_nodes) {
      multinomial_logits(spec, th, i, r, logits);
      total += w * (log_sum_exp(logits) - logits[d.y(i, r)]);
    }
  }
  return total * spec.scale();
}

double sweep_value_and_gradient(const SweepSpec& spec, const Eigen::VectorXd& th,
                                Eigen::VectorXd& grad) {
  require_feasible(spec, th);
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int n = d.n();
  grad = Eigen::VectorXd::Zero(spec.flat_dim());
  Eigen::VectorXd logits;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = spec.weight(i);
    for (int s : spec.cont_nodes) {
      const double beta_ss = th[L.beta_diag(s)];
      const double xs = d.x(i, s);
      const double dd = gaussian_numerator(spec, th, i, s) / beta_ss - xs;
      total += w * (kHalfLog2Pi - 0.5 * std::log(beta_ss) + 0.5 * beta_ss * dd * dd);
      const double c = w * dd;  // d/du of the squared term
      grad[L.alpha(s)] += c;
      for (int j = 0; j < schema.q; ++j) grad[L.rho_begin(s, j) + d.y(i, j)] += c;
      for (int t = 0; t < schema.p; ++t)
        if (t != s) grad[L.beta_pair(s, t)] -= c * d.x(i, t);
      if (spec.crf)
        for (int l = 0; l < spec.crf->feature_count(); ++l)
          grad[spec.crf->gamma(l, s)] += c * (*spec.features)(i, l);
      grad[L.beta_diag(s)] += w * (-0.5 / beta_ss - xs * dd - 0.5 * dd * dd);
    }
    for (int r : spec.disc_nodes) {
      multinomial_logits(spec, th, i, r, logits);
      const double lse = log_sum_exp(logits);
      const int obs = d.y(i, r);
      total += w * (lse - logits[obs]);
      const int lr = schema.level_count(r);
      for (int l = 0; l < lr; ++l) {
        double g = w * std::exp(logits[l] - lse);  // w * pi_l
        if (l == obs) g -= w;
        if (g == 0.0) continue;
        grad[L.phi_diag_begin(r) + l] += g;
        for (int s = 0; s < schema.p; ++s) grad[L.rho_begin(s, r) + l] += g * d.x(i, s);
        for (int j = 0; j < schema.q; ++j)
          if (j != r) grad[L.phi_entry(r, l, j, d.y(i, j))] += g;
        if (spec.crf)
          for (int fl = 0; fl < spec.crf->feature_count(); ++fl)
            grad[spec.crf->eta_begin(fl, r) + l] += g * (*spec.features)(i, fl);
      }
    }
  }
  grad *= spec.scale();
  return total * spec.scale();
}

void sweep_hessian_vector(const SweepSpec& spec, const Eigen::VectorXd& th,
                          const Eigen::VectorXd& dir, Eigen::VectorXd& out) {
  require_feasible(spec, th);
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int n = d.n();
  out = Eigen::VectorXd::Zero(spec.flat_dim());
  Eigen::VectorXd logits, probs, dlogit;
  std::vector<int> aidx;
  std::vector<double> acoef;
  for (int i = 0; i < n; ++i) {
    const double w = spec.weight(i);
    for (int s : spec.cont_nodes) {
      const double beta_ss = th[L.beta_diag(s)];
      const double xs = d.x(i, s);
      const double dd = gaussian_numerator(spec, th, i, s) / beta_ss - xs;
      gaussian_affine_coords(spec, i, s, aidx, acoef);
      double du = 0.0;
      for (std::size_t k = 0; k < aidx.size(); ++k) du += acoef[k] * dir[aidx[k]];
      const double db = dir[L.beta_diag(s)];
      // 2x2 Hessian of the term in (u, beta_ss) coordinates
      const double xd = xs + dd;
      const double huu = 1.0 / beta_ss;
      const double hub = -xd / beta_ss;
      const double hbb = 0.5 / (beta_ss * beta_ss) + xd * xd / beta_ss;
      const double gu = w * (huu * du + hub * db);
      const double gb = w * (hub * du + hbb * db);
      for (std::size_t k = 0; k < aidx.size(); ++k) out[aidx[k]] += acoef[k] * gu;
      out[L.beta_diag(s)] += gb;
    }
    for (int r : spec.disc_nodes) {
      multinomial_logits(spec, th, i, r, logits);
      const double lse = log_sum_exp(logits);
      probs = (logits.array() - lse).exp();
      const int lr = schema.level_count(r);
      dlogit.setZero(lr);
      std::vector<std::vector<int>> fidx;
      std::vector<double> fcoef;
      multinomial_features(spec, i, r, fidx, fcoef);
      for (std::size_t k = 0; k < fidx.size(); ++k)
        for (int l = 0; l < lr; ++l)
          dlogit[l] += fcoef[k] * dir[fidx[k][static_cast<std::size_t>(l)]];
      const double pdot = probs.dot(dlogit);
      // (diag(pi) - pi pi^T) * dlogit
      Eigen::VectorXd hrow = probs.array() * (dlogit.array() - pdot);
      for (std::size_t k = 0; k < fidx.size(); ++k)
        for (int l = 0; l < lr; ++l)
          out[fidx[k][static_cast<std::size_t>(l)]] += w * fcoef[k] * hrow[l];
    }
  }
  out *= spec.scale();
}

Eigen::MatrixXd sweep_dense_hessian(const SweepSpec& spec, const Eigen::VectorXd& th) {
  require_feasible(spec, th);
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int n = d.n();
  const int dim = spec.flat_dim();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd logits, probs;
  std::vector<int> aidx;
  std::vector<double> acoef;
  for (int i = 0; i < n; ++i) {
    const double w = spec.weight(i);
    for (int s : spec.cont_nodes) {
      const double beta_ss = th[L.beta_diag(s)];
      const double xs = d.x(i, s);
      const double dd = gaussian_numerator(spec, th, i, s) / beta_ss - xs;
      gaussian_affine_coords(spec, i, s, aidx, acoef);
      const double xd = xs + dd;
      const double huu = w / beta_ss;
      const double hub = -w * xd / beta_ss;
      const double hbb = w * (0.5 / (beta_ss * beta_ss) + xd * xd / beta_ss);
      const int ib = L.beta_diag(s);
      for (std::size_t k1 = 0; k1 < aidx.size(); ++k1) {
        for (std::size_t k2 = 0; k2 < aidx.size(); ++k2)
          hess(aidx[k1], aidx[k2]) += huu * acoef[k1] * acoef[k2];
        hess(aidx[k1], ib) += hub * acoef[k1];
        hess(ib, aidx[k1]) += hub * acoef[k1];
      }
      hess(ib, ib) += hbb;
    }
    for (int r : spec.disc_nodes) {
      multinomial_logits(spec, th, i, r, logits);
      const double lse = log_sum_exp(logits);
      probs = (logits.array() - lse).exp();
      const int lr = schema.level_count(r);
      std::vector<std::vector<int>> fidx;
      std::vector<double> fcoef;
      multinomial_features(spec, i, r, fidx, fcoef);
      for (std::size_t k1 = 0; k1 < fidx.size(); ++k1) {
        for (std::size_t k2 = 0; k2 < fidx.size(); ++k2) {
          const double cc = w * fcoef[k1] * fcoef[k2];
          if (cc == 0.0) continue;
          for (int l1 = 0; l1 < lr; ++l1) {
            const double pl1 = probs[l1];
            for (int l2 = 0; l2 < lr; ++l2) {
              const double wmat = (l1 == l2 ? pl1 * (1.0 - pl1) : -pl1 * probs[l2]);
              hess(fidx[k1][static_cast<std::size_t>(l1)], fidx[k2][static_cast<std::size_t>(l2)]) +=
                  cc * wmat;
            }
          }
        }
      }
    }
  }
  hess *= spec.scale();
  return hess;
}

Eigen::VectorXd sweep_per_node_values(const SweepSpec& spec, const Eigen::VectorXd& th) {
  require_feasible(spec, th);
  const ParamLayout& L = *spec.layout;
  const Schema& schema = L.schema();
  const Dataset& d = *spec.data;
  const int n = d.n();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(schema.p + schema.q);
  Eigen::VectorXd logits;
  for (int i = 0; i < n; ++i) {
    const double w = spec.weight(i);
    for (int s : spec.cont_nodes) {
      const double beta_ss = th[L.beta_diag(s)];
      const double dd = gaussian_numerator(spec, th, i, s) / beta_ss - d.x(i, s);
      out[s] += w * (kHalfLog2Pi - 0.5 * std::log(beta_ss) + 0.5 * beta_ss * dd * dd);
    }
    for (int r : spec.disc_nodes) {
      multinomial_logits(spec, th, i, r, logits);
      out[schema.p + r] += w * (log_sum_exp(logits) - logits[d.y(i, r)]);
    }
  }
  return out * spec.scale();
}

}  // namespace mgl::detail
