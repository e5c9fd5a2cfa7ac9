#include "mgl/mle.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mgl/model.hpp"

namespace mgl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_cap(const Schema& schema, std::uint64_t cap) {
  const auto count = schema.discrete_state_count();
  if (!count || *count > cap)
    throw std::runtime_error("model exceeds the exact-likelihood enumeration cap");
}

void decode_state(const Schema& schema, std::uint64_t index, Eigen::VectorXi& y) {
  y.resize(schema.q);
  for (int j = schema.q - 1; j >= 0; --j) {
    const auto lj = static_cast<std::uint64_t>(schema.level_count(j));
    y[j] = static_cast<int>(index % lj);
    index /= lj;
  }
}

// Per-sample sufficient statistics T(x, y) in flat layout, defined so that
// log p(x, y) = <T, theta> - log Z.
void sufficient_stats(const ParamLayout& layout, const Eigen::VectorXd& x,
                      const Eigen::VectorXi& y, Eigen::VectorXd& t) {
  const Schema& schema = layout.schema();
  t.setZero(layout.dim());
  for (int s = 0; s < schema.p; ++s) {
    t[layout.beta_diag(s)] = -0.5 * x[s] * x[s];
    t[layout.alpha(s)] = x[s];
    for (int u = s + 1; u < schema.p; ++u) t[layout.beta_pair(s, u)] = -x[s] * x[u];
  }
  for (int s = 0; s < schema.p; ++s)
    for (int j = 0; j < schema.q; ++j) t[layout.rho_begin(s, j) + y[j]] = x[s];
  for (int r = 0; r < schema.q; ++r) {
    t[layout.phi_diag_begin(r) + y[r]] = 1.0;
    for (int j = r + 1; j < schema.q; ++j) t[layout.phi_entry(r, y[r], j, y[j])] = 1.0;
  }
}

}  // namespace

LogPartition log_partition_detail(const Theta& theta, std::uint64_t cap) {
  const Schema& schema = theta.schema();
  check_cap(schema, cap);
  const Eigen::MatrixXd b = theta.beta_matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (schema.p > 0 && llt.info() != Eigen::Success)
    throw std::runtime_error("log_partition: B is not positive definite");

  LogPartition part;
  part.b_inverse = schema.p > 0 ? Eigen::MatrixXd(llt.solve(Eigen::MatrixXd::Identity(schema.p, schema.p)))
                                : Eigen::MatrixXd(0, 0);
  part.log_det_b = 0.0;
  for (int s = 0; s < schema.p; ++s) part.log_det_b += 2.0 * std::log(llt.matrixL()(s, s));

  const std::uint64_t count = *schema.discrete_state_count();
  part.gamma_table.resize(static_cast<Eigen::Index>(count), schema.p);
  part.state_log_prob.resize(static_cast<Eigen::Index>(count));
  Eigen::VectorXi y;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    decode_state(schema, idx, y);
    double e = 0.0;
    for (int r = 0; r < schema.q; ++r) {
      e += theta.phi_diag(r)[y[r]];
      for (int j = r + 1; j < schema.q; ++j) e += theta.phi(r, y[r], j, y[j]);
    }
    Eigen::VectorXd gamma(schema.p);
    for (int s = 0; s < schema.p; ++s) {
      double g = theta.alpha(s);
      for (int j = 0; j < schema.q; ++j) g += theta.rho(s, j)[y[j]];
      gamma[s] = g;
    }
    part.gamma_table.row(static_cast<Eigen::Index>(idx)) = gamma;
    if (schema.p > 0) e += 0.5 * gamma.dot(part.b_inverse * gamma);
    part.state_log_prob[static_cast<Eigen::Index>(idx)] = e;
  }
  const double m = part.state_log_prob.maxCoeff();
  const double lse = m + std::log((part.state_log_prob.array() - m).exp().sum());
  part.state_log_prob.array() -= lse;
  part.value = lse + 0.5 * schema.p * kLog2Pi - 0.5 * part.log_det_b;
  return part;
}

double log_partition(const Theta& theta) { return log_partition_detail(theta).value; }

Eigen::VectorXd expected_sufficient_stats(const Theta& theta, std::uint64_t cap) {
  const ParamLayout& layout = theta.layout();
  const Schema& schema = theta.schema();
  const LogPartition part = log_partition_detail(theta, cap);
  const std::uint64_t count = static_cast<std::uint64_t>(part.state_log_prob.size());

  Eigen::VectorXd stats = Eigen::VectorXd::Zero(layout.dim());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(schema.p, schema.p);  // E[x x^T]
  Eigen::VectorXi y;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const double py = std::exp(part.state_log_prob[static_cast<Eigen::Index>(idx)]);
    decode_state(schema, idx, y);
    Eigen::VectorXd mu(schema.p);
    if (schema.p > 0)
      mu = part.b_inverse * part.gamma_table.row(static_cast<Eigen::Index>(idx)).transpose();
    if (schema.p > 0) second += py * (part.b_inverse + mu * mu.transpose());
    for (int s = 0; s < schema.p; ++s) {
      stats[layout.alpha(s)] += py * mu[s];
      for (int j = 0; j < schema.q; ++j) stats[layout.rho_begin(s, j) + y[j]] += py * mu[s];
    }
    for (int r = 0; r < schema.q; ++r) {
      stats[layout.phi_diag_begin(r) + y[r]] += py;
      for (int j = r + 1; j < schema.q; ++j) stats[layout.phi_entry(r, y[r], j, y[j])] += py;
    }
  }
  for (int s = 0; s < schema.p; ++s) {
    stats[layout.beta_diag(s)] = -0.5 * second(s, s);
    for (int u = s + 1; u < schema.p; ++u) stats[layout.beta_pair(s, u)] = -second(s, u);
  }
  return stats;
}

MleObjective::MleObjective(Dataset data, std::shared_ptr<const ParamLayout> layout)
    : MleObjective(std::move(data), std::move(layout), Options()) {}

MleObjective::MleObjective(Dataset data, std::shared_ptr<const ParamLayout> layout,
                           Options options)
    : data_(std::move(data)), layout_(std::move(layout)), options_(options) {
  data_.validate();
  if (!(data_.schema == layout_->schema()))
    throw std::invalid_argument("mle: dataset schema does not match layout");
  check_cap(layout_->schema(), options_.cap);
  empirical_mean_ = Eigen::VectorXd::Zero(layout_->dim());
  Eigen::VectorXd t(layout_->dim());
  const int n = data_.n();
  for (int i = 0; i < n; ++i) {
    const MixedRow row = data_.row(i);
    sufficient_stats(*layout_, row.x, row.y, t);
    empirical_mean_ += t;
  }
  empirical_mean_ /= static_cast<double>(n);
}

double MleObjective::value(const Eigen::VectorXd& theta) const {
  const Theta th(layout_, theta);
  for (int s = 0; s < layout_->schema().p; ++s)
    if (theta[layout_->beta_diag(s)] <= 0.0) return std::numeric_limits<double>::infinity();
  double logz;
  try {
    logz = log_partition_detail(th, options_.cap).value;
  } catch (const std::runtime_error&) {
    return std::numeric_limits<double>::infinity();  // B not positive definite
  }
  // NLL/n = -<empirical mean of T, theta> + log Z
  double value = -empirical_mean_.dot(theta) + logz;
  if (!options_.normalize) value *= static_cast<double>(data_.n());
  return value;
}

Eigen::VectorXd MleObjective::gradient(const Eigen::VectorXd& theta) const {
  const Theta th(layout_, theta);
  Eigen::VectorXd grad;
  try {
    grad = expected_sufficient_stats(th, options_.cap) - empirical_mean_;
  } catch (const std::runtime_error& err) {
    throw std::domain_error(err.what());
  }
  if (!options_.normalize) grad *= static_cast<double>(data_.n());
  return grad;
}

double nll(const Theta& theta, const Dataset& data) {
  MleObjective objective(data, theta.layout_ptr());
  return objective.value(theta.flat());
}

Eigen::VectorXd nll_gradient(const Theta& theta, const Dataset& data) {
  MleObjective objective(data, theta.layout_ptr());
  return objective.gradient(theta.flat());
}

FitResult fit_mle(const Dataset& data, const PenaltySpec& penalty, const SolverConfig& config) {
  auto layout = std::make_shared<ParamLayout>(data.schema);
  MleObjective objective(data, layout);
  const Theta init = Theta::independence(layout);
  return solve(objective, layout->groups(), penalty, init.flat(), config);
}

}  // namespace mgl
