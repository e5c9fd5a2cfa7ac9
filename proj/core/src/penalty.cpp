#include "mgl/penalty.hpp"

#include <cmath>
#include <stdexcept>

#include "mgl/pseudolikelihood.hpp"

namespace mgl {

PenaltySpec PenaltySpec::unit(const std::vector<EdgeGroup>& groups, double lambda) {
  PenaltySpec spec;
  spec.lambda = lambda;
  spec.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(groups.size()));
  spec.calibrated = false;
  return spec;
}

double group_norm(const Eigen::VectorXd& flat, const EdgeGroup& group) {
  return flat.segment(group.offset, group.size).norm();
}

double penalty_value(const Eigen::VectorXd& flat, const std::vector<EdgeGroup>& groups,
                     const PenaltySpec& spec) {
  if (spec.weights.size() != static_cast<Eigen::Index>(groups.size()))
    throw std::invalid_argument("penalty: weights size does not match group count");
  double total = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    total += spec.weights[static_cast<Eigen::Index>(g)] * group_norm(flat, groups[g]);
  return spec.lambda * total;
}

double penalty_value(const Theta& theta, const PenaltySpec& spec) {
  return penalty_value(theta.flat(), theta.layout().groups(), spec);
}

void prox_in_place(Eigen::VectorXd& point, double step, const std::vector<EdgeGroup>& groups,
                   const PenaltySpec& spec) {
  if (step <= 0.0) throw std::invalid_argument("prox: step must be positive");
  if (spec.lambda == 0.0) return;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const EdgeGroup& grp = groups[g];
    const double threshold = step * spec.lambda * spec.weights[static_cast<Eigen::Index>(g)];
    auto block = point.segment(grp.offset, grp.size);
    const double norm = block.norm();
    if (norm <= threshold)
      block.setZero();
    else
      block *= (1.0 - threshold / norm);
  }
}

Eigen::VectorXd prox(const Eigen::VectorXd& point, double step,
                     const std::vector<EdgeGroup>& groups, const PenaltySpec& spec) {
  Eigen::VectorXd out = point;
  prox_in_place(out, step, groups, spec);
  return out;
}

namespace {

// sum_a p_a (1 - p_a) from level counts, with a warning when only one level
// was observed.
double indicator_trace(const Eigen::VectorXd& counts, double n, int var,
                       std::vector<std::string>& warnings) {
  double trace = 0.0;
  int observed = 0;
  for (Eigen::Index a = 0; a < counts.size(); ++a) {
    const double pa = counts[a] / n;
    if (counts[a] > 0) ++observed;
    trace += pa * (1.0 - pa);
  }
  if (observed < 2)
    warnings.push_back("categorical variable " + std::to_string(var + 1) +
                       " has a single observed level; weight floored");
  return trace;
}

}  // namespace

WeightReport calibrated_weights(const Dataset& data, const ParamLayout& layout) {
  const Schema& schema = layout.schema();
  const int n = data.n();
  if (n < 2) throw std::invalid_argument("calibrated_weights: need at least 2 samples");
  WeightReport report;

  Eigen::VectorXd sigma(schema.p);
  for (int s = 0; s < schema.p; ++s) {
    const double mean = data.x.col(s).mean();
    const double ss = (data.x.col(s).array() - mean).square().sum();
    sigma[s] = std::sqrt(ss / (n - 1));
    if (sigma[s] <= 0.0)
      report.warnings.push_back("continuous variable " + std::to_string(s + 1) +
                                " has zero variance; weight floored");
  }
  Eigen::VectorXd disc_trace(schema.q);
  for (int r = 0; r < schema.q; ++r) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(schema.level_count(r));
    for (int i = 0; i < n; ++i) counts[data.y(i, r)] += 1.0;
    disc_trace[r] = indicator_trace(counts, static_cast<double>(n), r, report.warnings);
  }

  const auto& groups = layout.groups();
  report.weights.resize(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const EdgeGroup& grp = groups[g];
    double w = 0.0;
    switch (grp.kind) {
      case GroupKind::ContCont: w = sigma[grp.a] * sigma[grp.b]; break;
      case GroupKind::ContDisc: w = sigma[grp.a] * std::sqrt(disc_trace[grp.b]); break;
      case GroupKind::DiscDisc: w = std::sqrt(disc_trace[grp.a] * disc_trace[grp.b]); break;
      default: w = 1.0; break;
    }
    report.weights[static_cast<Eigen::Index>(g)] = std::max(w, kWeightFloor);
  }
  report.weights = report.weights.cwiseMax(kWeightFloor);
  return report;
}

Eigen::VectorXd node_only_fit(const Dataset& data, const ParamLayout& layout) {
  const Schema& schema = layout.schema();
  const int n = data.n();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.dim());
  for (int s = 0; s < schema.p; ++s) {
    const double mean = data.x.col(s).mean();
    double var = (data.x.col(s).array() - mean).square().sum() / n;
    var = std::max(var, 1e-12);
    theta[layout.beta_diag(s)] = 1.0 / var;
    theta[layout.alpha(s)] = mean / var;
  }
  for (int r = 0; r < schema.q; ++r) {
    const int lr = schema.level_count(r);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(lr);
    for (int i = 0; i < n; ++i) counts[data.y(i, r)] += 1.0;
    counts = counts.cwiseMax(0.5);  // keep logits finite on unobserved levels
    Eigen::VectorXd logp = (counts / counts.sum()).array().log();
    logp.array() -= logp.mean();
    theta.segment(layout.phi_diag_begin(r), lr) = logp;
  }
  return theta;
}

double lambda_max(const SmoothObjective& objective, const std::vector<EdgeGroup>& groups,
                  const Eigen::VectorXd& weights, const Eigen::VectorXd& theta0) {
  const Eigen::VectorXd grad = objective.gradient(theta0);
  double best = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    best = std::max(best, group_norm(grad, groups[g]) / weights[static_cast<Eigen::Index>(g)]);
  return best;
}

double lambda_max(const Dataset& data, const ParamLayout& layout, const Eigen::VectorXd& weights) {
  PLObjective objective(data, std::make_shared<ParamLayout>(layout));
  return lambda_max(objective, layout.groups(), weights, node_only_fit(data, layout));
}

}  // namespace mgl
