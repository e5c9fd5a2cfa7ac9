#include "mgl/experiments.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "mgl/crf.hpp"
#include "mgl/mle.hpp"
#include "mgl/nodewise.hpp"
#include "mgl/penalty.hpp"
#include "mgl/pseudolikelihood.hpp"
#include "mgl/sampler.hpp"
#include "mgl/synthetic.hpp"

namespace mgl {

const char* estimator_name(Estimator estimator) {
  switch (estimator) {
    case Estimator::PL: return "pl";
    case Estimator::MLE: return "mle";
    case Estimator::Nodewise: return "nodewise";
    case Estimator::CRF: return "crf";
  }
  return "?";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "pl") return Estimator::PL;
  if (name == "mle") return Estimator::MLE;
  if (name == "nodewise") return Estimator::Nodewise;
  if (name == "crf") return Estimator::CRF;
  throw std::invalid_argument("unknown estimator: " + name);
}

double default_lambda(int var_count, int n) {
  if (var_count < 2 || n < 1) throw std::invalid_argument("default_lambda: need p+q >= 2, n >= 1");
  return 5.0 * std::sqrt(std::log(static_cast<double>(var_count)) / n);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 step on master + index
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<PhaseTransitionRow> phase_transition(const PhaseTransitionConfig& config) {
  const Theta truth = ladder_theta(config.size);
  auto layout = truth.layout_ptr();
  const std::vector<int> true_edges = ladder_edge_groups(*layout);
  const Theta init = Theta::independence(layout);

  std::vector<PhaseTransitionRow> rows;
  std::uint64_t trial_counter = 0;
  for (int n : config.sample_sizes) {
    const double lambda = default_lambda(layout->schema().var_count(), n);
    std::vector<int> hits(config.estimators.size(), 0);
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = derive_seed(config.seed, trial_counter++);
      const Dataset data = sample_joint(truth, n, seed);
      PenaltySpec spec;
      spec.lambda = lambda;
      if (config.calibrated) {
        spec.weights = calibrated_weights(data, *layout).weights;
        spec.calibrated = true;
      } else {
        spec.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(layout->groups().size()));
      }
      for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        FitResult fit;
        try {
          if (config.estimators[e] == Estimator::PL) {
            PLObjective objective(data, layout);
            fit = solve(objective, layout->groups(), spec, init.flat(), config.solver);
          } else if (config.estimators[e] == Estimator::MLE) {
            MleObjective objective(data, layout);
            fit = solve(objective, layout->groups(), spec, init.flat(), config.solver);
          } else {
            throw std::invalid_argument("phase_transition: only pl and mle estimators");
          }
        } catch (const SolverError&) {
          continue;  // failed fit counts as not recovered
        }
        if (fit.active_groups == true_edges) ++hits[e];
      }
    }
    for (std::size_t e = 0; e < config.estimators.size(); ++e)
      rows.push_back({config.estimators[e], n, config.trials,
                      static_cast<double>(hits[e]) / config.trials});
  }
  return rows;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void emit_eval(std::vector<CompareCell>& cells, Estimator estimator, double lambda,
               const Schema& schema, const Eigen::VectorXd& per_node, double nll_total) {
  double pl_total = 0.0;
  for (int v = 0; v < schema.var_count(); ++v) {
    cells.push_back({estimator, lambda, "node:" + schema.variable_name(v), per_node[v]});
    pl_total += per_node[v];
  }
  cells.push_back({estimator, lambda, "pl_total", pl_total});
  if (!std::isnan(nll_total)) cells.push_back({estimator, lambda, "nll_total", nll_total});
}

}  // namespace

std::vector<CompareCell> compare_estimators(const Dataset& train, const Dataset& holdout,
                                            const CompareConfig& config) {
  if (!(train.schema == holdout.schema))
    throw std::invalid_argument("compare: train and holdout schemas differ");
  auto layout = std::make_shared<ParamLayout>(train.schema);
  Eigen::VectorXd weights;
  if (config.calibrated)
    weights = calibrated_weights(train, *layout).weights;
  else
    weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(layout->groups().size()));

  std::vector<double> lambdas = config.lambdas;
  if (lambdas.empty()) {
    const double lmax = lambda_max(train, *layout, weights);
    lambdas.resize(static_cast<std::size_t>(config.grid.points));
    for (int i = 0; i < config.grid.points; ++i) {
      const double frac =
          config.grid.points == 1 ? 0.0 : static_cast<double>(i) / (config.grid.points - 1);
      lambdas[static_cast<std::size_t>(i)] = lmax * std::pow(config.grid.ratio, frac);
    }
  }

  const bool nll_ok =
      train.schema.discrete_state_count() && *train.schema.discrete_state_count() <= kMleEnumerationCap;
  const Theta init = Theta::independence(layout);
  PLObjective holdout_pl(holdout, layout);

  std::vector<CompareCell> cells;
  for (Estimator estimator : config.estimators) {
    if (estimator == Estimator::PL || estimator == Estimator::MLE) {
      if (estimator == Estimator::MLE && !nll_ok)
        throw std::runtime_error("compare: mle estimator refused above the enumeration cap");
      std::unique_ptr<SmoothObjective> objective;
      if (estimator == Estimator::PL)
        objective = std::make_unique<PLObjective>(train, layout);
      else
        objective = std::make_unique<MleObjective>(train, layout);
      const PathResult path = path_solve_grid(*objective, layout->groups(), weights, lambdas,
                                              init.flat(), config.solver);
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const FitResult& fit = path.fits[k];
        if (fit.failed) continue;
        const Eigen::VectorXd per_node = holdout_pl.per_node_values(fit.theta);
        double nll_total = kNaN;
        if (nll_ok) nll_total = nll(Theta(layout, fit.theta), holdout);
        emit_eval(cells, estimator, lambdas[k], train.schema, per_node, nll_total);
      }
    } else if (estimator == Estimator::Nodewise) {
      const NodewiseFit fits = fit_separate(train, *layout, lambdas, weights, config.solver);
      const Schema& schema = train.schema;
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        Eigen::VectorXd per_node(schema.var_count());
        for (int v = 0; v < schema.var_count(); ++v) {
          PLObjective::Options options;
          options.restrict_nodes = true;
          if (v < schema.p)
            options.cont_nodes = {v};
          else
            options.disc_nodes = {v - schema.p};
          PLObjective node_loss(holdout, layout, options);
          per_node[v] = node_loss.value(fits.per_node[static_cast<std::size_t>(v)].fits[k].theta);
        }
        emit_eval(cells, estimator, lambdas[k], schema, per_node, kNaN);
      }
    } else {  // CRF
      const FeatureSplit train_split = split_features(train, config.crf_feature_vars);
      const FeatureSplit holdout_split = split_features_as(holdout, train_split);
      auto crf_layout = std::make_shared<CrfLayout>(
          std::make_shared<ParamLayout>(train_split.modeled.schema),
          static_cast<int>(train_split.features.cols()));
      CrfObjective objective(train_split.modeled, train_split.features, crf_layout);
      CrfObjective holdout_objective(holdout_split.modeled, holdout_split.features, crf_layout);
      // base weights from the modeled block; feature groups get unit weight
      Eigen::VectorXd crf_weights =
          Eigen::VectorXd::Ones(static_cast<Eigen::Index>(crf_layout->groups().size()));
      if (config.calibrated) {
        const Eigen::VectorXd base =
            calibrated_weights(train_split.modeled, crf_layout->base()).weights;
        crf_weights.head(base.size()) = base;
      }
      const PathResult path =
          path_solve_grid(objective, crf_layout->groups(), crf_weights, lambdas,
                          crf_independence_init(*crf_layout), config.solver);
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const FitResult& fit = path.fits[k];
        if (fit.failed) continue;
        const Eigen::VectorXd per_node = holdout_objective.per_node_values(fit.theta);
        emit_eval(cells, estimator, lambdas[k], train_split.modeled.schema, per_node, kNaN);
      }
    }
  }
  return cells;
}

}  // namespace mgl
