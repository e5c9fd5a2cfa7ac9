#include "mgl/sampler.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <stdexcept>

namespace mgl {

namespace {

// Cholesky of B; throws naming B on failure.
Eigen::LLT<Eigen::MatrixXd> factor_b(const Theta& theta) {
  const Eigen::MatrixXd b = theta.beta_matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (theta.schema().p > 0 && llt.info() != Eigen::Success)
    throw std::runtime_error("B (continuous-continuous block) is not positive definite");
  return llt;
}

Eigen::VectorXd gamma_of(const Theta& theta, const Eigen::VectorXi& y) {
  const Schema& schema = theta.schema();
  Eigen::VectorXd gamma(schema.p);
  for (int s = 0; s < schema.p; ++s) {
    double g = theta.alpha(s);
    for (int j = 0; j < schema.q; ++j) g += theta.rho(s, j)[y[j]];
    gamma[s] = g;
  }
  return gamma;
}

double phi_energy(const Theta& theta, const Eigen::VectorXi& y) {
  const Schema& schema = theta.schema();
  double e = 0.0;
  for (int r = 0; r < schema.q; ++r) {
    e += theta.phi_diag(r)[y[r]];
    for (int j = r + 1; j < schema.q; ++j) e += theta.phi(r, y[r], j, y[j]);
  }
  return e;
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ULL); }

}  // namespace

void DiscreteMarginal::state(std::uint64_t index, Eigen::VectorXi& y) const {
  y.resize(schema.q);
  for (int j = schema.q - 1; j >= 0; --j) {
    const auto lj = static_cast<std::uint64_t>(schema.level_count(j));
    y[j] = static_cast<int>(index % lj);
    index /= lj;
  }
}

std::uint64_t DiscreteMarginal::index_of(const Eigen::VectorXi& y) const {
  std::uint64_t index = 0;
  for (int j = 0; j < schema.q; ++j)
    index = index * static_cast<std::uint64_t>(schema.level_count(j)) +
            static_cast<std::uint64_t>(y[j]);
  return index;
}

double DiscreteMarginal::prob(std::uint64_t index) const {
  return std::exp(log_prob[static_cast<Eigen::Index>(index)]);
}

DiscreteMarginal discrete_marginal_exact(const Theta& theta, std::uint64_t cap) {
  const Schema& schema = theta.schema();
  const auto count = schema.discrete_state_count();
  if (!count || *count > cap)
    throw std::runtime_error(
        "discrete state space exceeds the enumeration cap; use gibbs_discrete");
  const auto llt = factor_b(theta);

  DiscreteMarginal marginal;
  marginal.schema = schema;
  marginal.log_prob.resize(static_cast<Eigen::Index>(*count));
  Eigen::VectorXi y;
  for (std::uint64_t idx = 0; idx < *count; ++idx) {
    marginal.state(idx, y);
    double e = phi_energy(theta, y);
    if (schema.p > 0) {
      const Eigen::VectorXd gamma = gamma_of(theta, y);
      e += 0.5 * gamma.dot(llt.solve(gamma));
    }
    marginal.log_prob[static_cast<Eigen::Index>(idx)] = e;
  }
  const double m = marginal.log_prob.maxCoeff();
  marginal.log_norm = m + std::log((marginal.log_prob.array() - m).exp().sum());
  marginal.log_prob.array() -= marginal.log_norm;
  return marginal;
}

Eigen::MatrixXi gibbs_discrete(const Theta& theta, int n, int burn_in, int thin,
                               std::uint64_t seed) {
  const Schema& schema = theta.schema();
  const int p = schema.p;
  const int q = schema.q;
  if (q == 0) throw std::invalid_argument("gibbs_discrete: model has no discrete variables");
  const auto llt = factor_b(theta);
  Eigen::MatrixXd w(p, p);
  if (p > 0) w = llt.solve(Eigen::MatrixXd::Identity(p, p));

  // Per-level quadratic terms 1/2 rho_l^T W rho_l, fixed given theta.
  std::vector<Eigen::VectorXd> rho_quad(static_cast<std::size_t>(q));
  std::vector<std::vector<Eigen::VectorXd>> w_rho(static_cast<std::size_t>(q));
  for (int r = 0; r < q; ++r) {
    const int lr = schema.level_count(r);
    rho_quad[static_cast<std::size_t>(r)].resize(lr);
    w_rho[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(lr));
    for (int l = 0; l < lr; ++l) {
      Eigen::VectorXd rho_l(p);
      for (int s = 0; s < p; ++s) rho_l[s] = theta.rho(s, r)[l];
      const Eigen::VectorXd wr = p > 0 ? Eigen::VectorXd(w * rho_l) : Eigen::VectorXd(0);
      w_rho[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] = wr;
      rho_quad[static_cast<std::size_t>(r)][l] = p > 0 ? 0.5 * rho_l.dot(wr) : 0.0;
    }
  }

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // init each site from its node potential
  Eigen::VectorXi y(q);
  for (int r = 0; r < q; ++r) {
    const Eigen::VectorXd logits = theta.phi_diag(r);
    Eigen::VectorXd probs = (logits.array() - logits.maxCoeff()).exp();
    probs /= probs.sum();
    double u = unif(rng), acc = 0.0;
    y[r] = schema.level_count(r) - 1;
    for (int l = 0; l < schema.level_count(r); ++l) {
      acc += probs[l];
      if (u <= acc) { y[r] = l; break; }
    }
  }

  Eigen::VectorXd gamma = p > 0 ? gamma_of(theta, y) : Eigen::VectorXd(0);

  auto sweep = [&]() {
    for (int r = 0; r < q; ++r) {
      const int lr = schema.level_count(r);
      // remove site r's contribution from gamma
      if (p > 0)
        for (int s = 0; s < p; ++s) gamma[s] -= theta.rho(s, r)[y[r]];
      Eigen::VectorXd wg(p);
      if (p > 0) wg = w * gamma;
      Eigen::VectorXd energy(lr);
      for (int l = 0; l < lr; ++l) {
        double e = theta.phi_diag(r)[l];
        for (int j = 0; j < q; ++j)
          if (j != r) e += theta.phi(r, l, j, y[j]);
        if (p > 0) {
          // 1/2 (gamma + rho_l)^T W (gamma + rho_l) minus the constant term
          Eigen::VectorXd rho_l(p);
          for (int s = 0; s < p; ++s) rho_l[s] = theta.rho(s, r)[l];
          e += rho_l.dot(wg) + rho_quad[static_cast<std::size_t>(r)][l];
        }
        energy[l] = e;
      }
      Eigen::VectorXd probs = (energy.array() - energy.maxCoeff()).exp();
      probs /= probs.sum();
      double u = unif(rng), acc = 0.0;
      int pick = lr - 1;
      for (int l = 0; l < lr; ++l) {
        acc += probs[l];
        if (u <= acc) { pick = l; break; }
      }
      y[r] = pick;
      if (p > 0)
        for (int s = 0; s < p; ++s) gamma[s] += theta.rho(s, r)[pick];
    }
  };

  for (int b = 0; b < burn_in; ++b) sweep();
  Eigen::MatrixXi samples(n, q);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < thin; ++t) sweep();
    samples.row(i) = y;
  }
  return samples;
}

Dataset sample_joint(const Theta& theta, int n, std::uint64_t seed, const SampleOptions& options) {
  const Schema& schema = theta.schema();
  const auto llt = factor_b(theta);

  Eigen::MatrixXi y(n, schema.q);
  const auto count = schema.discrete_state_count();
  if (schema.q > 0) {
    if (count && *count <= options.enumeration_cap) {
      const DiscreteMarginal marginal = discrete_marginal_exact(theta, options.enumeration_cap);
      Eigen::VectorXd cdf(marginal.log_prob.size());
      double acc = 0.0;
      for (Eigen::Index k = 0; k < cdf.size(); ++k) {
        acc += std::exp(marginal.log_prob[k]);
        cdf[k] = acc;
      }
      auto rng = make_rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Eigen::VectorXi state;
      for (int i = 0; i < n; ++i) {
        const double u = unif(rng) * acc;
        Eigen::Index lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
          const Eigen::Index mid = (lo + hi) / 2;
          if (cdf[mid] < u) lo = mid + 1; else hi = mid;
        }
        marginal.state(static_cast<std::uint64_t>(lo), state);
        y.row(i) = state;
      }
    } else {
      y = gibbs_discrete(theta, n, options.gibbs_burn_in, options.gibbs_thin, seed);
    }
  }

  Eigen::MatrixXd x(n, schema.p);
  if (schema.p > 0) {
    auto rng = make_rng(seed * 0x100000001b3ULL + 17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXi yi(schema.q);
    Eigen::VectorXd z(schema.p);
    for (int i = 0; i < n; ++i) {
      yi = schema.q > 0 ? Eigen::VectorXi(y.row(i)) : Eigen::VectorXi(0);
      Eigen::VectorXd gamma(schema.p);
      for (int s = 0; s < schema.p; ++s) {
        double g = theta.alpha(s);
        for (int j = 0; j < schema.q; ++j) g += theta.rho(s, j)[yi[j]];
        gamma[s] = g;
      }
      const Eigen::VectorXd mu = llt.solve(gamma);
      for (int s = 0; s < schema.p; ++s) z[s] = gauss(rng);
      // x = mu + L^{-T} z has covariance B^{-1}
      x.row(i) = mu + llt.matrixU().solve(z);
    }
  }
  return Dataset(schema, std::move(x), std::move(y));
}

}  // namespace mgl
