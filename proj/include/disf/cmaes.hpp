#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "disf/errors.hpp"

namespace disf {

struct CmaEsOptions {
  int population = 16;
  int generations = 200;
  double sigma0 = 0.05;
  std::uint64_t seed = 1;
  // Box bounds; empty means unbounded. Candidates are clipped before
  // evaluation, the strategy itself sees the raw samples.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void validate(Eigen::Index dim) const {
    if (population < 4) throw InvalidInput("CMA-ES population must be >= 4");
    if (generations < 1) throw InvalidInput("CMA-ES generations must be >= 1");
    if (!(sigma0 > 0.0)) throw InvalidInput("CMA-ES sigma0 must be positive");
    if (lower.size() != upper.size() ||
        (lower.size() != 0 && lower.size() != dim))
      throw InvalidInput("CMA-ES bounds do not match the dimension");
    if (lower.size() != 0 &&
        (!lower.allFinite() || !upper.allFinite() ||
         (upper.array() < lower.array()).any()))
      throw InvalidInput("CMA-ES bounds must be finite with lower <= upper");
  }
};

struct CmaEsResult {
  Eigen::VectorXd best;
  double best_fitness = std::numeric_limits<double>::infinity();
  // Best-ever fitness after each generation.
  std::vector<double> history;
  int evaluations = 0;
};

using Fitness = std::function<double(const Eigen::VectorXd&)>;

// Called after every generation with (generation, best-ever point, fitness).
using GenerationCallback =
    std::function<void(int, const Eigen::VectorXd&, double)>;

// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one
// plus rank-mu covariance updates. Deterministic for a given seed. Fitness
// values that are NaN are treated as +inf.
inline CmaEsResult cmaes_minimize(const Fitness& fitness,
                                  const Eigen::VectorXd& x0,
                                  const CmaEsOptions& opt,
                                  const GenerationCallback& on_generation = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Eigen::Index n = x0.size();
  if (n < 1) throw InvalidInput("CMA-ES needs at least one dimension");
  opt.validate(n);
  const bool bounded = opt.lower.size() == n;
  auto clip = [&](const VectorXd& x) -> VectorXd {
    return bounded ? VectorXd(x.cwiseMax(opt.lower).cwiseMin(opt.upper)) : x;
  };

  const int lambda = opt.population;
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i)
    weights(i) = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double dn = static_cast<double>(n);
  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu = std::min(
      1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
  const double damps =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n =
      std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  VectorXd mean = x0;
  double sigma = opt.sigma0;
  MatrixXd cov = MatrixXd::Identity(n, n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  VectorXd scale = VectorXd::Ones(n);
  VectorXd pc = VectorXd::Zero(n);
  VectorXd ps = VectorXd::Zero(n);

  CmaEsResult result;
  auto evaluate = [&](const VectorXd& x) {
    double f = fitness(x);
    ++result.evaluations;
    if (std::isnan(f)) f = std::numeric_limits<double>::infinity();
    if (result.best.size() == 0 || f < result.best_fitness) {
      result.best = x;
      result.best_fitness = f;
    }
    return f;
  };

  std::vector<VectorXd> samples(lambda, VectorXd(n));
  std::vector<VectorXd> steps(lambda, VectorXd(n));
  std::vector<double> values(lambda);
  std::vector<int> order(lambda);

  for (int gen = 0; gen < opt.generations; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      VectorXd z(n);
      for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
      steps[k] = basis * scale.cwiseProduct(z);
      samples[k] = mean + sigma * steps[k];
      values[k] = evaluate(clip(samples[k]));
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });

    VectorXd y_w = VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights(i) * steps[order[i]];
    mean += sigma * y_w;

    // C^{-1/2} y_w = B D^{-1} B^T y_w
    const VectorXd c_inv_sqrt_y =
        basis * (basis.transpose() * y_w).cwiseQuotient(scale);
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * c_inv_sqrt_y;
    const double ps_norm = ps.norm();
    const bool hsig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) / chi_n <
        1.4 + 2.0 / (dn + 1.0);
    pc = (1.0 - cc) * pc +
         (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i)
      rank_mu += weights(i) * steps[order[i]] * steps[order[i]].transpose();
    const double hsig_correction = hsig ? 0.0 : cc * (2.0 - cc);
    cov = (1.0 - c1 - cmu) * cov +
          c1 * (pc * pc.transpose() + hsig_correction * cov) + cmu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    basis = eig.eigenvectors();
    scale = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

    result.history.push_back(result.best_fitness);
    if (on_generation) on_generation(gen + 1, result.best, result.best_fitness);
  }
  return result;
}

}  // namespace disf
