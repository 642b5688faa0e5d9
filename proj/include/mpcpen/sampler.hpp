#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mpcpen/likelihood.hpp"

namespace mpcpen {

using Rng = std::mt19937_64;

struct PriorConfig {
  double beta_sd = 100.0;
  double gamma_shape = 0.01, gamma_rate = 0.01;
  double phi_shape = 0.01, phi_rate = 0.01;

  void check() const;
};

/// Random-walk scales: additive normal sd for beta, log-scale sd for the
/// positive parameters.
struct StepSizes {
  double beta = 0.1;
  double log_gamma = 0.3;
  double log_phi = 0.3;
  double log_xi = 0.3;
};

struct ChainConfig {
  long iterations = 100000;
  long burn_in = 5000;
  long thinning = 1;
  StepSizes steps;
  std::uint64_t seed = 1;
  bool frailty_mode = true;
  int workers = 1;  // concurrent family evaluations per likelihood call

  void check() const;
  /// floor((iterations - burn_in) / thinning)
  std::size_t retained() const;
};

struct BlockAcceptance {
  std::string block;
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;

  double rate() const { return proposed ? double(accepted) / double(proposed) : 0.0; }
};

/// Retained draws stored row-major (one row per draw).
struct PosteriorSamples {
  CovariateSet covariate_set = CovariateSet::M4;
  int degree = 5;
  bool frailty_mode = true;
  double t_max = 100.0;
  std::vector<std::string> family_ids;  // xi column order

  std::vector<long> iteration;
  std::vector<double> beta;    // size() * n_beta()
  std::vector<double> gamma;   // size() * degree
  std::vector<double> phi;     // size() when frailty_mode
  std::vector<double> xi;      // size() * family_ids.size() when frailty_mode
  std::vector<double> loglik;  // total log-likelihood per draw
  std::vector<BlockAcceptance> acceptance;

  std::size_t size() const { return iteration.size(); }
  std::size_t n_beta() const { return covariates_of(covariate_set).size(); }
  std::size_t n_families() const { return family_ids.size(); }

  ModelParams params_at(std::size_t draw) const;
  std::span<const double> xi_at(std::size_t draw) const;
  /// Posterior draws of one named quantity: beta_<cov>, gamma_<m>, phi, xi_<family>, loglik.
  std::vector<double> column(const std::string& name) const;
  std::vector<std::string> column_names() const;
};

/// log N(beta; 0, sd^2) + log Gamma(gamma_m) [+ log Gamma(phi) with frailty].
/// Bernstein weights at 0 are evaluated at the smallest positive double.
double log_prior(const ModelParams& p, const PriorConfig& cfg, bool frailty_mode);

/// Hastings correction of a log-normal random walk: proposed / old.
double lognormal_adjustment(double old_value, double proposed);

/// Unnormalized log posterior of the frailty precision given the frailties.
double phi_log_posterior(double phi, std::span<const double> frailties, const PriorConfig& cfg);

/// log Gamma(shape, rate) density.
double gamma_log_density(double x, double shape, double rate);

enum class Proposal { Gaussian, LogNormal };

struct MhResult {
  double value;
  double log_target;
  bool accepted;
};

/// Accepts with probability min(1, exp(log_ratio)). Always consumes one
/// uniform draw so the stream position does not depend on the outcome.
bool mh_accept(double log_ratio, Rng& rng);

/// One random-walk Metropolis-Hastings update of a scalar. `log_target` is
/// evaluated once at the proposal; -inf or NaN proposals are rejected.
MhResult mh_step(double current, double log_target_current, Proposal kind, double step,
                 const std::function<double(double)>& log_target, Rng& rng);

/// Optional per-iteration hook (iteration number, 1-based).
using ProgressFn = std::function<void(long)>;

/// MH-within-Gibbs: each beta coordinate, each gamma_m, then each xi_i and
/// phi when frailty_mode. Deterministic given cfg.seed and independent of
/// cfg.workers.
PosteriorSamples run_chain(const DatasetLikelihood& data, const std::vector<std::string>& family_ids,
                           double t_max, CovariateSet set, int degree, const ChainConfig& cfg,
                           const PriorConfig& prior, const ProgressFn& progress = {});

/// Validates every family, prepares the likelihood and runs the chain.
PosteriorSamples run_chain(const FamilySet& fs, CovariateSet set, int degree,
                           const ChainConfig& cfg, const PriorConfig& prior,
                           const ModelOptions& opt, const ProgressFn& progress = {});

struct DicResult {
  double mean_deviance;
  double deviance_at_mean;
  double p_d;
  double dic;
};

/// DIC = mean deviance + p_D, p_D = mean deviance - deviance at the posterior
/// means of beta, gamma and (with frailty) xi.
DicResult dic(const PosteriorSamples& samples, const DatasetLikelihood& data);
DicResult dic(const PosteriorSamples& samples, const FamilySet& fs, const ModelOptions& opt);

}  // namespace mpcpen
