#include "mpcpen/sampler.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mpcpen {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_log_density(double x, double sd) {
  return -0.5 * (x / sd) * (x / sd) - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

void PriorConfig::check() const {
  if (!(beta_sd > 0 && gamma_shape > 0 && gamma_rate > 0 && phi_shape > 0 && phi_rate > 0))
    throw std::invalid_argument("prior hyperparameters must be positive");
}

void ChainConfig::check() const {
  if (iterations <= 0) throw std::invalid_argument("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("burn_in must be in [0, iterations)");
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (!(steps.beta > 0 && steps.log_gamma > 0 && steps.log_phi > 0 && steps.log_xi > 0))
    throw std::invalid_argument("proposal step sizes must be positive");
}

std::size_t ChainConfig::retained() const {
  return static_cast<std::size_t>((iterations - burn_in) / thinning);
}

ModelParams PosteriorSamples::params_at(std::size_t d) const {
  ModelParams p;
  p.covariate_set = covariate_set;
  const std::size_t P = n_beta(), M = static_cast<std::size_t>(degree);
  p.beta.assign(beta.begin() + d * P, beta.begin() + (d + 1) * P);
  p.gamma.assign(gamma.begin() + d * M, gamma.begin() + (d + 1) * M);
  p.phi = frailty_mode ? phi[d] : 1.0;
  return p;
}

std::span<const double> PosteriorSamples::xi_at(std::size_t d) const {
  if (!frailty_mode) return {};
  const std::size_t I = family_ids.size();
  return std::span<const double>(xi).subspan(d * I, I);
}

std::vector<std::string> PosteriorSamples::column_names() const {
  std::vector<std::string> names;
  for (auto c : covariates_of(covariate_set)) names.push_back("beta_" + std::string(covariate_name(c)));
  for (int m = 1; m <= degree; ++m) names.push_back("gamma_" + std::to_string(m));
  if (frailty_mode) {
    names.push_back("phi");
    for (const auto& id : family_ids) names.push_back("xi_" + id);
  }
  names.push_back("loglik");
  return names;
}

std::vector<double> PosteriorSamples::column(const std::string& name) const {
  const std::size_t n = size();
  std::vector<double> out(n);
  auto strided = [&](const std::vector<double>& v, std::size_t width, std::size_t j) {
    for (std::size_t d = 0; d < n; ++d) out[d] = v[d * width + j];
    return out;
  };
  auto cov = covariates_of(covariate_set);
  for (std::size_t j = 0; j < cov.size(); ++j)
    if (name == "beta_" + std::string(covariate_name(cov[j]))) return strided(beta, cov.size(), j);
  for (int m = 1; m <= degree; ++m)
    if (name == "gamma_" + std::to_string(m))
      return strided(gamma, static_cast<std::size_t>(degree), static_cast<std::size_t>(m - 1));
  if (name == "loglik") return loglik;
  if (frailty_mode) {
    if (name == "phi") return phi;
    for (std::size_t i = 0; i < family_ids.size(); ++i)
      if (name == "xi_" + family_ids[i]) return strided(xi, family_ids.size(), i);
  }
  throw std::invalid_argument("no posterior column named '" + name + "'");
}

double gamma_log_density(double x, double shape, double rate) {
  if (!(x > 0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_prior(const ModelParams& p, const PriorConfig& cfg, bool frailty_mode) {
  double lp = 0.0;
  for (double b : p.beta) lp += normal_log_density(b, cfg.beta_sd);
  for (double g : p.gamma) lp += gamma_log_density(std::max(g, DBL_MIN), cfg.gamma_shape, cfg.gamma_rate);
  if (frailty_mode) lp += gamma_log_density(p.phi, cfg.phi_shape, cfg.phi_rate);
  return lp;
}

double lognormal_adjustment(double old_value, double proposed) {
  if (!(old_value > 0) || !(proposed > 0))
    throw std::invalid_argument("log-normal adjustment needs positive values");
  return proposed / old_value;
}

double phi_log_posterior(double phi, std::span<const double> frailties, const PriorConfig& cfg) {
  if (!(phi > 0)) throw std::invalid_argument("phi must be positive");
  const double I = static_cast<double>(frailties.size());
  double sum_log = 0.0, sum_xi = 0.0;
  for (double x : frailties) {
    sum_log += std::log(x);
    sum_xi += x;
  }
  return (I * phi + cfg.phi_shape - 1.0) * std::log(phi) - cfg.phi_rate * phi +
         (phi - 1.0) * sum_log - phi * sum_xi - I * std::lgamma(phi);
}

bool mh_accept(double log_ratio, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (std::isnan(log_ratio)) return false;
  return std::log(u) < log_ratio;
}

MhResult mh_step(double current, double log_target_current, Proposal kind, double step,
                 const std::function<double(double)>& log_target, Rng& rng) {
  std::normal_distribution<double> z(0.0, step);
  const double e = z(rng);
  const double proposed = kind == Proposal::Gaussian ? current + e : current * std::exp(e);
  double lt = kNegInf;
  if (kind == Proposal::Gaussian || proposed > 0) lt = log_target(proposed);
  double log_ratio = lt - log_target_current;
  if (kind == Proposal::LogNormal && proposed > 0)
    log_ratio += std::log(lognormal_adjustment(current, proposed));
  if (lt == kNegInf) log_ratio = kNegInf;
  if (mh_accept(log_ratio, rng)) return {proposed, lt, true};
  return {current, log_target_current, false};
}

PosteriorSamples run_chain(const DatasetLikelihood& data, const std::vector<std::string>& family_ids,
                           double t_max, CovariateSet set, int degree, const ChainConfig& cfg,
                           const PriorConfig& prior, const ProgressFn& progress) {
  cfg.check();
  prior.check();
  if (family_ids.size() != data.size())
    throw std::invalid_argument("family id list does not match the data");
  const std::size_t I = data.size();
  const bool frailty = cfg.frailty_mode;

  ModelParams p = ModelParams::initial(set, degree);
  std::vector<double> xi(frailty ? I : 0, 1.0);
  std::vector<double> per_family, scratch;
  double total = data.evaluate(xi, p, per_family, cfg.workers);
  for (std::size_t i = 0; i < I; ++i)
    if (!std::isfinite(per_family[i]))
      throw std::runtime_error("initial log-likelihood is not finite for family " + family_ids[i]);

  PosteriorSamples out;
  out.covariate_set = set;
  out.degree = degree;
  out.frailty_mode = frailty;
  out.t_max = t_max;
  out.family_ids = family_ids;
  const std::size_t n_keep = cfg.retained();
  out.iteration.reserve(n_keep);
  out.beta.reserve(n_keep * p.beta.size());
  out.gamma.reserve(n_keep * p.gamma.size());
  out.loglik.reserve(n_keep);
  if (frailty) {
    out.phi.reserve(n_keep);
    out.xi.reserve(n_keep * I);
  }

  auto cov = covariates_of(set);
  for (auto c : cov) out.acceptance.push_back({"beta_" + std::string(covariate_name(c))});
  for (int m = 1; m <= degree; ++m) out.acceptance.push_back({"gamma_" + std::to_string(m)});
  const std::size_t xi_block = out.acceptance.size();
  if (frailty) {
    out.acceptance.push_back({"xi"});
    out.acceptance.push_back({"phi"});
  }

  Rng rng(cfg.seed);
  auto record = [&](std::size_t block, bool accepted, bool counting) {
    if (!counting) return;
    ++out.acceptance[block].proposed;
    out.acceptance[block].accepted += accepted ? 1 : 0;
  };

  for (long it = 1; it <= cfg.iterations; ++it) {
    const bool counting = it > cfg.burn_in;

    for (std::size_t j = 0; j < p.beta.size(); ++j) {
      const double lp_cur = normal_log_density(p.beta[j], prior.beta_sd);
      auto target = [&](double b) {
        ModelParams q = p;
        q.beta[j] = b;
        return data.evaluate(xi, q, scratch, cfg.workers) + normal_log_density(b, prior.beta_sd);
      };
      auto r = mh_step(p.beta[j], total + lp_cur, Proposal::Gaussian, cfg.steps.beta, target, rng);
      if (r.accepted) {
        p.beta[j] = r.value;
        per_family.swap(scratch);
        total = sum(per_family);
      }
      record(j, r.accepted, counting);
    }

    for (std::size_t m = 0; m < p.gamma.size(); ++m) {
      auto gprior = [&](double g) {
        return gamma_log_density(std::max(g, DBL_MIN), prior.gamma_shape, prior.gamma_rate);
      };
      auto target = [&](double g) {
        ModelParams q = p;
        q.gamma[m] = g;
        return data.evaluate(xi, q, scratch, cfg.workers) + gprior(g);
      };
      auto r = mh_step(p.gamma[m], total + gprior(p.gamma[m]), Proposal::LogNormal,
                       cfg.steps.log_gamma, target, rng);
      if (r.accepted) {
        p.gamma[m] = r.value;
        per_family.swap(scratch);
        total = sum(per_family);
      }
      record(cov.size() + m, r.accepted, counting);
    }

    if (frailty) {
      for (std::size_t i = 0; i < I; ++i) {
        const auto& fam = data.family(i);
        double new_fam = per_family[i];
        auto target = [&](double x) {
          new_fam = fam.loglik(x, p);
          return new_fam + gamma_log_density(x, p.phi, p.phi);
        };
        auto r = mh_step(xi[i], per_family[i] + gamma_log_density(xi[i], p.phi, p.phi),
                         Proposal::LogNormal, cfg.steps.log_xi, target, rng);
        if (r.accepted) {
          xi[i] = r.value;
          total += new_fam - per_family[i];
          per_family[i] = new_fam;
        }
        record(xi_block, r.accepted, counting);
      }
      auto target = [&](double f) { return phi_log_posterior(f, xi, prior); };
      auto r = mh_step(p.phi, target(p.phi), Proposal::LogNormal, cfg.steps.log_phi, target, rng);
      if (r.accepted) p.phi = r.value;
      record(xi_block + 1, r.accepted, counting);
    }

    if (counting && (it - cfg.burn_in) % cfg.thinning == 0) {
      // resum in family order so the stored value does not carry drift from
      // the incremental frailty updates
      total = sum(per_family);
      out.iteration.push_back(it);
      out.beta.insert(out.beta.end(), p.beta.begin(), p.beta.end());
      out.gamma.insert(out.gamma.end(), p.gamma.begin(), p.gamma.end());
      out.loglik.push_back(total);
      if (frailty) {
        out.phi.push_back(p.phi);
        out.xi.insert(out.xi.end(), xi.begin(), xi.end());
      }
    }
    if (progress) progress(it);
  }
  return out;
}

PosteriorSamples run_chain(const FamilySet& fs, CovariateSet set, int degree,
                           const ChainConfig& cfg, const PriorConfig& prior,
                           const ModelOptions& opt, const ProgressFn& progress) {
  std::ostringstream problems;
  std::vector<std::string> ids;
  for (const auto& f : fs.families) {
    ids.push_back(f.family_id);
    auto report = validate_family(f);
    for (const auto& v : report.violations)
      problems << "family " << f.family_id << ": " << v.message << "\n";
  }
  if (!problems.str().empty()) throw std::invalid_argument(problems.str());
  DatasetLikelihood data(fs, set, degree, opt);
  return run_chain(data, ids, fs.t_max, set, degree, cfg, prior, progress);
}

DicResult dic(const PosteriorSamples& s, const DatasetLikelihood& data) {
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("DIC needs at least one posterior draw");
  if (s.loglik.size() != n) throw std::invalid_argument("posterior draws lack log-likelihood values");
  double mean_dev = 0.0;
  for (double l : s.loglik) mean_dev += -2.0 * l;
  mean_dev /= static_cast<double>(n);

  ModelParams mean = s.params_at(0);
  std::fill(mean.beta.begin(), mean.beta.end(), 0.0);
  std::fill(mean.gamma.begin(), mean.gamma.end(), 0.0);
  std::vector<double> xi_mean(s.frailty_mode ? s.n_families() : 0, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    ModelParams p = s.params_at(d);
    for (std::size_t j = 0; j < mean.beta.size(); ++j) mean.beta[j] += p.beta[j];
    for (std::size_t m = 0; m < mean.gamma.size(); ++m) mean.gamma[m] += p.gamma[m];
    auto x = s.xi_at(d);
    for (std::size_t i = 0; i < xi_mean.size(); ++i) xi_mean[i] += x[i];
  }
  for (double& v : mean.beta) v /= double(n);
  for (double& v : mean.gamma) v /= double(n);
  for (double& v : xi_mean) v /= double(n);
  const double dev_mean = -2.0 * data.total(xi_mean, mean);
  const double p_d = mean_dev - dev_mean;
  return {mean_dev, dev_mean, p_d, mean_dev + p_d};
}

DicResult dic(const PosteriorSamples& s, const FamilySet& fs, const ModelOptions& opt) {
  if (s.frailty_mode) {
    if (s.n_families() != fs.families.size())
      throw std::invalid_argument("posterior frailty columns do not match the pedigree families");
    for (std::size_t i = 0; i < fs.families.size(); ++i)
      if (s.family_ids[i] != fs.families[i].family_id)
        throw std::invalid_argument("posterior frailty column order does not match family " +
                                    fs.families[i].family_id);
  }
  DatasetLikelihood data(fs, s.covariate_set, s.degree, opt);
  return dic(s, data);
}

}  // namespace mpcpen
