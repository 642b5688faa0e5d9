#include "mpcpen/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpcpen/parallel.hpp"

namespace mpcpen {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Normalized onsets used for fitting and the end of follow-up.
struct History {
  std::vector<double> onsets;
  double end;
};

History fitted_history(const Individual& ind, double t_max, EventPolicy policy) {
  History h;
  for (double a : ind.onset_ages) h.onsets.push_back(normalize_age(a, t_max));
  h.end = normalize_age(ind.censor_age, t_max);
  if (policy == EventPolicy::Truncate && h.onsets.size() >= 2) {
    h.onsets.resize(2);
    h.end = h.onsets[1];
  }
  return h;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string_view to_string(EventPolicy p) {
  return p == EventPolicy::Truncate ? "truncate" : "keep-saturated";
}

EventPolicy parse_event_policy(std::string_view name) {
  if (name == "truncate") return EventPolicy::Truncate;
  if (name == "keep-saturated") return EventPolicy::KeepSaturated;
  throw std::invalid_argument("unknown event policy '" + std::string(name) + "'");
}

double carrier_prevalence(double psi_A) {
  auto prior = founder_prior(psi_A);
  return prior[1] + prior[2];
}

double individual_loglik(const Individual& ind, int g, double xi, const ModelParams& p,
                         double t_max, EventPolicy policy) {
  const History h = fitted_history(ind, t_max, policy);
  CovariateSchedule sched{g, ind.sex, h.onsets.empty() ? kInf : h.onsets.front()};
  double ll = 0.0;
  double prev = 0.0;
  for (double t : h.onsets) {
    ll += safe_log(intensity(t, sched, xi, p));
    ll -= cumulative_intensity(prev, t, sched, xi, p);
    prev = t;
  }
  ll -= cumulative_intensity(prev, h.end, sched, xi, p);
  return ll;
}

double ascertainment_logprob(const Individual& proband, double xi, const ModelParams& p,
                             const AscertainmentConfig& cfg, double t_max) {
  if (proband.onset_ages.empty())
    throw std::invalid_argument("ascertainment requires a proband with at least one onset");
  const double t1 = normalize_age(proband.onset_ages.front(), t_max);
  const double pc = carrier_prevalence(cfg.psi_A);
  double acc = kNegInf;
  for (int g = 0; g <= 1; ++g) {
    const double pg = g ? pc : 1.0 - pc;
    if (pg <= 0.0) continue;
    CovariateSchedule sched{g, proband.sex, t1};
    double term = std::log(pg) + safe_log(intensity(t1, sched, xi, p)) -
                  cumulative_intensity(0.0, t1, sched, xi, p);
    acc = log_sum_exp(acc, term);
  }
  return acc;
}

double family_loglik_acj(const Family& f, double xi, const ModelParams& p, const ModelOptions& opt,
                         double t_max) {
  std::vector<GenotypeLogLik> ll(f.members.size());
  for (std::size_t j = 0; j < f.members.size(); ++j) {
    double l0 = individual_loglik(f.members[j], 0, xi, p, t_max, opt.event_policy);
    double l1 = individual_loglik(f.members[j], 1, xi, p, t_max, opt.event_policy);
    ll[j] = {l0, l1, l1};
  }
  auto observed = observed_genotypes(f);
  double num = conditional_family_loglik(f, ll, observed, opt.ascertainment.psi_A);
  if (!opt.ascertainment.correction_enabled) return num;
  return num - ascertainment_logprob(f.proband(), xi, p, opt.ascertainment, t_max);
}

double total_loglik(const FamilySet& fs, std::span<const double> frailties, const ModelParams& p,
                    const ModelOptions& opt) {
  if (!frailties.empty() && frailties.size() != fs.families.size())
    throw std::invalid_argument("frailty vector length does not match family count");
  double total = 0.0;
  for (std::size_t i = 0; i < fs.families.size(); ++i)
    total += family_loglik_acj(fs.families[i], frailties.empty() ? 1.0 : frailties[i], p, opt,
                               fs.t_max);
  return total;
}

// ---------------------------------------------------------------------------

FamilyLikelihood::FamilyLikelihood(const Family& f, double t_max, CovariateSet set, int degree,
                                   const ModelOptions& opt)
    : family_id_(f.family_id),
      set_(set),
      degree_(degree),
      opt_(opt),
      observed_(observed_genotypes(f)),
      plan_(f),
      prior_(founder_prior(opt.ascertainment.psi_A)) {
  const auto M = static_cast<std::size_t>(degree);
  std::vector<double> dens(M), cdf(M), dens0(M), cdf0(M);
  bernstein_basis(0.0, degree, dens0, cdf0);

  members_.reserve(f.members.size());
  for (const auto& ind : f.members) {
    check_individual(ind, t_max);
    const History h = fitted_history(ind, t_max, opt.event_policy);
    Member m;
    m.sex = ind.sex;
    for (std::size_t k = 0; k < h.onsets.size(); ++k) {
      bernstein_basis(h.onsets[k], degree, dens, cdf);
      m.events.push_back({k == 0 ? 0 : 1, dens});
    }
    auto add_piece = [&](double lo, double hi, int d) {
      if (!(hi > lo)) return;
      std::vector<double> dlo(M), clo(M), dhi(M), chi(M);
      bernstein_basis(lo, degree, dlo, clo);
      bernstein_basis(hi, degree, dhi, chi);
      Piece pc{d, std::vector<double>(M)};
      for (std::size_t i = 0; i < M; ++i) pc.dcdf[i] = chi[i] - clo[i];
      m.pieces.push_back(std::move(pc));
    };
    if (h.onsets.empty()) {
      add_piece(0.0, h.end, 0);
    } else {
      add_piece(0.0, h.onsets.front(), 0);
      add_piece(h.onsets.front(), h.end, 1);
    }
    members_.push_back(std::move(m));
  }

  std::vector<GenotypeLogLik> flat(members_.size(), GenotypeLogLik{0.0, 0.0, 0.0});
  log_marginal_ = plan_.log_joint(flat, observed_, prior_);
  if (log_marginal_ == kNegInf)
    throw std::domain_error("observed genotypes of family " + family_id_ +
                            " are impossible under Mendelian inheritance");

  if (opt.ascertainment.correction_enabled) {
    const auto& pb = f.proband();
    if (pb.onset_ages.empty()) throw std::invalid_argument("proband of family " + family_id_ + " has no onset");
    proband_sex_ = pb.sex;
    proband_density_.resize(M);
    proband_cdf_.resize(M);
    bernstein_basis(normalize_age(pb.onset_ages.front(), t_max), degree, proband_density_, proband_cdf_);
  }
}

void FamilyLikelihood::member_logliks(double xi, const ModelParams& p,
                                      std::vector<std::array<double, 2>>& out) const {
  if (p.degree() != degree_ || p.covariate_set != set_)
    throw std::invalid_argument("parameters do not match the prepared model");
  const double log_xi = std::log(xi);
  // exp(eta) for (g, d)
  double eta[2][2], rel[2][2];
  for (int g = 0; g < 2; ++g)
    for (int d = 0; d < 2; ++d) {
      eta[g][d] = 0.0;
      rel[g][d] = 0.0;
    }
  out.resize(members_.size());
  for (std::size_t j = 0; j < members_.size(); ++j) {
    const Member& m = members_[j];
    for (int g = 0; g < 2; ++g)
      for (int d = 0; d < 2; ++d) {
        eta[g][d] = linear_predictor(p.beta, set_, g, m.sex, d);
        rel[g][d] = std::exp(eta[g][d]);
      }
    double l[2] = {0.0, 0.0};
    for (const Event& e : m.events) {
      double base = safe_log(dot(p.gamma, e.density)) + log_xi;
      l[0] += base + eta[0][e.d];
      l[1] += base + eta[1][e.d];
    }
    for (const Piece& pc : m.pieces) {
      double lam = xi * dot(p.gamma, pc.dcdf);
      l[0] -= rel[0][pc.d] * lam;
      l[1] -= rel[1][pc.d] * lam;
    }
    out[j] = {l[0], l[1]};
  }
}

double FamilyLikelihood::conditional(double xi, const ModelParams& p) const {
  thread_local std::vector<std::array<double, 2>> two;
  thread_local std::vector<GenotypeLogLik> three;
  member_logliks(xi, p, two);
  three.resize(two.size());
  for (std::size_t j = 0; j < two.size(); ++j) three[j] = {two[j][0], two[j][1], two[j][1]};
  return plan_.log_joint(three, observed_, prior_) - log_marginal_;
}

double FamilyLikelihood::ascertainment(double xi, const ModelParams& p) const {
  if (proband_density_.empty()) throw std::logic_error("ascertainment correction is disabled");
  const double pc = carrier_prevalence(opt_.ascertainment.psi_A);
  const double lam = xi * dot(p.gamma, proband_density_);
  const double cum = xi * dot(p.gamma, proband_cdf_);
  double acc = kNegInf;
  for (int g = 0; g <= 1; ++g) {
    const double pg = g ? pc : 1.0 - pc;
    if (pg <= 0.0) continue;
    const double eta = linear_predictor(p.beta, set_, g, proband_sex_, 0);
    acc = log_sum_exp(acc, std::log(pg) + safe_log(lam) + eta - std::exp(eta) * cum);
  }
  return acc;
}

double FamilyLikelihood::loglik(double xi, const ModelParams& p) const {
  double num = conditional(xi, p);
  if (!opt_.ascertainment.correction_enabled) return num;
  return num - ascertainment(xi, p);
}

DatasetLikelihood::DatasetLikelihood(const FamilySet& fs, CovariateSet set, int degree,
                                     const ModelOptions& opt) {
  families_.reserve(fs.families.size());
  for (const auto& f : fs.families) families_.emplace_back(f, fs.t_max, set, degree, opt);
}

double DatasetLikelihood::evaluate(std::span<const double> frailties, const ModelParams& p,
                                   std::vector<double>& per_family, int workers) const {
  if (!frailties.empty() && frailties.size() != families_.size())
    throw std::invalid_argument("frailty vector length does not match family count");
  per_family.resize(families_.size());
  parallel_for(families_.size(), workers, [&](std::size_t i) {
    per_family[i] = families_[i].loglik(frailties.empty() ? 1.0 : frailties[i], p);
  });
  double total = 0.0;
  for (double v : per_family) total += v;
  return total;
}

double DatasetLikelihood::total(std::span<const double> frailties, const ModelParams& p,
                                int workers) const {
  std::vector<double> per_family;
  return evaluate(frailties, p, per_family, workers);
}

}  // namespace mpcpen
