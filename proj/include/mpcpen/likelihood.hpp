#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpcpen/mendelian.hpp"
#include "mpcpen/nhpp.hpp"
#include "mpcpen/pedigree.hpp"

namespace mpcpen {

struct AscertainmentConfig {
  double psi_A = 0.0006;
  bool correction_enabled = true;
};

/// What to do with onsets after the second one.
///   Truncate: follow-up ends at the second onset (history capped at two events).
///   KeepSaturated: every onset is used and D stays 1 after the first.
enum class EventPolicy { Truncate, KeepSaturated };

std::string_view to_string(EventPolicy p);
EventPolicy parse_event_policy(std::string_view name);

struct ModelOptions {
  AscertainmentConfig ascertainment;
  EventPolicy event_policy = EventPolicy::Truncate;
};

/// Carrier probability in the general population, 1 - (1 - psi_A)^2.
double carrier_prevalence(double psi_A);

/// NHPP log-likelihood of one member's history given carrier status g and
/// family frailty xi. Ages are normalized by t_max internally.
double individual_loglik(const Individual& ind, int g, double xi, const ModelParams& p,
                         double t_max, EventPolicy policy = EventPolicy::Truncate);

/// log Pr(A = 1): the proband's first-onset density, marginalized over carrier
/// status with population prevalence. Throws if the proband has no onset.
double ascertainment_logprob(const Individual& proband, double xi, const ModelParams& p,
                             const AscertainmentConfig& cfg, double t_max);

/// log of the ascertainment-corrected familywise likelihood.
double family_loglik_acj(const Family& f, double xi, const ModelParams& p, const ModelOptions& opt,
                         double t_max);

/// Sum over families. `frailties` empty means xi = 1 for every family.
double total_loglik(const FamilySet& fs, std::span<const double> frailties, const ModelParams& p,
                    const ModelOptions& opt);

/// Family likelihood with everything that does not depend on the parameters
/// (normalized times, Bernstein basis values, covariate patterns, the
/// peeling plan and log Pr(g_obs)) computed once. Read-only after
/// construction, so a single instance may be evaluated from several threads.
class FamilyLikelihood {
 public:
  FamilyLikelihood(const Family& f, double t_max, CovariateSet set, int degree,
                   const ModelOptions& opt);

  const std::string& family_id() const { return family_id_; }
  std::size_t size() const { return members_.size(); }

  /// Same value as family_loglik_acj.
  double loglik(double xi, const ModelParams& p) const;
  /// log Pr(h | g_obs), without the ascertainment term.
  double conditional(double xi, const ModelParams& p) const;
  /// Same value as ascertainment_logprob for this family's proband.
  double ascertainment(double xi, const ModelParams& p) const;
  /// Per-member log-likelihood given carrier status 0 and 1.
  void member_logliks(double xi, const ModelParams& p, std::vector<std::array<double, 2>>& out) const;

 private:
  struct Piece {
    int d;
    std::vector<double> dcdf;  // F(hi) - F(lo) per basis function
  };
  struct Event {
    int d;
    std::vector<double> density;  // f(t_k) per basis function
  };
  struct Member {
    int sex;
    std::vector<Event> events;
    std::vector<Piece> pieces;
  };

  std::string family_id_;
  CovariateSet set_;
  int degree_;
  ModelOptions opt_;
  std::vector<Member> members_;
  std::vector<GenotypeObs> observed_;
  PeelingPlan plan_;
  GenotypeDist prior_;
  double log_marginal_;  // log Pr(g_obs)
  int proband_sex_ = 0;
  std::vector<double> proband_density_, proband_cdf_;
};

/// All families of a data set, prepared for repeated evaluation.
class DatasetLikelihood {
 public:
  DatasetLikelihood(const FamilySet& fs, CovariateSet set, int degree, const ModelOptions& opt);

  std::size_t size() const { return families_.size(); }
  const FamilyLikelihood& family(std::size_t i) const { return families_[i]; }

  /// Fills per-family values and returns their sum. `frailties` empty means
  /// xi = 1. With workers > 1 families are evaluated concurrently; the sum is
  /// always accumulated in family order.
  double evaluate(std::span<const double> frailties, const ModelParams& p,
                  std::vector<double>& per_family, int workers = 1) const;
  double total(std::span<const double> frailties, const ModelParams& p, int workers = 1) const;

 private:
  std::vector<FamilyLikelihood> families_;
};

}  // namespace mpcpen
