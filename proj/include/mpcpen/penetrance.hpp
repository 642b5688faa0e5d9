#pragma once

#include <optional>
#include <vector>

#include "mpcpen/sampler.hpp"

namespace mpcpen {

/// Who is asking: carrier status, sex, number of prior cancers (0 or 1) and
/// the age of that cancer (the start age when k = 0). Ages in years.
struct PenetranceQuery {
  int g = 0;
  int s = 0;
  int k = 0;
  double t_k = 0.0;
  std::vector<double> w_grid;

  /// Throws std::invalid_argument when the query leaves [0, t_max].
  void check(double t_max) const;
};

/// 0, 1, ..., 50 years.
std::vector<double> default_w_grid();

/// 1 - (phi / (phi + cum))^phi with frailty, 1 - exp(-cum) without.
double penetrance_from_cumulative(double cum, double phi, bool frailty_mode);

/// Probability of the next cancer in [start, start + width] (years) for an
/// individual whose first cancer happened at t1 (infinity if none yet).
double window_penetrance(int g, int s, double t1, double start, double width,
                         const ModelParams& p, bool frailty_mode, double t_max);

/// Pr(W_{k+1} <= w | T_k = t_k, X).
double penetrance_point(const PenetranceQuery& q, double w, const ModelParams& p,
                        bool frailty_mode, double t_max);

struct PenetranceCurve {
  std::vector<double> w, median, lower, upper;
};

/// Pointwise posterior median and equal-tailed bounds over all draws.
PenetranceCurve penetrance_curve(const PenetranceQuery& q, const PosteriorSamples& s,
                                 double lower_prob = 0.025, double upper_prob = 0.975,
                                 int workers = 1);

enum class RiskScenario { AffectedVsUnaffected, SpcVsMpc };

/// Evaluation window for one individual, rolled back from the event or
/// censoring age.
struct RiskWindow {
  int label;       // 1 if the target event falls in the window
  int k;           // cancers before the window
  double t1;       // first-onset age conditioned on (infinity when k = 0)
  double start;    // years
  double width;    // years
};

/// std::nullopt when the individual is not part of the scenario or the
/// window is not fully observed (negatives need the whole horizon).
std::optional<RiskWindow> risk_window(const Individual& ind, RiskScenario sc, double t_max,
                                      double horizon = 5.0);

/// Posterior-median risk over the individual's window. Throws for probands,
/// missing genotypes and individuals without a usable window.
double five_year_risk(const Individual& ind, const PosteriorSamples& s, RiskScenario sc,
                      double horizon = 5.0);

}  // namespace mpcpen
