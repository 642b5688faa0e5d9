#pragma once

#include <span>
#include <vector>

#include "mpcpen/pedigree.hpp"

namespace mpcpen {

/// Product-limit estimate with Greenwood variance at each distinct event
/// time. The step function is right-continuous: at(t) is the value after
/// the last event time <= t, 1 before the first one, and the final value
/// beyond the last one.
struct KaplanMeier {
  std::vector<double> time;
  std::vector<double> survival;
  std::vector<double> variance;
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;

  double at(double t) const;
  double variance_at(double t) const;
};

/// `events[i]` is 1 for an observed event, 0 for a censored time.
KaplanMeier km_estimator(std::span<const double> times, std::span<const int> events);

/// Observed first and second gap times of one subject.
struct GapPair {
  double x_tilde = 0.0, y_tilde = 0.0;
  int delta_x = 0, delta_y = 0;
};

struct KendallResult {
  double tau = 0.0;
  double se = 0.0;                  // delete-one-subject jackknife
  std::size_t orderable_pairs = 0;  // pairs entering the estimate
  std::size_t dropped_pairs = 0;    // orderable pairs with zero censoring weight
  std::size_t subjects = 0;
};

struct KendallPoint {
  double tau;
  std::size_t orderable_pairs, dropped_pairs;
};

/// Inverse-probability-of-censoring weighted Kendall's tau between the first
/// and second gap without the jackknife. Throws std::domain_error when no
/// pair is orderable.
KendallPoint ipcw_kendall_point(std::span<const GapPair> pairs);

/// Estimate plus jackknife standard error. Leave-one-out replicates without
/// any orderable pair are skipped.
KendallResult ipcw_kendall_tau(std::span<const GapPair> pairs, int workers = 1);

/// First/second gap of every member (probands skipped when requested):
/// affected members contribute (t1, 1, t2 - t1, 1) or (t1, 1, v - t1, 0);
/// unaffected members (v, 0, 0, 0).
std::vector<GapPair> gap_pairs(const FamilySet& fs, bool exclude_probands = true);

}  // namespace mpcpen
