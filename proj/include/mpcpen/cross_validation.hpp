#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpcpen/penetrance.hpp"
#include "mpcpen/roc.hpp"

namespace mpcpen {

struct CvConfig {
  int folds = 10;
  int splits = 25;
  std::uint64_t seed = 1;
  CovariateSet covariate_set = CovariateSet::M4;
  int degree = 5;
  ChainConfig chain;  // chain.seed is combined with (split, fold)
  PriorConfig prior;
  ModelOptions model;
  double horizon = 5.0;
  int workers = 1;  // concurrent splits
};

struct ScenarioResult {
  std::vector<std::string> ids;  // "<family>/<individual>"
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t excluded = 0;  // genotyped non-probands without a usable window
  bool defined = false;      // both classes present
  RocCurve roc;
};

struct SplitResult {
  ScenarioResult affected;  // affected versus unaffected
  ScenarioResult mpc;       // single versus multiple primary cancers
};

struct CvResult {
  std::vector<SplitResult> splits;
  std::vector<std::string> warnings;
  double median_auc_affected = 0.0;  // NaN when no split is defined
  double median_auc_mpc = 0.0;
};

/// Family-level K-fold cross-validation repeated over random splits. Each
/// held-out genotyped non-proband is scored with the model fitted on the
/// other folds; scores are pooled over folds before computing the ROC.
/// Throws std::invalid_argument when folds exceed the number of families.
CvResult cross_validate(const FamilySet& fs, const CvConfig& cfg);

/// Fold index of each family for one split.
std::vector<int> assign_folds(std::size_t n_families, int folds, std::uint64_t seed, int split);

}  // namespace mpcpen
