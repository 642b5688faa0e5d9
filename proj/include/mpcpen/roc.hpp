#pragma once

#include <span>
#include <vector>

namespace mpcpen {

/// Empirical ROC curve from a threshold sweep over the distinct scores,
/// starting at (0, 0) and ending at (1, 1). Tied scores move both rates in
/// one step, so the trapezoid AUC counts ties as one half.
struct RocCurve {
  std::vector<double> fpr, tpr, thresholds;  // thresholds[0] = +inf
  double auc = 0.0;
};

/// Throws std::invalid_argument unless both classes are present and the
/// inputs have equal length. Labels must be 0 or 1.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace mpcpen
