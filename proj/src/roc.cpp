#include "mpcpen/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mpcpen {

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::size_t P = 0, N = 0;
  for (int l : labels) {
    if (l == 1) ++P;
    else if (l == 0) ++N;
    else throw std::invalid_argument("labels must be 0 or 1");
  }
  if (P == 0 || N == 0) throw std::invalid_argument("ROC needs at least one positive and one negative");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  c.fpr.push_back(0.0);
  c.tpr.push_back(0.0);
  c.thresholds.push_back(std::numeric_limits<double>::infinity());
  // twice the area in units of one positive-negative pair
  std::size_t tp = 0, fp = 0, twice_area = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    std::size_t dtp = 0, dfp = 0;
    for (; i < order.size() && scores[order[i]] == thr; ++i) (labels[order[i]] ? dtp : dfp)++;
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    c.fpr.push_back(double(fp) / double(N));
    c.tpr.push_back(double(tp) / double(P));
    c.thresholds.push_back(thr);
  }
  c.auc = double(twice_area) / (2.0 * double(P) * double(N));
  return c;
}

}  // namespace mpcpen
