#include "mpcpen/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpcpen {

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sequence");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::span<const double> x, double prob) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sequence");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double batch_means_mcse(std::span<const double> x, int batches) {
  const std::size_t n = x.size();
  if (n < 4) return 0.0;
  std::size_t b = batches > 0 ? static_cast<std::size_t>(batches)
                              : static_cast<std::size_t>(std::floor(std::sqrt(double(n))));
  b = std::clamp<std::size_t>(b, 2, n / 2);
  const std::size_t len = n / b;
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) means[k] = mean(x.subspan(k * len, len));
  return sample_sd(means) / std::sqrt(static_cast<double>(b));
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::span<const double>> halves;
  for (const auto& c : chains) {
    const std::size_t h = c.size() / 2;
    if (h < 2) throw std::invalid_argument("split R-hat needs at least 4 draws per chain");
    halves.emplace_back(c.data(), h);
    halves.emplace_back(c.data() + c.size() - h, h);
  }
  const std::size_t n = halves.front().size();
  for (auto& h : halves)
    if (h.size() != n) throw std::invalid_argument("chains must have equal length");
  std::vector<double> means, vars;
  for (auto h : halves) {
    means.push_back(mean(h));
    const double s = sample_sd(h);
    vars.push_back(s * s);
  }
  const double W = mean(vars);
  const double sd_means = sample_sd(means);
  const double B = static_cast<double>(n) * sd_means * sd_means;
  if (W == 0.0) return B == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (static_cast<double>(n) - 1.0) / static_cast<double>(n) * W + B / static_cast<double>(n);
  return std::sqrt(var_plus / W);
}

std::vector<ParameterSummary> summarize(const PosteriorSamples& s, bool include_xi) {
  std::vector<ParameterSummary> out;
  if (s.size() == 0) return out;
  for (const auto& name : s.column_names()) {
    if (!include_xi && name.rfind("xi_", 0) == 0) continue;
    auto col = s.column(name);
    double rhat = col.size() >= 4 ? split_rhat({col}) : 1.0;
    out.push_back({name, mean(col), sample_sd(col), quantile(col, 0.025), median(col),
                   quantile(col, 0.975), batch_means_mcse(col), rhat});
  }
  return out;
}

}  // namespace mpcpen
