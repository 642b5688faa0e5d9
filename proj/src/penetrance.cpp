#include "mpcpen/penetrance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpcpen/diagnostics.hpp"
#include "mpcpen/parallel.hpp"

namespace mpcpen {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PenetranceQuery::check(double t_max) const {
  if (g != 0 && g != 1) throw std::invalid_argument("g must be 0 or 1");
  if (s != 0 && s != 1) throw std::invalid_argument("sex must be 0 or 1");
  if (k != 0 && k != 1) throw std::invalid_argument("k must be 0 or 1");
  if (!(t_k >= 0.0)) throw std::invalid_argument("t_k must be nonnegative");
  for (std::size_t i = 0; i < w_grid.size(); ++i) {
    if (!(w_grid[i] >= 0.0)) throw std::invalid_argument("gap times must be nonnegative");
    if (i && w_grid[i] < w_grid[i - 1]) throw std::invalid_argument("gap times must be ascending");
  }
  if (!w_grid.empty() && t_k + w_grid.back() > t_max)
    throw std::invalid_argument("t_k + max(w) exceeds t_max");
}

std::vector<double> default_w_grid() {
  std::vector<double> w(51);
  for (int i = 0; i <= 50; ++i) w[i] = i;
  return w;
}

double penetrance_from_cumulative(double cum, double phi, bool frailty_mode) {
  if (cum <= 0.0) return 0.0;
  if (!frailty_mode) return -std::expm1(-cum);
  return -std::expm1(-phi * std::log1p(cum / phi));
}

double window_penetrance(int g, int s, double t1, double start, double width, const ModelParams& p,
                         bool frailty_mode, double t_max) {
  const double a = normalize_age(start, t_max);
  const double b = normalize_age(std::min(start + width, t_max), t_max);
  CovariateSchedule sched{g, s, std::isfinite(t1) ? normalize_age(t1, t_max) : kInf};
  const double cum = cumulative_intensity(a, b, sched, 1.0, p);
  return penetrance_from_cumulative(cum, p.phi, frailty_mode);
}

double penetrance_point(const PenetranceQuery& q, double w, const ModelParams& p, bool frailty_mode,
                        double t_max) {
  return window_penetrance(q.g, q.s, q.k >= 1 ? q.t_k : kInf, q.t_k, w, p, frailty_mode, t_max);
}

PenetranceCurve penetrance_curve(const PenetranceQuery& q, const PosteriorSamples& s,
                                 double lower_prob, double upper_prob, int workers) {
  if (s.size() == 0) throw std::invalid_argument("penetrance curve needs at least one posterior draw");
  q.check(s.t_max);
  PenetranceCurve c;
  c.w = q.w_grid;
  const std::size_t G = q.w_grid.size();
  c.median.resize(G);
  c.lower.resize(G);
  c.upper.resize(G);
  std::vector<ModelParams> draws;
  draws.reserve(s.size());
  for (std::size_t d = 0; d < s.size(); ++d) draws.push_back(s.params_at(d));
  parallel_for(G, workers, [&](std::size_t i) {
    std::vector<double> v(draws.size());
    for (std::size_t d = 0; d < draws.size(); ++d)
      v[d] = penetrance_point(q, q.w_grid[i], draws[d], s.frailty_mode, s.t_max);
    c.median[i] = median(v);
    c.lower[i] = quantile(v, lower_prob);
    c.upper[i] = quantile(v, upper_prob);
  });
  return c;
}

std::optional<RiskWindow> risk_window(const Individual& ind, RiskScenario sc, double t_max,
                                      double horizon) {
  const auto& t = ind.onset_ages;
  const double v = ind.censor_age;
  auto window = [&](int label, int k, double t1, double start) {
    return RiskWindow{label, k, t1, start, std::min(horizon, t_max - start)};
  };
  if (sc == RiskScenario::AffectedVsUnaffected) {
    if (!t.empty()) return window(1, 0, kInf, std::max(0.0, t[0] - horizon));
    if (v >= horizon) return window(0, 0, kInf, v - horizon);
    return std::nullopt;
  }
  if (t.empty()) return std::nullopt;
  if (t.size() >= 2) return window(1, 1, t[0], std::max(t[0], t[1] - horizon));
  if (v - horizon >= t[0]) return window(0, 1, t[0], v - horizon);
  return std::nullopt;
}

double five_year_risk(const Individual& ind, const PosteriorSamples& s, RiskScenario sc,
                      double horizon) {
  if (ind.is_proband) throw std::invalid_argument("risk scores are not defined for probands");
  if (ind.genotype == GenotypeObs::Missing)
    throw std::invalid_argument("risk score of " + ind.id + " needs an observed genotype");
  if (s.size() == 0) throw std::invalid_argument("risk score needs at least one posterior draw");
  auto w = risk_window(ind, sc, s.t_max, horizon);
  if (!w) throw std::invalid_argument("individual " + ind.id + " has no usable risk window");
  const int g = ind.genotype == GenotypeObs::Carrier ? 1 : 0;
  std::vector<double> v(s.size());
  for (std::size_t d = 0; d < s.size(); ++d)
    v[d] = window_penetrance(g, ind.sex, w->t1, w->start, w->width, s.params_at(d), s.frailty_mode,
                             s.t_max);
  return median(v);
}

}  // namespace mpcpen
