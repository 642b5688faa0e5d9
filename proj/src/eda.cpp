#include "mpcpen/eda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mpcpen/parallel.hpp"

namespace mpcpen {

namespace {

std::size_t step_index(const std::vector<double>& time, double t) {
  // number of event times <= t
  return static_cast<std::size_t>(std::upper_bound(time.begin(), time.end(), t) - time.begin());
}

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

double KaplanMeier::at(double t) const {
  const std::size_t k = step_index(time, t);
  return k == 0 ? 1.0 : survival[k - 1];
}

double KaplanMeier::variance_at(double t) const {
  const std::size_t k = step_index(time, t);
  return k == 0 ? 0.0 : variance[k - 1];
}

KaplanMeier km_estimator(std::span<const double> times, std::span<const int> events) {
  if (times.empty()) throw std::invalid_argument("Kaplan-Meier needs at least one observation");
  if (times.size() != events.size()) throw std::invalid_argument("times and events differ in length");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  for (double t : times)
    if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");

  KaplanMeier km;
  double s = 1.0, greenwood = 0.0;
  std::size_t at_risk = times.size();
  for (std::size_t i = 0; i < order.size();) {
    const double t = times[order[i]];
    std::size_t d = 0, n_here = 0;
    for (; i < order.size() && times[order[i]] == t; ++i, ++n_here) d += events[order[i]] ? 1 : 0;
    if (d > 0) {
      s *= 1.0 - double(d) / double(at_risk);
      if (at_risk > d) greenwood += double(d) / (double(at_risk) * double(at_risk - d));
      km.time.push_back(t);
      km.survival.push_back(s);
      km.variance.push_back(s > 0.0 ? s * s * greenwood : 0.0);
      km.at_risk.push_back(at_risk);
      km.events.push_back(d);
    }
    at_risk -= n_here;
  }
  return km;
}

KendallPoint ipcw_kendall_point(std::span<const GapPair> pairs) {
  const std::size_t n = pairs.size();
  std::vector<double> total(n);
  std::vector<int> censored(n);
  for (std::size_t i = 0; i < n; ++i) {
    total[i] = pairs[i].x_tilde + pairs[i].y_tilde;
    censored[i] = 1 - pairs[i].delta_y;
  }
  const KaplanMeier G = km_estimator(total, censored);

  double num = 0.0, den = 0.0;
  std::size_t orderable = 0, dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const GapPair& a = pairs[i];
    if (!a.delta_x) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const GapPair& b = pairs[j];
      if (!b.delta_x) continue;
      const GapPair& lo = a.y_tilde <= b.y_tilde ? a : b;
      const GapPair& hi = a.y_tilde <= b.y_tilde ? b : a;
      // the smaller second gap must be observed; the other must be known to
      // exceed it, or be an equal observed value
      if (!lo.delta_y) continue;
      if (!(hi.y_tilde > lo.y_tilde || hi.delta_y)) continue;
      const double y = lo.y_tilde;
      const double w = G.at(a.x_tilde + y) * G.at(b.x_tilde + y);
      if (!(w > 0.0)) {
        ++dropped;
        continue;
      }
      ++orderable;
      num += sign((a.x_tilde - b.x_tilde) * (a.y_tilde - b.y_tilde)) / w;
      den += 1.0 / w;
    }
  }
  if (orderable == 0) throw std::domain_error("no orderable pairs for Kendall's tau");
  return {num / den, orderable, dropped};
}

KendallResult ipcw_kendall_tau(std::span<const GapPair> pairs, int workers) {
  if (pairs.size() < 2) throw std::invalid_argument("Kendall's tau needs at least two subjects");
  const KendallPoint full = ipcw_kendall_point(pairs);
  const std::size_t n = pairs.size();
  std::vector<double> rep(n, std::nan(""));
  parallel_for(n, workers, [&](std::size_t k) {
    std::vector<GapPair> rest;
    rest.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) rest.push_back(pairs[i]);
    try {
      rep[k] = ipcw_kendall_point(rest).tau;
    } catch (const std::domain_error&) {
    }
  });
  std::vector<double> ok;
  for (double r : rep)
    if (!std::isnan(r)) ok.push_back(r);
  double se = 0.0;
  if (ok.size() >= 2) {
    const double m = static_cast<double>(ok.size());
    const double bar = std::accumulate(ok.begin(), ok.end(), 0.0) / m;
    double ss = 0.0;
    for (double r : ok) ss += (r - bar) * (r - bar);
    se = std::sqrt((m - 1.0) / m * ss);
  }
  return {full.tau, se, full.orderable_pairs, full.dropped_pairs, n};
}

std::vector<GapPair> gap_pairs(const FamilySet& fs, bool exclude_probands) {
  std::vector<GapPair> out;
  for (const auto& f : fs.families)
    for (const auto& ind : f.members) {
      if (exclude_probands && ind.is_proband) continue;
      const auto& t = ind.onset_ages;
      if (t.empty()) {
        out.push_back({ind.censor_age, 0.0, 0, 0});
      } else if (t.size() >= 2) {
        out.push_back({t[0], t[1] - t[0], 1, 1});
      } else {
        out.push_back({t[0], ind.censor_age - t[0], 1, 0});
      }
    }
  return out;
}

}  // namespace mpcpen
