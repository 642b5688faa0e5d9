#include "mpcpen/nhpp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mpcpen {

namespace {

using C = Covariate;
constexpr std::array<Covariate, 3> kM1 = {C::G, C::S, C::D};
constexpr std::array<Covariate, 4> kM2 = {C::G, C::S, C::D, C::GxS};
constexpr std::array<Covariate, 4> kM3 = {C::G, C::S, C::D, C::GxD};
constexpr std::array<Covariate, 5> kM4 = {C::G, C::S, C::D, C::GxS, C::GxD};
constexpr std::array<Covariate, 6> kM5 = {C::G, C::S, C::D, C::GxS, C::GxD, C::SxD};

double covariate_value(Covariate c, int g, int s, int d) {
  switch (c) {
    case C::G: return g;
    case C::S: return s;
    case C::D: return d;
    case C::GxS: return g * s;
    case C::GxD: return g * d;
    case C::SxD: return s * d;
  }
  return 0.0;
}

// Binomial coefficient for small n; exact in double for n <= 60.
double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

void check_degree(std::size_t m) {
  if (m == 0 || m > 60) throw std::invalid_argument("Bernstein degree must be in [1, 60]");
}

}  // namespace

std::span<const Covariate> covariates_of(CovariateSet set) {
  switch (set) {
    case CovariateSet::M1: return kM1;
    case CovariateSet::M2: return kM2;
    case CovariateSet::M3: return kM3;
    case CovariateSet::M4: return kM4;
    case CovariateSet::M5: return kM5;
  }
  throw std::invalid_argument("unknown covariate set");
}

std::string_view covariate_name(Covariate c) {
  switch (c) {
    case C::G: return "G";
    case C::S: return "S";
    case C::D: return "D";
    case C::GxS: return "GxS";
    case C::GxD: return "GxD";
    case C::SxD: return "SxD";
  }
  return "?";
}

std::string_view to_string(CovariateSet set) {
  switch (set) {
    case CovariateSet::M1: return "M1";
    case CovariateSet::M2: return "M2";
    case CovariateSet::M3: return "M3";
    case CovariateSet::M4: return "M4";
    case CovariateSet::M5: return "M5";
  }
  return "?";
}

CovariateSet parse_covariate_set(std::string_view name) {
  for (auto s : {CovariateSet::M1, CovariateSet::M2, CovariateSet::M3, CovariateSet::M4,
                 CovariateSet::M5})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown covariate set '" + std::string(name) + "' (expected M1..M5)");
}

ModelParams ModelParams::initial(CovariateSet set, int degree) {
  check_degree(static_cast<std::size_t>(degree));
  ModelParams p;
  p.covariate_set = set;
  p.beta.assign(covariates_of(set).size(), 0.0);
  p.gamma.assign(static_cast<std::size_t>(degree), 1.0 / degree);
  p.phi = 1.0;
  return p;
}

void ModelParams::check() const {
  if (beta.size() != covariates_of(covariate_set).size())
    throw std::invalid_argument("beta length does not match covariate set " +
                                std::string(to_string(covariate_set)));
  check_degree(gamma.size());
  for (double g : gamma)
    if (!(g >= 0.0)) throw std::invalid_argument("Bernstein weights must be nonnegative");
}

std::vector<double> covariates_at(const CovariateSchedule& sched, double t, CovariateSet set) {
  const int d = t > sched.t1 ? 1 : 0;
  auto cov = covariates_of(set);
  std::vector<double> x(cov.size());
  for (std::size_t j = 0; j < cov.size(); ++j) x[j] = covariate_value(cov[j], sched.g, sched.s, d);
  return x;
}

double linear_predictor(std::span<const double> beta, CovariateSet set, int g, int s, int d) {
  auto cov = covariates_of(set);
  double eta = 0.0;
  for (std::size_t j = 0; j < cov.size(); ++j) eta += beta[j] * covariate_value(cov[j], g, s, d);
  return eta;
}

double beta_density(double t, int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("beta parameters must be positive integers");
  if (t < 0.0 || t > 1.0) return 0.0;
  const int n = a + b - 1;  // Bernstein degree
  return n * choose(n - 1, a - 1) * std::pow(t, a - 1) * std::pow(1.0 - t, b - 1);
}

double beta_cdf(double t, int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("beta parameters must be positive integers");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // I_t(a, b) = P(Binomial(n, t) >= a) with n = a + b - 1; all terms are
  // positive so the sum keeps relative accuracy near t = 0.
  const int n = a + b - 1;
  const double u = 1.0 - t;
  double upper = 0.0;
  for (int j = a; j <= n; ++j) upper += choose(n, j) * std::pow(t, j) * std::pow(u, n - j);
  return upper;
}

void bernstein_basis(double t, int degree, std::span<double> density, std::span<double> cdf) {
  check_degree(static_cast<std::size_t>(degree));
  const auto M = static_cast<std::size_t>(degree);
  if (density.size() < M || cdf.size() < M) throw std::invalid_argument("basis buffer too small");
  if (t <= 0.0 || t >= 1.0) {
    for (int m = 1; m <= degree; ++m) {
      density[m - 1] = beta_density(t, m, degree - m + 1);
      cdf[m - 1] = t <= 0.0 ? 0.0 : 1.0;
    }
    return;
  }
  // Binomial pmf b_j = C(M, j) t^j (1-t)^{M-j}; F_m = sum_{j >= m} b_j.
  // The density of Beta(m, M-m+1) is M * C(M-1, m-1) t^{m-1} (1-t)^{M-m}.
  std::array<double, 64> pmf{};
  const double u = 1.0 - t;
  for (int j = 0; j <= degree; ++j) pmf[j] = choose(degree, j) * std::pow(t, j) * std::pow(u, degree - j);
  double tail = 0.0;
  for (int m = degree; m >= 1; --m) {
    tail += pmf[m];
    cdf[m - 1] = std::min(tail, 1.0);
    density[m - 1] = degree * choose(degree - 1, m - 1) * std::pow(t, m - 1) * std::pow(u, degree - m);
  }
}

double baseline_intensity(double t, std::span<const double> gamma) {
  const int M = static_cast<int>(gamma.size());
  check_degree(gamma.size());
  double v = 0.0;
  for (int m = 1; m <= M; ++m) v += gamma[m - 1] * beta_density(t, m, M - m + 1);
  return v;
}

double cumulative_baseline(double t, std::span<const double> gamma) {
  const int M = static_cast<int>(gamma.size());
  check_degree(gamma.size());
  double v = 0.0;
  for (int m = 1; m <= M; ++m) v += gamma[m - 1] * beta_cdf(t, m, M - m + 1);
  return v;
}

double intensity(double t, const CovariateSchedule& sched, double xi, const ModelParams& p) {
  const int d = t > sched.t1 ? 1 : 0;
  return xi * baseline_intensity(t, p.gamma) *
         std::exp(linear_predictor(p.beta, p.covariate_set, sched.g, sched.s, d));
}

double cumulative_intensity(double a, double b, const CovariateSchedule& sched, double xi,
                            const ModelParams& p) {
  if (a > b) throw std::invalid_argument("cumulative_intensity: a > b");
  if (a == b) return 0.0;
  double total = 0.0;
  // D = 0 on [a, min(b, t1)], D = 1 on [max(a, t1), b]
  const double split = std::clamp(sched.t1, a, b);
  if (split > a) {
    double eta = linear_predictor(p.beta, p.covariate_set, sched.g, sched.s, 0);
    total += std::exp(eta) * (cumulative_baseline(split, p.gamma) - cumulative_baseline(a, p.gamma));
  }
  if (b > split) {
    double eta = linear_predictor(p.beta, p.covariate_set, sched.g, sched.s, 1);
    total += std::exp(eta) * (cumulative_baseline(b, p.gamma) - cumulative_baseline(split, p.gamma));
  }
  return xi * total;
}

}  // namespace mpcpen
