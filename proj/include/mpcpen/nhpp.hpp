#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpcpen {

/// Model covariates. D is the periodically fixed indicator of a prior cancer.
enum class Covariate : std::uint8_t { G, S, D, GxS, GxD, SxD };

/// Candidate covariate sets compared by DIC.
///   M1 {G,S,D}  M2 {G,S,D,GxS}  M3 {G,S,D,GxD}
///   M4 {G,S,D,GxS,GxD}  M5 {G,S,D,GxS,GxD,SxD}
enum class CovariateSet : std::uint8_t { M1 = 1, M2, M3, M4, M5 };

std::span<const Covariate> covariates_of(CovariateSet set);
std::string_view covariate_name(Covariate c);
std::string_view to_string(CovariateSet set);
CovariateSet parse_covariate_set(std::string_view name);

struct ModelParams {
  CovariateSet covariate_set = CovariateSet::M4;
  std::vector<double> beta;   // in covariates_of(covariate_set) order
  std::vector<double> gamma;  // Bernstein weights, one per degree
  double phi = 1.0;           // frailty precision; ignored without frailty

  int degree() const { return static_cast<int>(gamma.size()); }

  /// beta = 0, gamma_m = 1/M, phi = 1.
  static ModelParams initial(CovariateSet set, int degree);

  /// Throws std::invalid_argument on a size mismatch or negative weight.
  void check() const;
};

/// Covariate history for one individual: carrier status, sex and normalized
/// time of first cancer (+inf when never affected).
struct CovariateSchedule {
  int g = 0;
  int s = 0;
  double t1 = std::numeric_limits<double>::infinity();
};

/// Covariate vector at normalized time t; D(t) = 1 iff t > t1.
std::vector<double> covariates_at(const CovariateSchedule& sched, double t, CovariateSet set);

/// beta' x for a given D value.
double linear_predictor(std::span<const double> beta, CovariateSet set, int g, int s, int d);

/// Beta(a, b) density and distribution function for integer a, b >= 1.
double beta_density(double t, int a, int b);
double beta_cdf(double t, int a, int b);

/// Fills f[m-1] = Beta(t; m, M-m+1) density and F[m-1] = its CDF, m = 1..M.
void bernstein_basis(double t, int degree, std::span<double> density, std::span<double> cdf);

/// lambda_0(t) = sum_m gamma_m f_M(t, m).
double baseline_intensity(double t, std::span<const double> gamma);

/// Lambda_0(t) = sum_m gamma_m F_M(t, m); Lambda_0(0) = 0, Lambda_0(1) = sum gamma.
double cumulative_baseline(double t, std::span<const double> gamma);

/// xi * lambda_0(t) * exp(beta' X(t)).
double intensity(double t, const CovariateSchedule& sched, double xi, const ModelParams& p);

/// Exact integral of intensity over [a, b]; the interval is split at t1.
double cumulative_intensity(double a, double b, const CovariateSchedule& sched, double xi,
                            const ModelParams& p);

}  // namespace mpcpen
