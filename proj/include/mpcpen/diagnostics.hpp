#pragma once

#include <span>
#include <string>
#include <vector>

#include "mpcpen/sampler.hpp"

namespace mpcpen {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(std::span<const double> x);
/// Linear-interpolation quantile (R type 7). Throws on empty input.
double quantile(std::span<const double> x, double prob);
double median(std::span<const double> x);

/// Monte-Carlo standard error of the mean by non-overlapping batch means.
/// `batches` <= 0 uses floor(sqrt(n)).
double batch_means_mcse(std::span<const double> x, int batches = 0);

/// Split potential scale reduction over one or more chains of equal length.
double split_rhat(const std::vector<std::vector<double>>& chains);

struct ParameterSummary {
  std::string name;
  double mean, sd, q025, median, q975, mcse, rhat;
};

/// Summary of every column (frailties excluded unless include_xi).
std::vector<ParameterSummary> summarize(const PosteriorSamples& s, bool include_xi = false);

}  // namespace mpcpen
