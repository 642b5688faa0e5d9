#pragma once

#include <iosfwd>
#include <string>

#include "mpcpen/sampler.hpp"

namespace mpcpen {

/// One row per retained draw: iteration, beta_<cov>..., gamma_1..gamma_M,
/// [phi, xi_<family>...], loglik. Values use the shortest round-trip form.
void write_posterior_csv(std::ostream& out, const PosteriorSamples& s);
void write_posterior_file(const std::string& path, const PosteriorSamples& s);

/// Inverse of write_posterior_csv. The covariate set is recovered from the
/// beta column names; a missing loglik column leaves `loglik` empty.
/// Acceptance counts and t_max are not part of the CSV (t_max is set to
/// `t_max`). Throws ParseError on malformed input.
PosteriorSamples read_posterior_csv(std::istream& in, double t_max = 100.0);
PosteriorSamples read_posterior_file(const std::string& path, double t_max = 100.0);

}  // namespace mpcpen
