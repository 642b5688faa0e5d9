#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mpcpen/pedigree.hpp"

namespace mpcpen {

/// Single-locus, two-allele genotype. `a` is the wildtype allele.
enum class Genotype3 : std::uint8_t { aa = 0, Aa = 1, AA = 2 };

inline constexpr std::array<Genotype3, 3> kGenotypes = {Genotype3::aa, Genotype3::Aa,
                                                        Genotype3::AA};

/// Carrier collapse: 1 for Aa and AA, 0 for aa.
constexpr int carrier(Genotype3 g) { return g == Genotype3::aa ? 0 : 1; }

/// Probability over {aa, Aa, AA}, indexed by the enum value.
using GenotypeDist = std::array<double, 3>;

/// Per-member log-likelihood of its phenotype under each genotype.
using GenotypeLogLik = std::array<double, 3>;

/// Hardy-Weinberg founder distribution for mutant allele frequency psi_A.
GenotypeDist founder_prior(double psi_A);

/// Pr(child | father, mother) under Mendelian segregation.
double transmission_prob(Genotype3 child, Genotype3 father, Genotype3 mother);

/// Whether genotype g is compatible with an observed carrier status.
bool consistent(GenotypeObs obs, Genotype3 g);

/// Precomputed traversal for Elston-Stewart peeling of one loop-free
/// pedigree. The individual/mating graph is walked from the proband so every
/// message involves one nuclear family at a time; cost is linear in family
/// size.
class PeelingPlan {
 public:
  /// Throws std::invalid_argument when the family fails validate_family in a
  /// way that makes peeling impossible (unknown parents, cycles, loops).
  explicit PeelingPlan(const Family& f);

  std::size_t size() const { return father_.size(); }

  /// log Pr(histories, observed genotypes), summing out unobserved genotypes.
  /// `member_loglik[j]` is member j's log-likelihood given each genotype;
  /// `observed[j]` restricts that member's genotype support.
  double log_joint(std::span<const GenotypeLogLik> member_loglik,
                   std::span<const GenotypeObs> observed, const GenotypeDist& prior) const;

 private:
  struct Mating {
    std::size_t father, mother;
    std::vector<std::size_t> children;
  };
  // Node ids: [0, n) individuals, [n, n + matings) matings.
  struct Step {
    std::size_t node;
    std::size_t up;  // tree parent node, or npos for a component root
  };

  std::vector<std::size_t> father_, mother_;
  std::vector<Mating> matings_;
  std::vector<std::vector<std::size_t>> adjacent_;  // individual -> mating ids
  std::vector<Step> order_;                          // BFS order over all components
};

/// log Pr(h, g_obs): single-shot peel of a family (builds the plan).
double peel_family(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                   std::span<const GenotypeObs> observed, double psi_A);

/// Same quantity by explicit enumeration of every consistent genotype
/// configuration. Guarded to at most `max_missing` unobserved members.
double brute_force_family_loglik(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                                 std::span<const GenotypeObs> observed, double psi_A,
                                 std::size_t max_missing = 12);

/// log Pr(h | g_obs) = peel(h, g_obs) - peel(g_obs). Throws std::domain_error
/// when the observed genotypes are impossible under the pedigree.
double conditional_family_loglik(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                                 std::span<const GenotypeObs> observed, double psi_A);

/// Observed genotypes of the members, in member order.
std::vector<GenotypeObs> observed_genotypes(const Family& f);

}  // namespace mpcpen
