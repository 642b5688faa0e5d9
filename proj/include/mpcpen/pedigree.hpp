#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpcpen {

/// Observed germline genotype. Carrier means at least one mutant allele.
enum class GenotypeObs : std::uint8_t { Wildtype = 0, Carrier = 1, Missing = 2 };

/// One pedigree member with its cancer history. Ages are in years.
struct Individual {
  std::string id;
  std::string father_id;  // empty for founders
  std::string mother_id;  // empty for founders
  int sex = 0;            // 1 male, 0 female
  GenotypeObs genotype = GenotypeObs::Missing;
  std::vector<double> onset_ages;  // strictly increasing
  double censor_age = 0.0;         // >= last onset age
  bool is_proband = false;

  bool is_founder() const { return father_id.empty() && mother_id.empty(); }
  std::size_t n_events() const { return onset_ages.size(); }
};

struct Family {
  std::string family_id;
  std::vector<Individual> members;

  /// Index of the first proband, or members.size() when there is none.
  std::size_t proband_index() const;
  const Individual& proband() const;
};

struct FamilySet {
  std::vector<Family> families;
  double t_max = 100.0;

  std::size_t n_individuals() const;
};

/// Raised for malformed pedigree input. line() is 1-based; 0 when the problem
/// is not tied to a single row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct PedigreeFormat {
  char delimiter = ',';
  char onset_separator = ';';
  double t_max = 100.0;
};

/// Checks the per-individual invariants (age ordering, codes, proband has an
/// onset). Throws std::invalid_argument naming the violated rule.
void check_individual(const Individual& ind, double t_max);

FamilySet parse_pedigree(std::istream& in, const PedigreeFormat& fmt = {});
FamilySet parse_pedigree(std::string_view text, const PedigreeFormat& fmt = {});
FamilySet read_pedigree_file(const std::string& path, const PedigreeFormat& fmt = {});

/// Writes the CSV format read by parse_pedigree. Ages are printed in their
/// shortest round-trip representation, so parse(write(x)) == x.
void write_pedigree(std::ostream& out, const FamilySet& fs, const PedigreeFormat& fmt = {});
std::string format_number(double v);

enum class ViolationKind {
  MissingProband,
  MultipleProbands,
  DuplicateId,
  UnknownParent,
  HalfFounder,
  ParentSex,
  Cycle,
  Loop,
  InvalidMember,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

/// Structural checks needed before the family can be peeled. Never throws;
/// problems are returned as report entries.
ValidationReport validate_family(const Family& f);

/// age / t_max. Throws std::invalid_argument outside [0, t_max].
double normalize_age(double age, double t_max);

bool operator==(const Individual& a, const Individual& b);
bool operator==(const Family& a, const Family& b);
bool operator==(const FamilySet& a, const FamilySet& b);

}  // namespace mpcpen
