#include <doctest.h>

#include <random>
#include <sstream>

#include "mpcpen/pedigree.hpp"
#include "mpcpen/simulate.hpp"
#include "test_util.hpp"

using namespace mpcpen;
using mpcpen::testing::person;

namespace {
const char* kHeader = "family_id,individual_id,father_id,mother_id,sex,genotype,onset_ages,censor_age,proband\n";

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_pedigree(std::string_view(text));
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}
}  // namespace

TEST_CASE("row fields map onto an individual") {
  auto fs = parse_pedigree(std::string(kHeader) + "F1,P1,0,0,1,1,20;35,50,1\n");
  REQUIRE(fs.families.size() == 1);
  const Individual& p = fs.families[0].members.at(0);
  CHECK(p.id == "P1");
  CHECK(p.is_founder());
  CHECK(p.sex == 1);
  CHECK(p.genotype == GenotypeObs::Carrier);
  CHECK(p.onset_ages == std::vector<double>{20, 35});
  CHECK(p.censor_age == 50);
  CHECK(p.is_proband);
}

TEST_CASE("column order follows the header") {
  auto fs = parse_pedigree(std::string_view(
      "proband,censor_age,onset_ages,genotype,sex,mother_id,father_id,individual_id,family_id\n"
      "1,50,20,0,0,0,0,A,F\n"));
  CHECK(fs.families[0].members[0].genotype == GenotypeObs::Wildtype);
  CHECK(fs.families[0].members[0].censor_age == 50);
}

TEST_CASE("NA genotype is missing") {
  auto fs = parse_pedigree(std::string(kHeader) + "F1,P1,0,0,1,NA,20,50,1\n");
  CHECK(fs.families[0].members[0].genotype == GenotypeObs::Missing);
}

TEST_CASE("parse errors carry the offending line") {
  const std::string h = kHeader;
  CHECK(parse_error_line(h + "F1,P1,0,0,1,1,20;35,30,1\n") == 2);  // censor before onset
  CHECK(parse_error_line(h + "F1,P1,0,0,1,1,20,50,1\nF1,P1,0,0,0,0,,40,0\n") == 3);
  CHECK(parse_error_line(h + "F1,P1,X,Y,1,1,20,50,1\n") == 2);  // unknown parents
  CHECK(parse_error_line(h + "F1,P1,0,0,2,1,20,50,1\n") == 2);
  CHECK(parse_error_line(h + "F1,P1,0,0,1,3,20,50,1\n") == 2);
  CHECK(parse_error_line(h + "F1,P1,0,0,1,1,20,50\n") == 2);
  CHECK(parse_error_line(h + "F1,P1,0,0,1,1,35;20,50,1\n") == 2);
  CHECK(parse_error_line(h + "F1,P1,0,0,1,1,20,150,1\n") == 2);  // beyond t_max
  CHECK(parse_error_line("family_id,individual_id\n") == 1);
}

TEST_CASE("censoring at the last onset is allowed") {
  auto fs = parse_pedigree(std::string(kHeader) + "F1,P1,0,0,1,1,20;35,35,1\n");
  CHECK(fs.families[0].members[0].censor_age == 35);
}

TEST_CASE("validation of family structure") {
  Family nuclear{"N",
                 {person("F", "", "", 1), person("M", "", "", 0),
                  person("C", "F", "M", 0, GenotypeObs::Missing, {30}, 40, true)}};
  CHECK(validate_family(nuclear).ok());

  Family none = nuclear;
  none.members[2].is_proband = false;
  CHECK(validate_family(none).has(ViolationKind::MissingProband));

  Family two = nuclear;
  two.members[0].is_proband = true;
  two.members[0].onset_ages = {50};
  two.members[0].censor_age = 60;
  CHECK(validate_family(two).has(ViolationKind::MultipleProbands));

  // two siblings listed as a couple with a child
  Family loop = nuclear;
  loop.members.push_back(person("B", "F", "M", 1));
  loop.members.push_back(person("K", "B", "C", 0));
  CHECK(validate_family(loop).has(ViolationKind::Loop));

  Family cycle{"Y",
               {person("A", "B", "M", 1, GenotypeObs::Missing, {30}, 40, true), person("M", "", "", 0),
                person("B", "A", "M", 1)}};
  CHECK(validate_family(cycle).has(ViolationKind::Cycle));

  Family dup = nuclear;
  dup.members.push_back(person("C", "F", "M", 0));
  CHECK(validate_family(dup).has(ViolationKind::DuplicateId));

  Family unknown = nuclear;
  unknown.members[2].father_id = "Z";
  CHECK(validate_family(unknown).has(ViolationKind::UnknownParent));

  Family half = nuclear;
  half.members[2].mother_id = "";
  CHECK(validate_family(half).has(ViolationKind::HalfFounder));

  Family sexes = nuclear;
  sexes.members[0].sex = 0;
  CHECK(validate_family(sexes).has(ViolationKind::ParentSex));
}

TEST_CASE("half siblings through a second marriage are accepted") {
  Family f{"H",
           {person("F", "", "", 1), person("M1", "", "", 0), person("M2", "", "", 0),
            person("A", "F", "M1", 0, GenotypeObs::Missing, {30}, 40, true), person("B", "F", "M2", 1)}};
  CHECK(validate_family(f).ok());
}

TEST_CASE("normalize_age") {
  CHECK(normalize_age(50, 100) == 0.5);
  CHECK(normalize_age(0, 100) == 0.0);
  CHECK(normalize_age(100, 100) == 1.0);
  CHECK_THROWS_AS(normalize_age(101, 100), std::invalid_argument);
  double prev = -1;
  for (int i = 0; i <= 1000; ++i) {
    const double v = normalize_age(i * 0.1, 100);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("write then parse is the identity on random families") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    FamilySet fs;
    for (int k = 0; k < 3; ++k)
      fs.families.push_back(testing::random_family(rng, 4 + rng() % 20, 0.5, "fam" + std::to_string(k)));
    std::ostringstream out;
    write_pedigree(out, fs);
    CHECK(parse_pedigree(std::string_view(out.str())) == fs);
  }
}

TEST_CASE("simulated families validate") {
  SimConfig cfg;
  cfg.n_families = 40;
  cfg.seed = 3;
  auto sim = simulate_dataset(cfg);
  for (const auto& f : sim.data.families) CHECK(validate_family(f).ok());
}
