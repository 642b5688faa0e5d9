#include "mpcpen/pedigree.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace mpcpen {

namespace {

constexpr std::array<std::string_view, 9> kColumns = {
    "family_id", "individual_id", "father_id", "mother_id", "sex",
    "genotype",  "proband",       "onset_ages", "censor_age"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::string line_prefix(std::size_t line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line_prefix(line) + what), line_(line) {}

std::size_t Family::proband_index() const {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i].is_proband) return i;
  return members.size();
}

const Individual& Family::proband() const {
  auto i = proband_index();
  if (i == members.size())
    throw std::invalid_argument("family " + family_id + " has no proband");
  return members[i];
}

std::size_t FamilySet::n_individuals() const {
  std::size_t n = 0;
  for (const auto& f : families) n += f.members.size();
  return n;
}

void check_individual(const Individual& ind, double t_max) {
  const auto who = "individual " + ind.id + ": ";
  if (ind.id.empty() || ind.id == "0") throw std::invalid_argument("empty or reserved individual id");
  if (ind.sex != 0 && ind.sex != 1) throw std::invalid_argument(who + "sex must be 0 or 1");
  if (ind.father_id.empty() != ind.mother_id.empty())
    throw std::invalid_argument(who + "either both parents or neither must be given");
  if (!ind.father_id.empty() && ind.father_id == ind.mother_id)
    throw std::invalid_argument(who + "father and mother are the same individual");
  if (!(ind.censor_age >= 0.0) || !std::isfinite(ind.censor_age))
    throw std::invalid_argument(who + "censor age must be a nonnegative number");
  double prev = -1.0;
  for (double a : ind.onset_ages) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument(who + "negative onset age");
    if (!(a > prev)) throw std::invalid_argument(who + "onset ages must be strictly increasing");
    prev = a;
  }
  if (!ind.onset_ages.empty() && ind.censor_age < ind.onset_ages.back())
    throw std::invalid_argument(who + "censor age precedes last onset age (censor-before-onset)");
  if (ind.censor_age > t_max) throw std::invalid_argument(who + "censor age exceeds t_max");
  if (ind.is_proband && ind.onset_ages.empty())
    throw std::invalid_argument(who + "proband must have at least one onset");
}

FamilySet parse_pedigree(std::istream& in, const PedigreeFormat& fmt) {
  if (!(fmt.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

  FamilySet fs;
  fs.t_max = fmt.t_max;

  std::string raw;
  std::size_t line_no = 0;
  std::array<std::size_t, kColumns.size()> col{};
  std::size_t n_fields = 0;
  bool have_header = false;

  std::unordered_map<std::string, std::size_t> family_index;
  // (family, id) -> source line, for error messages on parent references
  std::vector<std::map<std::string, std::size_t>> lines_by_family;

  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    auto fields = split(line, fmt.delimiter);

    if (!have_header) {
      n_fields = fields.size();
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end())
          throw ParseError(line_no, "header is missing column '" + std::string(kColumns[c]) + "'");
        col[c] = static_cast<std::size_t>(it - fields.begin());
      }
      have_header = true;
      continue;
    }

    if (fields.size() != n_fields)
      throw ParseError(line_no, "malformed row: expected " + std::to_string(n_fields) +
                                    " fields, found " + std::to_string(fields.size()));

    auto field = [&](std::size_t c) { return fields[col[c]]; };

    Individual ind;
    std::string fam_id(field(0));
    if (fam_id.empty()) throw ParseError(line_no, "empty family_id");
    ind.id = std::string(field(1));
    if (ind.id.empty() || ind.id == "0") throw ParseError(line_no, "empty or reserved individual_id");

    auto parent = [&](std::string_view p) { return p == "0" ? std::string() : std::string(p); };
    ind.father_id = parent(field(2));
    ind.mother_id = parent(field(3));
    if (field(2).empty() || field(3).empty())
      throw ParseError(line_no, "parent ids must be given ('0' for founders)");

    auto sex = field(4);
    if (sex == "1") ind.sex = 1;
    else if (sex == "0") ind.sex = 0;
    else throw ParseError(line_no, "sex code '" + std::string(sex) + "' outside {0,1}");

    auto geno = field(5);
    if (geno == "1") ind.genotype = GenotypeObs::Carrier;
    else if (geno == "0") ind.genotype = GenotypeObs::Wildtype;
    else if (geno == "NA" || geno.empty()) ind.genotype = GenotypeObs::Missing;
    else throw ParseError(line_no, "genotype code '" + std::string(geno) + "' outside {0,1,NA}");

    auto prob = field(6);
    if (prob == "1") ind.is_proband = true;
    else if (prob == "0") ind.is_proband = false;
    else throw ParseError(line_no, "proband flag '" + std::string(prob) + "' outside {0,1}");

    auto onsets = field(7);
    if (!onsets.empty()) {
      for (auto tok : split(onsets, fmt.onset_separator))
        ind.onset_ages.push_back(parse_double(tok, line_no, "onset age"));
    }
    ind.censor_age = parse_double(field(8), line_no, "censor age");
    for (double a : ind.onset_ages)
      if (a > fmt.t_max) throw ParseError(line_no, "onset age exceeds t_max");

    try {
      check_individual(ind, fmt.t_max);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }

    auto [it, inserted] = family_index.try_emplace(fam_id, fs.families.size());
    if (inserted) {
      fs.families.push_back(Family{fam_id, {}});
      lines_by_family.emplace_back();
    }
    auto& lines = lines_by_family[it->second];
    if (!lines.emplace(ind.id, line_no).second)
      throw ParseError(line_no, "duplicate individual id '" + ind.id + "' in family " + fam_id);
    fs.families[it->second].members.push_back(std::move(ind));
  }
  if (!have_header) throw ParseError(0, "empty input: header required");

  for (std::size_t fi = 0; fi < fs.families.size(); ++fi) {
    const auto& lines = lines_by_family[fi];
    for (const auto& m : fs.families[fi].members) {
      for (const auto* p : {&m.father_id, &m.mother_id}) {
        if (!p->empty() && !lines.count(*p))
          throw ParseError(lines.at(m.id), "unknown parent reference '" + *p + "' in family " +
                                               fs.families[fi].family_id);
      }
    }
  }
  return fs;
}

FamilySet parse_pedigree(std::string_view text, const PedigreeFormat& fmt) {
  std::istringstream in{std::string(text)};
  return parse_pedigree(in, fmt);
}

FamilySet read_pedigree_file(const std::string& path, const PedigreeFormat& fmt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pedigree file " + path);
  return parse_pedigree(in, fmt);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

void write_pedigree(std::ostream& out, const FamilySet& fs, const PedigreeFormat& fmt) {
  const char d = fmt.delimiter;
  for (std::size_t c = 0; c < kColumns.size(); ++c) out << (c ? std::string(1, d) : "") << kColumns[c];
  out << '\n';
  for (const auto& f : fs.families) {
    for (const auto& m : f.members) {
      out << f.family_id << d << m.id << d << (m.father_id.empty() ? "0" : m.father_id) << d
          << (m.mother_id.empty() ? "0" : m.mother_id) << d << m.sex << d;
      switch (m.genotype) {
        case GenotypeObs::Wildtype: out << '0'; break;
        case GenotypeObs::Carrier: out << '1'; break;
        case GenotypeObs::Missing: out << "NA"; break;
      }
      out << d << (m.is_proband ? 1 : 0) << d;
      for (std::size_t k = 0; k < m.onset_ages.size(); ++k)
        out << (k ? std::string(1, fmt.onset_separator) : "") << format_number(m.onset_ages[k]);
      out << d << format_number(m.censor_age) << '\n';
    }
  }
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingProband: return "missing-proband";
    case ViolationKind::MultipleProbands: return "multiple-probands";
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::UnknownParent: return "unknown-parent";
    case ViolationKind::HalfFounder: return "half-founder";
    case ViolationKind::ParentSex: return "parent-sex";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::Loop: return "loop";
    case ViolationKind::InvalidMember: return "invalid-member";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_family(const Family& f) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string msg) {
    report.violations.push_back({k, "family " + f.family_id + ": " + std::move(msg)});
  };

  const std::size_t n = f.members.size();
  std::size_t probands = 0;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = f.members[i];
    if (m.is_proband) ++probands;
    if (!index.emplace(m.id, i).second) add(ViolationKind::DuplicateId, "duplicate id " + m.id);
    if (m.is_proband && m.onset_ages.empty())
      add(ViolationKind::InvalidMember, "proband " + m.id + " has no onset");
  }
  if (probands == 0) add(ViolationKind::MissingProband, "no proband");
  if (probands > 1) add(ViolationKind::MultipleProbands, std::to_string(probands) + " probands");

  // parent indices, or npos
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> father(n, npos), mother(n, npos);
  bool links_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = f.members[i];
    if (m.father_id.empty() != m.mother_id.empty()) {
      add(ViolationKind::HalfFounder, m.id + " has exactly one parent");
      links_ok = false;
      continue;
    }
    if (m.is_founder()) continue;
    auto fi = index.find(m.father_id);
    auto mi = index.find(m.mother_id);
    if (fi == index.end() || mi == index.end()) {
      add(ViolationKind::UnknownParent, m.id + " references a parent outside the family");
      links_ok = false;
      continue;
    }
    father[i] = fi->second;
    mother[i] = mi->second;
    if (father[i] == mother[i]) {
      add(ViolationKind::Cycle, m.id + " has the same father and mother");
      links_ok = false;
      continue;
    }
    if (f.members[father[i]].sex != 1) add(ViolationKind::ParentSex, "father of " + m.id + " is not male");
    if (f.members[mother[i]].sex != 0) add(ViolationKind::ParentSex, "mother of " + m.id + " is not female");
  }
  if (!links_ok) return report;

  // ancestry cycles: iterative DFS over child -> parent edges
  {
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    bool cyclic = false;
    for (std::size_t root = 0; root < n && !cyclic; ++root) {
      if (state[root]) continue;
      std::vector<std::pair<std::size_t, int>> stack{{root, 0}};
      state[root] = 1;
      while (!stack.empty() && !cyclic) {
        auto& [v, next] = stack.back();
        if (father[v] == npos || next >= 2) {
          state[v] = 2;
          stack.pop_back();
          continue;
        }
        std::size_t p = next == 0 ? father[v] : mother[v];
        ++next;
        if (state[p] == 1) cyclic = true;
        else if (state[p] == 0) {
          state[p] = 1;
          stack.emplace_back(p, 0);
        }
      }
    }
    if (cyclic) {
      add(ViolationKind::Cycle, "an individual is their own ancestor");
      return report;
    }
  }

  // Marriage/inbreeding loops: the individual-mating bipartite graph must be a forest.
  std::vector<std::size_t> parent_of(n, 0);
  std::iota(parent_of.begin(), parent_of.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent_of[x] != x) x = parent_of[x] = parent_of[parent_of[x]];
    return x;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> matings;
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_of[a] = b;
    return true;
  };
  bool loop = false;
  for (std::size_t i = 0; i < n && !loop; ++i) {
    if (father[i] == npos) continue;
    auto key = std::make_pair(father[i], mother[i]);
    auto it = matings.find(key);
    if (it == matings.end()) {
      std::size_t node = parent_of.size();
      parent_of.push_back(node);
      it = matings.emplace(key, node).first;
      if (!unite(father[i], node) || !unite(mother[i], node)) loop = true;
    }
    if (!unite(i, it->second)) loop = true;
  }
  if (loop) add(ViolationKind::Loop, "pedigree contains a marriage or inbreeding loop");
  return report;
}

double normalize_age(double age, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(age >= 0.0) || age > t_max)
    throw std::invalid_argument("age " + format_number(age) + " outside [0, t_max]");
  return age / t_max;
}

bool operator==(const Individual& a, const Individual& b) {
  return a.id == b.id && a.father_id == b.father_id && a.mother_id == b.mother_id &&
         a.sex == b.sex && a.genotype == b.genotype && a.onset_ages == b.onset_ages &&
         a.censor_age == b.censor_age && a.is_proband == b.is_proband;
}

bool operator==(const Family& a, const Family& b) {
  return a.family_id == b.family_id && a.members == b.members;
}

bool operator==(const FamilySet& a, const FamilySet& b) {
  return a.t_max == b.t_max && a.families == b.families;
}

}  // namespace mpcpen
