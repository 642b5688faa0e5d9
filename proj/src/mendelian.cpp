#include "mpcpen/mendelian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace mpcpen {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr auto npos = static_cast<std::size_t>(-1);

// Probability that a parent with genotype g transmits the mutant allele.
constexpr double mutant_gamete(int g) { return 0.5 * g; }

struct TransmissionTable {
  // t[child][father][mother]
  double t[3][3][3];
  constexpr TransmissionTable() : t{} {
    for (int f = 0; f < 3; ++f)
      for (int m = 0; m < 3; ++m) {
        double pf = mutant_gamete(f), pm = mutant_gamete(m);
        t[0][f][m] = (1 - pf) * (1 - pm);
        t[1][f][m] = pf * (1 - pm) + (1 - pf) * pm;
        t[2][f][m] = pf * pm;
      }
  }
};

constexpr TransmissionTable kTransmission{};

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Rescales v to max 1 and returns log of the factor removed (or -inf if v is 0).
double normalize(std::array<double, 3>& v) {
  double m = std::max({v[0], v[1], v[2]});
  if (!(m > 0.0)) return kNegInf;
  v[0] /= m;
  v[1] /= m;
  v[2] /= m;
  return std::log(m);
}

void check_sizes(const Family& f, std::span<const GenotypeLogLik> ll,
                 std::span<const GenotypeObs> observed) {
  if (ll.size() != f.members.size() || observed.size() != f.members.size())
    throw std::invalid_argument("member likelihood/observation count does not match family size");
}

}  // namespace

GenotypeDist founder_prior(double psi_A) {
  if (!(psi_A >= 0.0 && psi_A <= 1.0)) throw std::invalid_argument("psi_A must lie in [0, 1]");
  const double q = 1.0 - psi_A;
  return {q * q, 2.0 * psi_A * q, psi_A * psi_A};
}

double transmission_prob(Genotype3 child, Genotype3 father, Genotype3 mother) {
  return kTransmission.t[static_cast<int>(child)][static_cast<int>(father)][static_cast<int>(mother)];
}

bool consistent(GenotypeObs obs, Genotype3 g) {
  switch (obs) {
    case GenotypeObs::Missing: return true;
    case GenotypeObs::Wildtype: return g == Genotype3::aa;
    case GenotypeObs::Carrier: return g != Genotype3::aa;
  }
  return false;
}

std::vector<GenotypeObs> observed_genotypes(const Family& f) {
  std::vector<GenotypeObs> out;
  out.reserve(f.members.size());
  for (const auto& m : f.members) out.push_back(m.genotype);
  return out;
}

PeelingPlan::PeelingPlan(const Family& f) {
  auto report = validate_family(f);
  for (const auto& v : report.violations) {
    switch (v.kind) {
      case ViolationKind::DuplicateId:
      case ViolationKind::UnknownParent:
      case ViolationKind::HalfFounder:
      case ViolationKind::Cycle:
      case ViolationKind::Loop:
        throw std::invalid_argument("cannot peel: " + v.message);
      default:
        break;
    }
  }

  const std::size_t n = f.members.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(f.members[i].id, i);

  father_.assign(n, npos);
  mother_.assign(n, npos);
  adjacent_.assign(n, {});
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> mating_of;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = f.members[i];
    if (m.is_founder()) continue;
    father_[i] = index.at(m.father_id);
    mother_[i] = index.at(m.mother_id);
    auto key = std::make_pair(father_[i], mother_[i]);
    auto [it, inserted] = mating_of.try_emplace(key, matings_.size());
    if (inserted) {
      matings_.push_back({father_[i], mother_[i], {}});
      adjacent_[father_[i]].push_back(it->second);
      adjacent_[mother_[i]].push_back(it->second);
    }
    matings_[it->second].children.push_back(i);
    adjacent_[i].push_back(it->second);
  }

  // BFS over the bipartite tree, one component at a time, proband component first.
  std::vector<bool> seen(n + matings_.size(), false);
  std::vector<std::size_t> roots;
  if (auto p = f.proband_index(); p < n) roots.push_back(p);
  for (std::size_t i = 0; i < n; ++i) roots.push_back(i);

  order_.reserve(n + matings_.size());
  for (std::size_t root : roots) {
    if (seen[root]) continue;
    seen[root] = true;
    std::deque<Step> queue{{root, npos}};
    while (!queue.empty()) {
      Step s = queue.front();
      queue.pop_front();
      order_.push_back(s);
      if (s.node < n) {
        for (std::size_t q : adjacent_[s.node]) {
          std::size_t node = n + q;
          if (!seen[node]) {
            seen[node] = true;
            queue.push_back({node, s.node});
          }
        }
      } else {
        const auto& mt = matings_[s.node - n];
        auto visit = [&](std::size_t ind) {
          if (!seen[ind]) {
            seen[ind] = true;
            queue.push_back({ind, s.node});
          }
        };
        visit(mt.father);
        visit(mt.mother);
        for (std::size_t c : mt.children) visit(c);
      }
    }
  }
}

double PeelingPlan::log_joint(std::span<const GenotypeLogLik> member_loglik,
                              std::span<const GenotypeObs> observed,
                              const GenotypeDist& prior) const {
  const std::size_t n = father_.size();
  if (member_loglik.size() != n || observed.size() != n)
    throw std::invalid_argument("member likelihood/observation count does not match plan");

  // Message from each node toward its tree parent, rescaled to max 1.
  std::vector<std::array<double, 3>> msg(n + matings_.size());
  double log_scale = 0.0;

  const double log_prior[3] = {std::log(prior[0]), std::log(prior[1]), std::log(prior[2])};

  // Unary potential of an individual: phenotype likelihood, observation
  // support and (for founders) the population genotype prior.
  auto unary = [&](std::size_t i, std::array<double, 3>& out) -> bool {
    double lu[3];
    double mx = kNegInf;
    for (int g = 0; g < 3; ++g) {
      double v = consistent(observed[i], static_cast<Genotype3>(g)) ? member_loglik[i][g] : kNegInf;
      if (father_[i] == npos) v += log_prior[g];
      if (std::isnan(v)) v = kNegInf;
      lu[g] = v;
      mx = std::max(mx, v);
    }
    if (mx == kNegInf) return false;
    for (int g = 0; g < 3; ++g) out[g] = std::exp(lu[g] - mx);
    log_scale += mx;
    return true;
  };

  // Product of messages flowing into individual i from every adjacent mating
  // other than `skip`.
  auto collect = [&](std::size_t i, std::size_t skip, std::array<double, 3>& acc) -> bool {
    for (std::size_t q : adjacent_[i]) {
      std::size_t node = n + q;
      if (node == skip) continue;
      for (int g = 0; g < 3; ++g) acc[g] *= msg[node][g];
      double s = normalize(acc);
      if (s == kNegInf) return false;
      log_scale += s;
    }
    return true;
  };

  double total = 0.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const Step& s = *it;
    if (s.node < n) {
      std::array<double, 3> acc;
      if (!unary(s.node, acc)) return kNegInf;
      if (!collect(s.node, s.up, acc)) return kNegInf;
      if (s.up == npos) {
        double sum = acc[0] + acc[1] + acc[2];
        if (!(sum > 0.0)) return kNegInf;
        total += std::log(sum);
      } else {
        msg[s.node] = acc;
      }
      continue;
    }

    const auto& mt = matings_[s.node - n];
    const std::size_t target = s.up;  // never npos: matings are not roots
    const auto& t = kTransmission.t;

    // prod[f][m] = product over children other than target of
    //              sum_gc T(gc | f, m) * msg_child(gc)
    double prod[3][3];
    for (int gf = 0; gf < 3; ++gf)
      for (int gm = 0; gm < 3; ++gm) prod[gf][gm] = 1.0;
    for (std::size_t c : mt.children) {
      if (c == target) continue;
      const auto& u = msg[c];
      double mx = 0.0;
      for (int gf = 0; gf < 3; ++gf)
        for (int gm = 0; gm < 3; ++gm) {
          prod[gf][gm] *= t[0][gf][gm] * u[0] + t[1][gf][gm] * u[1] + t[2][gf][gm] * u[2];
          mx = std::max(mx, prod[gf][gm]);
        }
      if (!(mx > 0.0)) return kNegInf;
      for (auto& row : prod)
        for (double& v : row) v /= mx;
      log_scale += std::log(mx);
    }

    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (target == mt.father) {
      const auto& um = msg[mt.mother];
      for (int gf = 0; gf < 3; ++gf)
        for (int gm = 0; gm < 3; ++gm) out[gf] += um[gm] * prod[gf][gm];
    } else if (target == mt.mother) {
      const auto& uf = msg[mt.father];
      for (int gf = 0; gf < 3; ++gf)
        for (int gm = 0; gm < 3; ++gm) out[gm] += uf[gf] * prod[gf][gm];
    } else {
      const auto& uf = msg[mt.father];
      const auto& um = msg[mt.mother];
      for (int gf = 0; gf < 3; ++gf)
        for (int gm = 0; gm < 3; ++gm) {
          double w = uf[gf] * um[gm] * prod[gf][gm];
          for (int gc = 0; gc < 3; ++gc) out[gc] += w * t[gc][gf][gm];
        }
    }
    double sc = normalize(out);
    if (sc == kNegInf) return kNegInf;
    log_scale += sc;
    msg[s.node] = out;
  }
  return total + log_scale;
}

double peel_family(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                   std::span<const GenotypeObs> observed, double psi_A) {
  check_sizes(f, member_loglik, observed);
  return PeelingPlan(f).log_joint(member_loglik, observed, founder_prior(psi_A));
}

double brute_force_family_loglik(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                                 std::span<const GenotypeObs> observed, double psi_A,
                                 std::size_t max_missing) {
  check_sizes(f, member_loglik, observed);
  const std::size_t n = f.members.size();
  std::size_t missing = std::count(observed.begin(), observed.end(), GenotypeObs::Missing);
  if (missing > max_missing)
    throw std::length_error("too many missing genotypes for enumeration");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(f.members[i].id, i);
  std::vector<std::size_t> fa(n, npos), mo(n, npos);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.members[i].is_founder()) continue;
    fa[i] = index.at(f.members[i].father_id);
    mo[i] = index.at(f.members[i].mother_id);
  }

  std::vector<std::vector<int>> support(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int g = 0; g < 3; ++g)
      if (consistent(observed[i], static_cast<Genotype3>(g))) support[i].push_back(g);

  const auto prior = founder_prior(psi_A);
  std::vector<std::size_t> pos(n, 0);
  std::vector<int> geno(n);
  double acc = kNegInf;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) geno[i] = support[i][pos[i]];
    double lp = 0.0;
    for (std::size_t i = 0; i < n && lp != kNegInf; ++i) {
      double p = fa[i] == npos ? prior[geno[i]]
                               : kTransmission.t[geno[i]][geno[fa[i]]][geno[mo[i]]];
      lp += (p > 0.0 ? std::log(p) : kNegInf) + member_loglik[i][geno[i]];
    }
    if (!std::isnan(lp)) acc = log_sum_exp(acc, lp);

    std::size_t k = 0;
    while (k < n && ++pos[k] == support[k].size()) pos[k++] = 0;
    if (k == n) break;
  }
  return acc;
}

double conditional_family_loglik(const Family& f, std::span<const GenotypeLogLik> member_loglik,
                                 std::span<const GenotypeObs> observed, double psi_A) {
  check_sizes(f, member_loglik, observed);
  PeelingPlan plan(f);
  const auto prior = founder_prior(psi_A);
  std::vector<GenotypeLogLik> flat(f.members.size(), GenotypeLogLik{0.0, 0.0, 0.0});
  double marginal = plan.log_joint(flat, observed, prior);
  if (marginal == kNegInf)
    throw std::domain_error("observed genotypes of family " + f.family_id +
                            " are impossible under Mendelian inheritance");
  return plan.log_joint(member_loglik, observed, prior) - marginal;
}

}  // namespace mpcpen
