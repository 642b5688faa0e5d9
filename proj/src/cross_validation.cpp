#include "mpcpen/cross_validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mpcpen/diagnostics.hpp"
#include "mpcpen/parallel.hpp"

namespace mpcpen {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t(out[0]) << 32) | out[1];
}

void score_family(const Family& f, const std::vector<ModelParams>& draws, const PosteriorSamples& s,
                  const CvConfig& cfg, SplitResult& out) {
  std::vector<double> v(draws.size());
  for (const auto& ind : f.members) {
    if (ind.is_proband || ind.genotype == GenotypeObs::Missing) continue;
    const int g = ind.genotype == GenotypeObs::Carrier ? 1 : 0;
    for (auto [sc, res] : {std::pair{RiskScenario::AffectedVsUnaffected, &out.affected},
                           std::pair{RiskScenario::SpcVsMpc, &out.mpc}}) {
      auto w = risk_window(ind, sc, s.t_max, cfg.horizon);
      if (!w) {
        // SPC/MPC only concerns affected members
        if (sc == RiskScenario::AffectedVsUnaffected || !ind.onset_ages.empty()) ++res->excluded;
        continue;
      }
      for (std::size_t d = 0; d < draws.size(); ++d)
        v[d] = window_penetrance(g, ind.sex, w->t1, w->start, w->width, draws[d], s.frailty_mode,
                                 s.t_max);
      res->ids.push_back(f.family_id + "/" + ind.id);
      res->scores.push_back(median(v));
      res->labels.push_back(w->label);
    }
  }
}

void finish(ScenarioResult& r) {
  const bool pos = std::find(r.labels.begin(), r.labels.end(), 1) != r.labels.end();
  const bool neg = std::find(r.labels.begin(), r.labels.end(), 0) != r.labels.end();
  r.defined = pos && neg;
  if (r.defined) r.roc = roc_auc(r.scores, r.labels);
  else r.roc.auc = std::numeric_limits<double>::quiet_NaN();
}

double median_auc(const std::vector<SplitResult>& splits, ScenarioResult SplitResult::*which) {
  std::vector<double> aucs;
  for (const auto& s : splits)
    if ((s.*which).defined) aucs.push_back((s.*which).roc.auc);
  return aucs.empty() ? std::numeric_limits<double>::quiet_NaN() : median(aucs);
}

}  // namespace

std::vector<int> assign_folds(std::size_t n_families, int folds, std::uint64_t seed, int split) {
  std::vector<std::size_t> order(n_families);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(split), 0xF01D));
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle implementation
  for (std::size_t i = n_families; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  std::vector<int> fold(n_families);
  for (std::size_t pos = 0; pos < n_families; ++pos)
    fold[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  return fold;
}

CvResult cross_validate(const FamilySet& fs, const CvConfig& cfg) {
  if (cfg.folds < 1) throw std::invalid_argument("folds must be >= 1");
  if (cfg.splits < 1) throw std::invalid_argument("splits must be >= 1");
  if (static_cast<std::size_t>(cfg.folds) > fs.families.size())
    throw std::invalid_argument("folds (" + std::to_string(cfg.folds) + ") exceed the number of families (" +
                                std::to_string(fs.families.size()) + ")");
  CvResult result;
  if (cfg.folds == 1)
    result.warnings.push_back("folds = 1: the model is scored on the data it was fitted to");
  result.splits.resize(static_cast<std::size_t>(cfg.splits));

  parallel_for(result.splits.size(), cfg.workers, [&](std::size_t split) {
    const auto fold_of = assign_folds(fs.families.size(), cfg.folds, cfg.seed, static_cast<int>(split));
    SplitResult& out = result.splits[split];
    for (int k = 0; k < cfg.folds; ++k) {
      FamilySet train, test;
      train.t_max = test.t_max = fs.t_max;
      for (std::size_t i = 0; i < fs.families.size(); ++i) {
        const bool held_out = fold_of[i] == k;
        if (held_out) test.families.push_back(fs.families[i]);
        if (!held_out || cfg.folds == 1) train.families.push_back(fs.families[i]);
      }
      ChainConfig chain = cfg.chain;
      chain.seed = derive_seed(cfg.chain.seed, split, static_cast<std::uint64_t>(k));
      if (cfg.workers > 1) chain.workers = 1;
      auto samples = run_chain(train, cfg.covariate_set, cfg.degree, chain, cfg.prior, cfg.model);
      std::vector<ModelParams> draws;
      draws.reserve(samples.size());
      for (std::size_t d = 0; d < samples.size(); ++d) draws.push_back(samples.params_at(d));
      for (const auto& f : test.families) score_family(f, draws, samples, cfg, out);
    }
    finish(out.affected);
    finish(out.mpc);
  });

  result.median_auc_affected = median_auc(result.splits, &SplitResult::affected);
  result.median_auc_mpc = median_auc(result.splits, &SplitResult::mpc);
  return result;
}

}  // namespace mpcpen
