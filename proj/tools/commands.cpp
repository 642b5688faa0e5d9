#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mpcpen/cross_validation.hpp"
#include "mpcpen/diagnostics.hpp"
#include "mpcpen/eda.hpp"
#include "mpcpen/parallel.hpp"
#include "mpcpen/penetrance.hpp"
#include "mpcpen/posterior_io.hpp"
#include "mpcpen/simulate.hpp"

#ifndef MPCPEN_VERSION
#define MPCPEN_VERSION "unknown"
#endif

namespace mpcpen::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Bad input or configuration, reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelArgs {
  std::string covariates = "M4";
  int degree = 5;
  double psi = 0.0006;
  bool no_correction = false;
  std::string policy = "truncate";
  double t_max = 100.0;

  void add(CLI::App* app, bool fitting) {
    if (fitting) {
      app->add_option("--covariates", covariates, "Covariate set M1..M5")
          ->check(CLI::IsMember({"M1", "M2", "M3", "M4", "M5"}));
      app->add_option("--degree", degree, "Bernstein polynomial degree")->check(CLI::Range(1, 60));
    }
    app->add_option("--psi", psi, "Mutant allele frequency")->check(CLI::Range(0.0, 1.0));
    app->add_flag("--no-correction", no_correction, "Disable the ascertainment correction");
    app->add_option("--event-policy", policy, "Onsets after the second: truncate | keep-saturated")
        ->check(CLI::IsMember({"truncate", "keep-saturated"}));
    app->add_option("--t-max", t_max, "Age (years) mapped to the end of the time axis")
        ->check(CLI::PositiveNumber);
  }

  ModelOptions options() const {
    ModelOptions o;
    o.ascertainment.psi_A = psi;
    o.ascertainment.correction_enabled = !no_correction;
    o.event_policy = parse_event_policy(policy);
    return o;
  }

  json to_json() const {
    return {{"covariate_set", covariates}, {"degree", degree},           {"psi_A", psi},
            {"correction", !no_correction}, {"event_policy", policy},   {"t_max", t_max}};
  }

  // Values not given on the command line are taken from a fit manifest.
  void fill_from(const json& model, const CLI::App* app) {
    if (!model.is_object()) return;
    auto unset = [&](const char* flag) { return app->count(flag) == 0; };
    if (unset("--psi") && model.contains("psi_A")) psi = model["psi_A"].get<double>();
    if (unset("--no-correction") && model.contains("correction"))
      no_correction = !model["correction"].get<bool>();
    if (unset("--event-policy") && model.contains("event_policy"))
      policy = model["event_policy"].get<std::string>();
    if (unset("--t-max") && model.contains("t_max")) t_max = model["t_max"].get<double>();
  }
};

struct ChainArgs {
  ChainConfig chain;
  PriorConfig prior;
  bool no_frailty = false;

  void add(CLI::App* app) {
    app->add_option("--iterations", chain.iterations, "MCMC iterations")->check(CLI::PositiveNumber);
    app->add_option("--burn-in", chain.burn_in, "Iterations discarded before storing draws")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--thin", chain.thinning, "Keep every n-th draw after burn-in")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", chain.seed, "Random seed");
    app->add_flag("--no-frailty", no_frailty, "Fit without family frailties");
    app->add_option("--step-beta", chain.steps.beta, "Random-walk sd for beta")->check(CLI::PositiveNumber);
    app->add_option("--step-gamma", chain.steps.log_gamma, "Log-scale random-walk sd for gamma")
        ->check(CLI::PositiveNumber);
    app->add_option("--step-phi", chain.steps.log_phi, "Log-scale random-walk sd for phi")
        ->check(CLI::PositiveNumber);
    app->add_option("--step-xi", chain.steps.log_xi, "Log-scale random-walk sd for frailties")
        ->check(CLI::PositiveNumber);
    app->add_option("--beta-sd", prior.beta_sd, "Prior sd of beta")->check(CLI::PositiveNumber);
    app->add_option("--gamma-shape", prior.gamma_shape, "Gamma prior shape for gamma_m")
        ->check(CLI::PositiveNumber);
    app->add_option("--gamma-rate", prior.gamma_rate, "Gamma prior rate for gamma_m")
        ->check(CLI::PositiveNumber);
    app->add_option("--phi-shape", prior.phi_shape, "Gamma prior shape for phi")->check(CLI::PositiveNumber);
    app->add_option("--phi-rate", prior.phi_rate, "Gamma prior rate for phi")->check(CLI::PositiveNumber);
  }

  ChainConfig config(int workers) const {
    ChainConfig c = chain;
    c.frailty_mode = !no_frailty;
    c.workers = resolve_workers(workers);
    if (c.burn_in >= c.iterations) throw UsageError("--burn-in must be smaller than --iterations");
    return c;
  }
};

json echo_options(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    const auto& res = opt->results();
    if (res.empty()) {
      j[name] = opt->get_default_str();
    } else if (res.size() == 1) {
      j[name] = res.front();
    } else {
      j[name] = res;
    }
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_manifest(const fs::path& dir, const CLI::App* sub, const json& seed, Clock::time_point start,
                    json extra = json::object()) {
  json m;
  m["command"] = sub->get_name();
  m["version"] = MPCPEN_VERSION;
  m["seed"] = seed;
  m["config"] = echo_options(sub);
  for (auto& [k, v] : extra.items()) m[k] = v;
  m["wall_time_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

json read_manifest_near(const std::string& posterior_path) {
  const fs::path p = fs::path(posterior_path).parent_path() / "manifest.json";
  std::ifstream in(p);
  if (!in) return json();
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return json();
  }
}

FamilySet load_pedigree(const std::string& path, double t_max) {
  PedigreeFormat fmt;
  fmt.t_max = t_max;
  FamilySet fs;
  try {
    fs = read_pedigree_file(path, fmt);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  std::ostringstream problems;
  for (const auto& f : fs.families)
    for (const auto& v : validate_family(f).violations)
      problems << "family " << f.family_id << ": " << to_string(v.kind) << ": " << v.message << "\n";
  if (!problems.str().empty()) throw UsageError("pedigree validation failed\n" + problems.str());
  return fs;
}

std::string fmt(double v) { return format_number(v); }

// --------------------------------------------------------------------------

struct FitCmd {
  std::string input, out_dir = "fit_out";
  ModelArgs model;
  ChainArgs chain;
  int workers = 0;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "Pedigree CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out-dir,-o", out_dir, "Output directory");
    model.add(app, true);
    chain.add(app);
    app->add_option("--workers", workers, "Concurrent family evaluations (0 = all cores)");
  }

  int run(const CLI::App* sub) {
    const auto start = Clock::now();
    const FamilySet fs = load_pedigree(input, model.t_max);
    const ChainConfig cc = chain.config(workers);
    const auto set = parse_covariate_set(model.covariates);
    PosteriorSamples s = run_chain(fs, set, model.degree, cc, chain.prior, model.options());
    make_dir(out_dir);
    write_posterior_file((fs::path(out_dir) / "posterior.csv").string(), s);

    json acc = json::object();
    for (const auto& a : s.acceptance) acc[a.block] = a.rate();
    json summary = json::array();
    for (const auto& r : summarize(s))
      summary.push_back({{"name", r.name},
                         {"mean", r.mean},
                         {"sd", r.sd},
                         {"q025", r.q025},
                         {"median", r.median},
                         {"q975", r.q975},
                         {"mcse", r.mcse},
                         {"split_rhat", r.rhat}});
    json model_json = model.to_json();
    model_json["frailty"] = cc.frailty_mode;
    write_manifest(out_dir, sub, cc.seed, start,
                   {{"model", model_json},
                    {"families", fs.families.size()},
                    {"draws", s.size()},
                    {"acceptance", acc},
                    {"summary", summary}});
    std::cout << "wrote " << s.size() << " draws to " << (fs::path(out_dir) / "posterior.csv").string()
              << "\n";
    for (const auto& r : summarize(s))
      std::cout << "  " << r.name << ": median " << r.median << " [" << r.q025 << ", " << r.q975 << "]\n";
    return kOk;
  }
};

struct SimulateCmd {
  SimConfig cfg;
  std::string out_dir = "sim_out";
  bool no_frailty = false;

  void add(CLI::App* app) {
    app->add_option("--out-dir,-o", out_dir, "Output directory");
    app->add_option("--n-families", cfg.n_families, "Number of ascertained families")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", cfg.seed, "Random seed");
    app->add_option("--carrier-prob", cfg.proband_carrier_prob, "Prior carrier probability of a proband")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--beta1", cfg.beta1, "Carrier log hazard ratio");
    app->add_option("--beta2", cfg.beta2, "Log hazard ratio after a first cancer");
    app->add_option("--baseline-rate", cfg.baseline_rate, "Baseline rate per year")
        ->check(CLI::PositiveNumber);
    app->add_option("--phi", cfg.phi, "Frailty precision")->check(CLI::PositiveNumber);
    app->add_flag("--no-frailty", no_frailty, "Use xi = 1 for every family");
    app->add_option("--censor-rate", cfg.censor_rate, "Rate of the exponential censoring time")
        ->check(CLI::PositiveNumber);
    app->add_option("--missing-frac", cfg.genotype_missing_frac, "Fraction of masked non-proband genotypes")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--t-max", cfg.t_max, "Largest age written (years)")->check(CLI::PositiveNumber);
  }

  int run(const CLI::App* sub) {
    const auto start = Clock::now();
    cfg.frailty = !no_frailty;
    try {
      cfg.check();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const SimulatedData sim = simulate_dataset(cfg);
    make_dir(out_dir);
    std::ostringstream ped;
    PedigreeFormat pf;
    pf.t_max = cfg.t_max;
    write_pedigree(ped, sim.data, pf);
    write_text(fs::path(out_dir) / "pedigree.csv", ped.str());
    write_text(fs::path(out_dir) / "truth.json", truth_json(cfg, sim) + "\n");
    write_manifest(out_dir, sub, cfg.seed, start, {{"families", sim.data.families.size()}});
    std::cout << "wrote " << sim.data.families.size() << " families to "
              << (fs::path(out_dir) / "pedigree.csv").string() << "\n";
    return kOk;
  }
};

PenetranceQuery parse_query(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("bad query '" + text + "' (expected g,sex,k,t_k)");
    }
  }
  if (v.size() != 4) throw UsageError("bad query '" + text + "' (expected g,sex,k,t_k)");
  PenetranceQuery q;
  q.g = static_cast<int>(v[0]);
  q.s = static_cast<int>(v[1]);
  q.k = static_cast<int>(v[2]);
  q.t_k = v[3];
  if (q.g != v[0] || q.s != v[1] || q.k != v[2]) throw UsageError("g, sex and k must be integers: " + text);
  return q;
}

struct PenetranceCmd {
  std::string posterior, out_dir = "penetrance_out";
  std::vector<std::string> queries;
  double w_max = 50.0, w_step = 1.0, lower = 0.025, upper = 0.975, t_max = 100.0;
  int workers = 0;

  void add(CLI::App* app) {
    app->add_option("--posterior,-p", posterior, "Posterior CSV written by fit")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--query,-q", queries, "g,sex,k,t_k (repeatable), e.g. 1,0,1,20")->required();
    app->add_option("--out-dir,-o", out_dir, "Output directory");
    app->add_option("--w-max", w_max, "Largest gap time (years)")->check(CLI::NonNegativeNumber);
    app->add_option("--w-step", w_step, "Gap time step (years)")->check(CLI::PositiveNumber);
    app->add_option("--lower", lower, "Lower credible quantile")->check(CLI::Range(0.0, 1.0));
    app->add_option("--upper", upper, "Upper credible quantile")->check(CLI::Range(0.0, 1.0));
    app->add_option("--t-max", t_max, "Time normalization (default: from the fit manifest)")
        ->check(CLI::PositiveNumber);
    app->add_option("--workers", workers, "Concurrent grid points (0 = all cores)");
  }

  int run(const CLI::App* sub) {
    const auto start = Clock::now();
    const json manifest = read_manifest_near(posterior);
    if (sub->count("--t-max") == 0 && manifest.contains("model")) t_max = manifest["model"]["t_max"].get<double>();
    PosteriorSamples s = read_posterior_file(posterior, t_max);
    if (s.size() == 0) throw UsageError("posterior file '" + posterior + "' has no draws");
    std::vector<double> grid;
    for (long i = 0; i * w_step <= w_max + 1e-9; ++i) grid.push_back(std::min(i * w_step, w_max));
    make_dir(out_dir);
    json files = json::array();
    for (const auto& text : queries) {
      PenetranceQuery q = parse_query(text);
      q.w_grid = grid;
      try {
        q.check(t_max);
      } catch (const std::invalid_argument& e) {
        throw UsageError("query '" + text + "': " + e.what());
      }
      const auto c = penetrance_curve(q, s, lower, upper, resolve_workers(workers));
      std::ostringstream out;
      out << "w,median,lower,upper\n";
      for (std::size_t i = 0; i < c.w.size(); ++i)
        out << fmt(c.w[i]) << ',' << fmt(c.median[i]) << ',' << fmt(c.lower[i]) << ',' << fmt(c.upper[i])
            << '\n';
      const std::string name = "penetrance_g" + std::to_string(q.g) + "_s" + std::to_string(q.s) + "_k" +
                               std::to_string(q.k) + "_t" + fmt(q.t_k) + ".csv";
      write_text(fs::path(out_dir) / name, out.str());
      files.push_back(name);
      std::cout << "wrote " << (fs::path(out_dir) / name).string() << "\n";
    }
    write_manifest(out_dir, sub, nullptr, start,
                   {{"t_max", t_max}, {"frailty", s.frailty_mode}, {"draws", s.size()}, {"files", files}});
    return kOk;
  }
};

RiskScenario parse_scenario(const std::string& s) {
  return s == "mpc" ? RiskScenario::SpcVsMpc : RiskScenario::AffectedVsUnaffected;
}

struct PredictCmd {
  std::string posterior, input, family, individual, scenario = "affected";
  double horizon = 5.0, t_max = 100.0;

  void add(CLI::App* app) {
    app->add_option("--posterior,-p", posterior, "Posterior CSV written by fit")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--input,-i", input, "Pedigree CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--family", family, "Family id")->required();
    app->add_option("--individual", individual, "Individual id")->required();
    app->add_option("--scenario", scenario, "affected (any cancer) or mpc (second cancer)")
        ->check(CLI::IsMember({"affected", "mpc"}));
    app->add_option("--horizon", horizon, "Risk window length (years)")->check(CLI::PositiveNumber);
    app->add_option("--t-max", t_max, "Time normalization (default: from the fit manifest)")
        ->check(CLI::PositiveNumber);
  }

  int run(const CLI::App* sub) {
    const json manifest = read_manifest_near(posterior);
    if (sub->count("--t-max") == 0 && manifest.contains("model")) t_max = manifest["model"]["t_max"].get<double>();
    const FamilySet fs = load_pedigree(input, t_max);
    const Individual* who = nullptr;
    for (const auto& f : fs.families)
      if (f.family_id == family)
        for (const auto& m : f.members)
          if (m.id == individual) who = &m;
    if (!who) throw UsageError("individual " + individual + " not found in family " + family);
    PosteriorSamples s = read_posterior_file(posterior, t_max);
    const auto sc = parse_scenario(scenario);
    double risk = 0.0;
    try {
      risk = five_year_risk(*who, s, sc, horizon);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const auto w = risk_window(*who, sc, t_max, horizon);
    json out = {{"family", family},         {"individual", individual}, {"scenario", scenario},
                {"window_start", w->start}, {"window_end", w->start + w->width},
                {"prior_cancers", w->k},    {"risk", risk}};
    std::cout << out.dump() << "\n";
    return kOk;
  }
};

struct ValidateCmd {
  std::string input, out_dir = "validate_out";
  int folds = 10, splits = 25, workers = 0;
  double horizon = 5.0;
  ModelArgs model;
  ChainArgs chain;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "Pedigree CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out-dir,-o", out_dir, "Output directory");
    app->add_option("--folds", folds, "Folds per split")->check(CLI::PositiveNumber);
    app->add_option("--splits", splits, "Random splits")->check(CLI::PositiveNumber);
    app->add_option("--horizon", horizon, "Risk window length (years)")->check(CLI::PositiveNumber);
    app->add_option("--workers", workers, "Concurrent splits (0 = all cores)");
    model.add(app, true);
    chain.add(app);
  }

  int run(const CLI::App* sub) {
    const auto start = Clock::now();
    const FamilySet fs = load_pedigree(input, model.t_max);
    if (static_cast<std::size_t>(folds) > fs.families.size())
      throw UsageError("--folds (" + std::to_string(folds) + ") exceeds the number of families (" +
                       std::to_string(fs.families.size()) + ")");
    CvConfig cv;
    cv.folds = folds;
    cv.splits = splits;
    cv.seed = chain.chain.seed;
    cv.covariate_set = parse_covariate_set(model.covariates);
    cv.degree = model.degree;
    cv.chain = chain.config(1);
    cv.prior = chain.prior;
    cv.model = model.options();
    cv.horizon = horizon;
    cv.workers = resolve_workers(workers);
    const CvResult r = cross_validate(fs, cv);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";

    make_dir(out_dir);
    json per_split = json::array();
    auto dump = [&](const ScenarioResult& res, const std::string& tag, std::size_t k) {
      const std::string stem = tag + "_split" + std::to_string(k + 1);
      std::ostringstream roc;
      roc << "fpr,tpr\n";
      for (std::size_t i = 0; i < res.roc.fpr.size(); ++i) roc << fmt(res.roc.fpr[i]) << ',' << fmt(res.roc.tpr[i]) << '\n';
      write_text(fs::path(out_dir) / ("roc_" + stem + ".csv"), roc.str());
      std::ostringstream sc;
      sc << "id,score,label\n";
      for (std::size_t i = 0; i < res.scores.size(); ++i)
        sc << res.ids[i] << ',' << fmt(res.scores[i]) << ',' << res.labels[i] << '\n';
      write_text(fs::path(out_dir) / ("scores_" + stem + ".csv"), sc.str());
      json j = {{"n", res.scores.size()}, {"excluded", res.excluded}};
      j["auc"] = res.defined ? json(res.roc.auc) : json(nullptr);
      return j;
    };
    for (std::size_t k = 0; k < r.splits.size(); ++k)
      per_split.push_back({{"split", k + 1},
                           {"affected_vs_unaffected", dump(r.splits[k].affected, "affected", k)},
                           {"spc_vs_mpc", dump(r.splits[k].mpc, "mpc", k)}});
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    json summary = {{"folds", folds},
                    {"splits", splits},
                    {"median_auc_affected_vs_unaffected", num(r.median_auc_affected)},
                    {"median_auc_spc_vs_mpc", num(r.median_auc_mpc)},
                    {"warnings", r.warnings},
                    {"per_split", per_split}};
    write_text(fs::path(out_dir) / "auc_summary.json", summary.dump(2) + "\n");
    write_manifest(out_dir, sub, cv.seed, start, {{"model", model.to_json()}});
    std::cout << "median AUC affected vs unaffected: " << r.median_auc_affected
              << "\nmedian AUC SPC vs MPC: " << r.median_auc_mpc << "\n";
    return kOk;
  }
};

std::string km_csv(const KaplanMeier& km) {
  std::ostringstream out;
  out << "time,survival,variance,at_risk,events\n";
  for (std::size_t i = 0; i < km.time.size(); ++i)
    out << fmt(km.time[i]) << ',' << fmt(km.survival[i]) << ',' << fmt(km.variance[i]) << ','
        << km.at_risk[i] << ',' << km.events[i] << '\n';
  return out.str();
}

struct EdaCmd {
  std::string input, out_dir = "eda_out";
  bool include_probands = false;
  double t_max = 100.0;
  int workers = 0;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "Pedigree CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out-dir,-o", out_dir, "Output directory");
    app->add_flag("--include-probands", include_probands, "Keep probands in the analysis");
    app->add_option("--t-max", t_max, "Largest admissible age (years)")->check(CLI::PositiveNumber);
    app->add_option("--workers", workers, "Concurrent jackknife replicates (0 = all cores)");
  }

  int run(const CLI::App* sub) {
    const auto start = Clock::now();
    const FamilySet fs = load_pedigree(input, t_max);
    const auto pairs = gap_pairs(fs, !include_probands);
    if (pairs.size() < 2) throw UsageError("fewer than two subjects after proband exclusion");
    std::vector<double> x, y;
    std::vector<int> dx, dy;
    for (const auto& p : pairs) {
      x.push_back(p.x_tilde);
      dx.push_back(p.delta_x);
      if (p.delta_x) {
        y.push_back(p.y_tilde);
        dy.push_back(p.delta_y);
      }
    }
    make_dir(out_dir);
    write_text(fs::path(out_dir) / "km_first_gap.csv", km_csv(km_estimator(x, dx)));
    if (!y.empty()) write_text(fs::path(out_dir) / "km_second_gap.csv", km_csv(km_estimator(y, dy)));

    json report = {{"subjects", pairs.size()}, {"probands_excluded", !include_probands}};
    try {
      const auto k = ipcw_kendall_tau(pairs, resolve_workers(workers));
      report["tau"] = k.tau;
      report["jackknife_se"] = k.se;
      report["orderable_pairs"] = k.orderable_pairs;
      report["dropped_zero_weight_pairs"] = k.dropped_pairs;
      std::cout << "Kendall's tau " << k.tau << " (jackknife SE " << k.se << ", " << k.orderable_pairs
                << " orderable pairs)\n";
    } catch (const std::domain_error& e) {
      report["tau"] = nullptr;
      report["orderable_pairs"] = 0;
      std::cout << "Kendall's tau undefined: " << e.what() << "\n";
    }
    write_text(fs::path(out_dir) / "kendall.json", report.dump(2) + "\n");
    write_manifest(out_dir, sub, nullptr, start);
    return kOk;
  }
};

struct DicCmd {
  std::string input, out;
  std::vector<std::string> posteriors;
  ModelArgs model;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "Pedigree CSV the posteriors were fitted to")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--posterior,-p", posteriors, "Posterior CSVs (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--out,-o", out, "Write the table here instead of standard output");
    model.add(app, false);
  }

  int run(const CLI::App* sub) {
    struct Row {
      std::string path, set;
      std::size_t draws;
      DicResult d;
    };
    std::vector<Row> rows;
    for (const auto& path : posteriors) {
      ModelArgs m = model;
      const json manifest = read_manifest_near(path);
      if (manifest.contains("model")) m.fill_from(manifest["model"], sub);
      PosteriorSamples s = read_posterior_file(path, m.t_max);
      if (s.loglik.empty()) throw UsageError(path + ": no loglik column");
      const FamilySet fs = load_pedigree(input, m.t_max);
      rows.push_back({path, std::string(to_string(s.covariate_set)), s.size(), dic(s, fs, m.options())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.d.dic < b.d.dic; });
    std::ostringstream table;
    table << "posterior,covariate_set,draws,mean_deviance,deviance_at_mean,p_d,dic\n";
    for (const auto& r : rows)
      table << r.path << ',' << r.set << ',' << r.draws << ',' << fmt(r.d.mean_deviance) << ','
            << fmt(r.d.deviance_at_mean) << ',' << fmt(r.d.p_d) << ',' << fmt(r.d.dic) << '\n';
    if (out.empty()) {
      std::cout << table.str();
    } else {
      write_text(out, table.str());
      const auto dir = fs::path(out).parent_path();
      write_manifest(dir.empty() ? fs::path(".") : dir, sub, nullptr, Clock::now());
    }
    return kOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Penetrance estimation for multiple primary cancers from family data"};
  app.set_version_flag("--version", MPCPEN_VERSION);
  app.set_config("--config", "", "INI file with one [section] per subcommand");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  FitCmd fit;
  SimulateCmd simulate;
  PenetranceCmd penetrance;
  PredictCmd predict;
  ValidateCmd validate;
  EdaCmd eda;
  DicCmd dic_cmd;
  auto* fit_app = app.add_subcommand("fit", "Sample the posterior for a pedigree file");
  auto* sim_app = app.add_subcommand("simulate", "Generate ascertained synthetic families");
  auto* pen_app = app.add_subcommand("penetrance", "Penetrance curves with credible bands");
  auto* pred_app = app.add_subcommand("predict", "Risk score of one individual");
  auto* val_app = app.add_subcommand("validate", "Cross-validated risk prediction with ROC/AUC");
  auto* eda_app = app.add_subcommand("eda", "Kaplan-Meier curves and IPCW Kendall's tau of gap times");
  auto* dic_app = app.add_subcommand("dic", "Compare fitted models by DIC");
  fit.add(fit_app);
  simulate.add(sim_app);
  penetrance.add(pen_app);
  predict.add(pred_app);
  validate.add(val_app);
  eda.add(eda_app);
  dic_cmd.add(dic_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  }

  try {
    if (fit_app->parsed()) return fit.run(fit_app);
    if (sim_app->parsed()) return simulate.run(sim_app);
    if (pen_app->parsed()) return penetrance.run(pen_app);
    if (pred_app->parsed()) return predict.run(pred_app);
    if (val_app->parsed()) return validate.run(val_app);
    if (eda_app->parsed()) return eda.run(eda_app);
    if (dic_app->parsed()) return dic_cmd.run(dic_app);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace mpcpen::cli
