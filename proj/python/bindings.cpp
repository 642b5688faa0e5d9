#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "mpcpen/cross_validation.hpp"
#include "mpcpen/diagnostics.hpp"
#include "mpcpen/eda.hpp"
#include "mpcpen/penetrance.hpp"
#include "mpcpen/posterior_io.hpp"
#include "mpcpen/simulate.hpp"

namespace py = pybind11;
using namespace mpcpen;

namespace {

std::string pedigree_to_text(const FamilySet& fs) {
  std::ostringstream out;
  PedigreeFormat fmt;
  fmt.t_max = fs.t_max;
  write_pedigree(out, fs, fmt);
  return out.str();
}

FamilySet pedigree_from_text(const std::string& text, double t_max) {
  PedigreeFormat fmt;
  fmt.t_max = t_max;
  return parse_pedigree(std::string_view(text), fmt);
}

std::string posterior_to_text(const PosteriorSamples& s) {
  std::ostringstream out;
  write_posterior_csv(out, s);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian penetrance estimation for multiple primary cancers";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ParseError>(m, "PedigreeParseError", PyExc_ValueError);

  py::enum_<GenotypeObs>(m, "GenotypeObs")
      .value("Wildtype", GenotypeObs::Wildtype)
      .value("Carrier", GenotypeObs::Carrier)
      .value("Missing", GenotypeObs::Missing);

  py::class_<Individual>(m, "Individual")
      .def(py::init<>())
      .def_readwrite("id", &Individual::id)
      .def_readwrite("father_id", &Individual::father_id)
      .def_readwrite("mother_id", &Individual::mother_id)
      .def_readwrite("sex", &Individual::sex)
      .def_readwrite("genotype", &Individual::genotype)
      .def_readwrite("onset_ages", &Individual::onset_ages)
      .def_readwrite("censor_age", &Individual::censor_age)
      .def_readwrite("is_proband", &Individual::is_proband)
      .def("__repr__", [](const Individual& i) { return "<Individual " + i.id + ">"; });

  py::class_<Family>(m, "Family")
      .def(py::init<>())
      .def_readwrite("family_id", &Family::family_id)
      .def_readwrite("members", &Family::members)
      .def("__len__", [](const Family& f) { return f.members.size(); });

  py::class_<FamilySet>(m, "FamilySet")
      .def(py::init<>())
      .def_readwrite("families", &FamilySet::families)
      .def_readwrite("t_max", &FamilySet::t_max)
      .def("__len__", [](const FamilySet& fs) { return fs.families.size(); })
      .def("to_csv", &pedigree_to_text, "Serialize in the pedigree CSV format");

  m.def("parse_pedigree", &pedigree_from_text, py::arg("text"), py::arg("t_max") = 100.0,
        "Parse pedigree CSV text");
  m.def("read_pedigree", [](const std::string& path, double t_max) {
        PedigreeFormat fmt;
        fmt.t_max = t_max;
        return read_pedigree_file(path, fmt);
      }, py::arg("path"), py::arg("t_max") = 100.0);
  m.def("validate_family", [](const Family& f) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate_family(f).violations)
          out.emplace_back(std::string(to_string(v.kind)), v.message);
        return out;
      }, "List of (kind, message) violations; empty when the family can be peeled");
  m.def("normalize_age", &normalize_age, py::arg("age"), py::arg("t_max"));

  m.def("founder_prior", &founder_prior, py::arg("psi_A"));
  m.def("transmission_prob", [](int child, int father, int mother) {
        return transmission_prob(static_cast<Genotype3>(child), static_cast<Genotype3>(father),
                                 static_cast<Genotype3>(mother));
      }, py::arg("child"), py::arg("father"), py::arg("mother"),
      "Genotypes coded 0 = aa, 1 = Aa, 2 = AA");

  py::enum_<CovariateSet>(m, "CovariateSet")
      .value("M1", CovariateSet::M1)
      .value("M2", CovariateSet::M2)
      .value("M3", CovariateSet::M3)
      .value("M4", CovariateSet::M4)
      .value("M5", CovariateSet::M5);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_static("initial", &ModelParams::initial, py::arg("covariate_set"), py::arg("degree") = 5)
      .def_readwrite("covariate_set", &ModelParams::covariate_set)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("phi", &ModelParams::phi);

  py::class_<CovariateSchedule>(m, "CovariateSchedule")
      .def(py::init([](int g, int s, double t1) { return CovariateSchedule{g, s, t1}; }), py::arg("g"),
           py::arg("s"), py::arg("t1") = std::numeric_limits<double>::infinity())
      .def_readwrite("g", &CovariateSchedule::g)
      .def_readwrite("s", &CovariateSchedule::s)
      .def_readwrite("t1", &CovariateSchedule::t1);

  m.def("baseline_intensity", [](double t, std::vector<double> gamma) { return baseline_intensity(t, gamma); });
  m.def("cumulative_baseline", [](double t, std::vector<double> gamma) { return cumulative_baseline(t, gamma); });
  m.def("intensity", &intensity, py::arg("t"), py::arg("sched"), py::arg("xi"), py::arg("params"));
  m.def("cumulative_intensity", &cumulative_intensity, py::arg("a"), py::arg("b"), py::arg("sched"),
        py::arg("xi"), py::arg("params"));

  py::enum_<EventPolicy>(m, "EventPolicy")
      .value("Truncate", EventPolicy::Truncate)
      .value("KeepSaturated", EventPolicy::KeepSaturated);

  py::class_<ModelOptions>(m, "ModelOptions")
      .def(py::init([](double psi_A, bool correction, EventPolicy policy) {
             ModelOptions o;
             o.ascertainment.psi_A = psi_A;
             o.ascertainment.correction_enabled = correction;
             o.event_policy = policy;
             return o;
           }),
           py::arg("psi_A") = 0.0006, py::arg("correction") = true, py::arg("event_policy") = EventPolicy::Truncate)
      .def_property("psi_A", [](const ModelOptions& o) { return o.ascertainment.psi_A; },
                    [](ModelOptions& o, double v) { o.ascertainment.psi_A = v; })
      .def_property("correction", [](const ModelOptions& o) { return o.ascertainment.correction_enabled; },
                    [](ModelOptions& o, bool v) { o.ascertainment.correction_enabled = v; })
      .def_readwrite("event_policy", &ModelOptions::event_policy);

  m.def("family_loglik", [](const Family& f, double xi, const ModelParams& p, const ModelOptions& opt,
                            double t_max) { return family_loglik_acj(f, xi, p, opt, t_max); },
        py::arg("family"), py::arg("xi"), py::arg("params"), py::arg("options") = ModelOptions{},
        py::arg("t_max") = 100.0, "Ascertainment-corrected family log-likelihood");
  m.def("total_loglik", [](const FamilySet& fs, std::vector<double> xi, const ModelParams& p,
                           const ModelOptions& opt) { return total_loglik(fs, xi, p, opt); },
        py::arg("families"), py::arg("frailties"), py::arg("params"), py::arg("options") = ModelOptions{});

  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init<>())
      .def_readwrite("beta_sd", &PriorConfig::beta_sd)
      .def_readwrite("gamma_shape", &PriorConfig::gamma_shape)
      .def_readwrite("gamma_rate", &PriorConfig::gamma_rate)
      .def_readwrite("phi_shape", &PriorConfig::phi_shape)
      .def_readwrite("phi_rate", &PriorConfig::phi_rate);

  py::class_<ChainConfig>(m, "ChainConfig")
      .def(py::init([](long iterations, long burn_in, long thinning, std::uint64_t seed, bool frailty) {
             ChainConfig c;
             c.iterations = iterations;
             c.burn_in = burn_in;
             c.thinning = thinning;
             c.seed = seed;
             c.frailty_mode = frailty;
             return c;
           }),
           py::arg("iterations") = 100000, py::arg("burn_in") = 5000, py::arg("thinning") = 1,
           py::arg("seed") = 1, py::arg("frailty") = true)
      .def_readwrite("iterations", &ChainConfig::iterations)
      .def_readwrite("burn_in", &ChainConfig::burn_in)
      .def_readwrite("thinning", &ChainConfig::thinning)
      .def_readwrite("seed", &ChainConfig::seed)
      .def_readwrite("frailty_mode", &ChainConfig::frailty_mode)
      .def_readwrite("workers", &ChainConfig::workers);

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def("__len__", &PosteriorSamples::size)
      .def_readonly("covariate_set", &PosteriorSamples::covariate_set)
      .def_readonly("degree", &PosteriorSamples::degree)
      .def_readonly("frailty_mode", &PosteriorSamples::frailty_mode)
      .def_readonly("t_max", &PosteriorSamples::t_max)
      .def("column_names", &PosteriorSamples::column_names)
      .def("column", &PosteriorSamples::column, py::arg("name"))
      .def("params_at", &PosteriorSamples::params_at, py::arg("draw"))
      .def("acceptance", [](const PosteriorSamples& s) {
        std::map<std::string, double> out;
        for (const auto& a : s.acceptance) out[a.block] = a.rate();
        return out;
      })
      .def("to_csv", &posterior_to_text);

  m.def("run_chain", [](const FamilySet& fs, CovariateSet set, int degree, const ChainConfig& cfg,
                        const PriorConfig& prior, const ModelOptions& opt) {
        py::gil_scoped_release release;
        return run_chain(fs, set, degree, cfg, prior, opt);
      }, py::arg("families"), py::arg("covariate_set") = CovariateSet::M4, py::arg("degree") = 5,
      py::arg("config") = ChainConfig{}, py::arg("prior") = PriorConfig{}, py::arg("options") = ModelOptions{});

  m.def("dic", [](const PosteriorSamples& s, const FamilySet& fs, const ModelOptions& opt) {
        auto d = dic(s, fs, opt);
        return py::dict(py::arg("mean_deviance") = d.mean_deviance, py::arg("deviance_at_mean") = d.deviance_at_mean,
                        py::arg("p_d") = d.p_d, py::arg("dic") = d.dic);
      }, py::arg("samples"), py::arg("families"), py::arg("options") = ModelOptions{});

  m.def("penetrance_point", [](int g, int s, int k, double t_k, double w, const ModelParams& p, bool frailty,
                               double t_max) {
        PenetranceQuery q{g, s, k, t_k, {}};
        return penetrance_point(q, w, p, frailty, t_max);
      }, py::arg("g"), py::arg("s"), py::arg("k"), py::arg("t_k"), py::arg("w"), py::arg("params"),
      py::arg("frailty") = true, py::arg("t_max") = 100.0);
  m.def("penetrance_curve", [](int g, int s, int k, double t_k, std::vector<double> w, const PosteriorSamples& smp) {
        PenetranceQuery q{g, s, k, t_k, std::move(w)};
        auto c = penetrance_curve(q, smp);
        return py::dict(py::arg("w") = c.w, py::arg("median") = c.median, py::arg("lower") = c.lower,
                        py::arg("upper") = c.upper);
      }, py::arg("g"), py::arg("s"), py::arg("k"), py::arg("t_k"), py::arg("w"), py::arg("samples"));

  m.def("roc_auc", [](std::vector<double> scores, std::vector<int> labels) {
        auto r = roc_auc(scores, labels);
        return py::dict(py::arg("fpr") = r.fpr, py::arg("tpr") = r.tpr, py::arg("auc") = r.auc);
      }, py::arg("scores"), py::arg("labels"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_families", &SimConfig::n_families)
      .def_readwrite("proband_carrier_prob", &SimConfig::proband_carrier_prob)
      .def_readwrite("beta1", &SimConfig::beta1)
      .def_readwrite("beta2", &SimConfig::beta2)
      .def_readwrite("baseline_rate", &SimConfig::baseline_rate)
      .def_readwrite("phi", &SimConfig::phi)
      .def_readwrite("frailty", &SimConfig::frailty)
      .def_readwrite("censor_rate", &SimConfig::censor_rate)
      .def_readwrite("genotype_missing_frac", &SimConfig::genotype_missing_frac)
      .def_readwrite("t_max", &SimConfig::t_max)
      .def_readwrite("seed", &SimConfig::seed);

  m.def("simulate_dataset", [](const SimConfig& cfg) {
        auto sim = simulate_dataset(cfg);
        return py::make_tuple(sim.data, sim.xi, sim.carriers);
      }, py::arg("config") = SimConfig{}, "Returns (families, frailties, true carrier status)");

  m.def("km_estimator", [](std::vector<double> times, std::vector<int> events) {
        auto km = km_estimator(times, events);
        return py::dict(py::arg("time") = km.time, py::arg("survival") = km.survival,
                        py::arg("variance") = km.variance);
      }, py::arg("times"), py::arg("events"));

  m.def("ipcw_kendall_tau", [](const std::vector<std::tuple<double, double, int, int>>& rows) {
        std::vector<GapPair> pairs;
        for (const auto& [x, y, dx, dy] : rows) pairs.push_back({x, y, dx, dy});
        auto k = ipcw_kendall_tau(pairs);
        return py::dict(py::arg("tau") = k.tau, py::arg("se") = k.se,
                        py::arg("orderable_pairs") = k.orderable_pairs, py::arg("dropped_pairs") = k.dropped_pairs);
      }, py::arg("pairs"), "pairs: (x_tilde, y_tilde, delta_x, delta_y) per subject");
}
