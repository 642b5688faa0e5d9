#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/commands.hpp"
#include "mpcpen/pedigree.hpp"

namespace fs = std::filesystem;
using mpcpen::cli::run_cli;

namespace {

const fs::path kRoot = MPCPEN_TEST_TMP;

int run(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "mpcpen");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream captured, err;
  auto* old_out = std::cout.rdbuf(captured.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (out) *out = captured.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// small simulated data set shared by the tests
fs::path dataset() {
  static const fs::path dir = [] {
    const fs::path d = fresh("data");
    REQUIRE(run({"simulate", "--out-dir", d.string(), "--n-families", "8", "--seed", "5",
                 "--carrier-prob", "0.3", "--missing-frac", "0.3"}) == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> short_chain() {
  return {"--iterations", "60", "--burn-in", "20", "--seed", "3", "--degree", "3", "--psi", "0.05", "--workers", "1"};
}

fs::path fitted(const std::string& name, const std::string& covariates) {
  const fs::path out = fresh(name);
  std::vector<std::string> args{"fit", "-i", (dataset() / "pedigree.csv").string(), "-o", out.string(),
                                "--covariates", covariates};
  for (const auto& a : short_chain()) args.push_back(a);
  REQUIRE(run(args) == 0);
  return out;
}

}  // namespace

TEST_CASE("exit codes for the command line") {
  CHECK(run({"--help"}) == 0);
  CHECK(run({"--version"}) == 0);
  CHECK(run({}) == 2);
  CHECK(run({"fit", "--bogus"}) == 2);
  CHECK(run({"fit", "-i", (kRoot / "does_not_exist.csv").string()}) == 2);
  CHECK(run({"simulate", "--n-families", "0"}) == 2);
}

TEST_CASE("simulate writes reproducible files") {
  const fs::path a = fresh("sim_a"), b = fresh("sim_b");
  REQUIRE(run({"simulate", "-o", a.string(), "--n-families", "3", "--seed", "9"}) == 0);
  REQUIRE(run({"simulate", "-o", b.string(), "--n-families", "3", "--seed", "9"}) == 0);
  CHECK(slurp(a / "pedigree.csv") == slurp(b / "pedigree.csv"));
  CHECK(slurp(a / "truth.json") == slurp(b / "truth.json"));
  auto fs = mpcpen::read_pedigree_file((a / "pedigree.csv").string());
  CHECK(fs.families.size() == 3);
  auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["command"] == "simulate");
  CHECK(m["seed"] == 9);
  CHECK(m.contains("wall_time_seconds"));
}

TEST_CASE("options from a configuration file") {
  const fs::path dir = fresh("config");
  {
    std::ofstream ini(dir / "run.ini");
    ini << "[simulate]\nn-families=2\nseed=11\nout-dir=" << (dir / "out").string() << "\n";
  }
  REQUIRE(run({"--config", (dir / "run.ini").string(), "simulate"}) == 0);
  CHECK(mpcpen::read_pedigree_file((dir / "out" / "pedigree.csv").string()).families.size() == 2);
  auto m = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(m["seed"] == 11);
}

TEST_CASE("fit is deterministic and records its configuration") {
  const fs::path a = fitted("fit_a", "M1");
  const fs::path b = fitted("fit_b", "M1");
  CHECK(slurp(a / "posterior.csv") == slurp(b / "posterior.csv"));
  auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["command"] == "fit");
  CHECK(m["draws"] == 40);
  CHECK(m["model"]["covariate_set"] == "M1");
  CHECK(m["acceptance"].contains("phi"));
  const std::string header = slurp(a / "posterior.csv").substr(0, 40);
  CHECK(header.rfind("iteration,beta_G,beta_S,beta_D", 0) == 0);
}

TEST_CASE("invalid pedigrees are usage errors") {
  const fs::path dir = fresh("bad");
  {
    std::ofstream f(dir / "ped.csv");
    f << "family_id,individual_id,father_id,mother_id,sex,genotype,proband,onset_ages,censor_age\n"
      << "1,a,x,y,1,1,1,30,50\n";
  }
  std::vector<std::string> args{"fit", "-i", (dir / "ped.csv").string(), "-o", (dir / "out").string()};
  for (const auto& a : short_chain()) args.push_back(a);
  CHECK(run(args) == 2);
  {
    std::ofstream f(dir / "garbage.csv");
    f << "not,a,pedigree\n1,2\n";
  }
  args[2] = (dir / "garbage.csv").string();
  CHECK(run(args) == 2);
}

TEST_CASE("penetrance, prediction, exploration and model comparison") {
  const fs::path fit = fitted("fit_m1", "M1");
  const fs::path fit2 = fitted("fit_m2", "M2");
  const std::string post = (fit / "posterior.csv").string();
  const std::string ped = (dataset() / "pedigree.csv").string();

  const fs::path pen = fresh("pen");
  REQUIRE(run({"penetrance", "-p", post, "-q", "1,0,0,20", "-q", "0,1,1,30", "-o", pen.string()}) == 0);
  const std::string curve = slurp(pen / "penetrance_g1_s0_k0_t20.csv");
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 52);
  CHECK(fs::exists(pen / "penetrance_g0_s1_k1_t30.csv"));
  CHECK(run({"penetrance", "-p", post, "-q", "1,0,0,80", "-o", pen.string()}) == 2);
  CHECK(run({"penetrance", "-p", post, "-q", "1,0", "-o", pen.string()}) == 2);

  // first genotyped non-proband with a usable window
  auto data = mpcpen::read_pedigree_file(ped);
  std::string fam, ind;
  for (const auto& f : data.families)
    for (const auto& m : f.members)
      if (fam.empty() && !m.is_proband && m.genotype != mpcpen::GenotypeObs::Missing && m.censor_age >= 5) {
        fam = f.family_id;
        ind = m.id;
      }
  REQUIRE_FALSE(fam.empty());
  std::string out;
  REQUIRE(run({"predict", "-p", post, "-i", ped, "--family", fam, "--individual", ind}, &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["risk"].get<double>() >= 0.0);
  CHECK(j["risk"].get<double>() <= 1.0);
  CHECK(run({"predict", "-p", post, "-i", ped, "--family", fam, "--individual", "P"}) == 2);
  CHECK(run({"predict", "-p", post, "-i", ped, "--family", fam, "--individual", "nobody"}) == 2);

  const fs::path eda = fresh("eda");
  REQUIRE(run({"eda", "-i", ped, "-o", eda.string()}) == 0);
  CHECK(fs::exists(eda / "km_first_gap.csv"));
  auto k = nlohmann::json::parse(slurp(eda / "kendall.json"));
  CHECK(k["subjects"] == 8 * 29);

  const fs::path cmp = fresh("dic");
  REQUIRE(run({"dic", "-i", ped, "-p", post, "-p", (fit2 / "posterior.csv").string(), "-o",
               (cmp / "dic.csv").string()}) == 0);
  const std::string table = slurp(cmp / "dic.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  std::istringstream rows(table);
  std::string line;
  std::getline(rows, line);
  std::vector<double> values;
  while (std::getline(rows, line)) values.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  CHECK(values[0] <= values[1]);
}

TEST_CASE("cross-validation outputs") {
  const std::string ped = (dataset() / "pedigree.csv").string();
  const fs::path out = fresh("cv");
  std::vector<std::string> args{"validate", "-i", ped, "-o", out.string(), "--folds", "2", "--splits", "2",
                                "--covariates", "M1"};
  for (const auto& a : short_chain()) args.push_back(a);
  REQUIRE(run(args) == 0);
  auto s = nlohmann::json::parse(slurp(out / "auc_summary.json"));
  CHECK(s["per_split"].size() == 2);
  CHECK(fs::exists(out / "scores_affected_split1.csv"));
  CHECK(fs::exists(out / "roc_mpc_split2.csv"));
  args[6] = "9";
  CHECK(run(args) == 2);
}
