#include "mpcpen/posterior_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mpcpen {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

}  // namespace

void write_posterior_csv(std::ostream& out, const PosteriorSamples& s) {
  out << "iteration";
  for (const auto& name : s.column_names()) out << ',' << name;
  out << '\n';
  const std::size_t P = s.n_beta(), M = static_cast<std::size_t>(s.degree), I = s.n_families();
  for (std::size_t d = 0; d < s.size(); ++d) {
    out << s.iteration[d];
    for (std::size_t j = 0; j < P; ++j) out << ',' << format_number(s.beta[d * P + j]);
    for (std::size_t m = 0; m < M; ++m) out << ',' << format_number(s.gamma[d * M + m]);
    if (s.frailty_mode) {
      out << ',' << format_number(s.phi[d]);
      for (std::size_t i = 0; i < I; ++i) out << ',' << format_number(s.xi[d * I + i]);
    }
    out << ',' << format_number(s.loglik[d]) << '\n';
  }
}

void write_posterior_file(const std::string& path, const PosteriorSamples& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_posterior_csv(out, s);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

PosteriorSamples read_posterior_csv(std::istream& in, double t_max) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty posterior file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "iteration") throw ParseError(1, "first column must be 'iteration'");

  PosteriorSamples s;
  s.t_max = t_max;
  s.frailty_mode = false;
  std::vector<std::string> beta_names;
  int degree = 0;
  std::size_t phi_col = 0;
  // column kinds: 0 iteration, 1 beta, 2 gamma, 3 phi, 4 xi, 5 loglik
  std::vector<int> kind(header.size(), 0);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("beta_", 0) == 0) {
      kind[c] = 1;
      beta_names.push_back(h.substr(5));
    } else if (h.rfind("gamma_", 0) == 0) {
      kind[c] = 2;
      ++degree;
      if (h != "gamma_" + std::to_string(degree)) throw ParseError(1, "unexpected column '" + h + "'");
    } else if (h == "phi") {
      kind[c] = 3;
      phi_col = c;
      s.frailty_mode = true;
    } else if (h.rfind("xi_", 0) == 0) {
      kind[c] = 4;
      s.family_ids.push_back(h.substr(3));
    } else if (h == "loglik") {
      kind[c] = 5;
    } else {
      throw ParseError(1, "unknown column '" + h + "'");
    }
  }
  if (degree == 0) throw ParseError(1, "no gamma columns");
  if (!s.family_ids.empty() && phi_col == 0) throw ParseError(1, "frailty columns without phi");
  s.degree = degree;

  bool matched = false;
  for (auto set : {CovariateSet::M1, CovariateSet::M2, CovariateSet::M3, CovariateSet::M4,
                   CovariateSet::M5}) {
    auto cov = covariates_of(set);
    if (cov.size() != beta_names.size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < cov.size(); ++j) same = same && covariate_name(cov[j]) == beta_names[j];
    if (same) {
      s.covariate_set = set;
      matched = true;
      break;
    }
  }
  if (!matched) throw ParseError(1, "beta columns do not form a known covariate set");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(cells.size()));
    s.iteration.push_back(static_cast<long>(to_double(cells[0], line_no)));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double v = to_double(cells[c], line_no);
      switch (kind[c]) {
        case 1: s.beta.push_back(v); break;
        case 2: s.gamma.push_back(v); break;
        case 3: s.phi.push_back(v); break;
        case 4: s.xi.push_back(v); break;
        case 5: s.loglik.push_back(v); break;
        default: break;
      }
    }
  }
  return s;
}

PosteriorSamples read_posterior_file(const std::string& path, double t_max) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open posterior file '" + path + "'");
  return read_posterior_csv(in, t_max);
}

}  // namespace mpcpen
