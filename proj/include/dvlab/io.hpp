#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvlab/dirichlet_series.hpp"
#include "dvlab/measure.hpp"
#include "dvlab/measure_json.hpp"
#include "dvlab/polydisc_polynomial.hpp"
#include "dvlab/weight_table.hpp"

namespace dvlab {

/// Shortest exact decimal for a double; the same bits always print the same
/// bytes, which is what the byte-identical rerun contract needs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Series CSV, columns n,re,im.
inline std::string series_to_csv(const DirichletSeries& f) {
  std::string out = "n,re,im\n";
  f.for_each([&](std::uint64_t n, Complex a) {
    out += std::to_string(n) + "," + format_double(a.real()) + "," +
           format_double(a.imag()) + "\n";
  });
  return out;
}

inline DirichletSeries series_from_csv(const std::string& body,
                                       std::uint64_t truncation = 0) {
  std::istringstream in(body);
  std::string line;
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  std::uint64_t max_n = 1;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("n,", 0) == 0) continue;  // header
    }
    std::uint64_t n;
    double re, im;
    if (std::sscanf(line.c_str(), "%" SCNu64 ",%lf,%lf", &n, &re, &im) != 3)
      throw std::invalid_argument("series_from_csv: bad line: " + line);
    terms.emplace_back(n, Complex(re, im));
    max_n = std::max(max_n, n);
  }
  return DirichletSeries::from_terms(truncation ? truncation : max_n, std::move(terms));
}

/// Polydisc polynomial CSV, columns alpha_1..alpha_d,re,im.
inline std::string polydisc_to_csv(const PolydiscPolynomial& p) {
  std::string out;
  for (int j = 1; j <= p.dimension(); ++j) out += "alpha_" + std::to_string(j) + ",";
  out += "re,im\n";
  for (const auto& [idx, c] : p.terms()) {
    for (std::uint32_t a : idx) out += std::to_string(a) + ",";
    out += format_double(c.real()) + "," + format_double(c.imag()) + "\n";
  }
  return out;
}

inline PolydiscPolynomial polydisc_from_csv(const std::string& body, int dimension) {
  std::istringstream in(body);
  std::string line;
  PolydiscPolynomial p(dimension);
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("alpha_1", 0) == 0) continue;
    }
    std::istringstream ls(line);
    std::string cell;
    PolydiscPolynomial::Index idx;
    for (int j = 0; j < dimension; ++j) {
      if (!std::getline(ls, cell, ','))
        throw std::invalid_argument("polydisc_from_csv: bad line: " + line);
      idx.push_back(static_cast<std::uint32_t>(std::stoul(cell)));
    }
    std::string re_s, im_s;
    if (!std::getline(ls, re_s, ',') || !std::getline(ls, im_s, ','))
      throw std::invalid_argument("polydisc_from_csv: bad line: " + line);
    p.add_term(idx, Complex(std::stod(re_s), std::stod(im_s)));
  }
  return p;
}

/// Record every norm command emits: quantity, value, and either an error
/// bound or a Monte-Carlo standard error, plus reproducibility metadata.
inline nlohmann::json norm_record(const std::string& quantity, double value,
                                  const std::string& error_kind, double error_value,
                                  nlohmann::json metadata = nlohmann::json::object()) {
  nlohmann::json j;
  j["quantity"] = quantity;
  j["value"] = value;
  j[error_kind] = error_value;
  j["metadata"] = std::move(metadata);
  return j;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dvlab
