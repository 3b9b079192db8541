#pragma once

#include "json.hpp"

#include "dvlab/measure.hpp"

namespace dvlab {

inline nlohmann::json measure_to_json(const AdmissibleMeasure& mu) {
  nlohmann::json j;
  switch (mu.family()) {
    case MeasureFamily::MuAlpha:
      j["family"] = "mu_alpha";
      j["alpha"] = mu.alpha();
      break;
    case MeasureFamily::NuGamma:
      j["family"] = "nu_gamma";
      j["gamma"] = mu.gamma();
      break;
    case MeasureFamily::LogSquare:
      j["family"] = "log_square";
      break;
    case MeasureFamily::Tabulated:
      j["family"] = "tabulated";
      break;
  }
  return j;
}

inline AdmissibleMeasure measure_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "mu_alpha") return AdmissibleMeasure::mu_alpha(j.at("alpha").get<double>());
  if (family == "nu_gamma") return AdmissibleMeasure::nu_gamma(j.at("gamma").get<double>());
  if (family == "log_square") return AdmissibleMeasure::log_square();
  if (family == "tabulated") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : j.at("samples"))
      samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    return AdmissibleMeasure::tabulated(std::move(samples));
  }
  throw std::invalid_argument("measure_from_json: unknown family " + family);
}

}  // namespace dvlab
