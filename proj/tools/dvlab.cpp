// dvlab: command-line front end for the Dirichlet-series laboratory.
//
//   dvlab <preset> [--config cfg.json] [--out DIR] [--seed K]
//   dvlab custom --config cfg.json [--out DIR] [--seed K]
//   dvlab list
//
// Exit status is 0 iff every assertion of the run passed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Dirichlet series and Volterra operators"};
  std::string preset;
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  app.add_option("preset", preset,
                 "preset name (see `dvlab list`) or 'custom'")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed override");
  CLI11_PARSE(app, argc, argv);

  if (preset == "list") {
    for (const auto& name : dvlab::preset_names()) std::puts(name.c_str());
    std::puts("custom");
    return 0;
  }

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::fprintf(stderr, "cannot open config %s\n", config_path.c_str());
        return 2;
      }
      j = nlohmann::json::parse(in);
    }
    auto cfg = dvlab::ExperimentConfig::from_json(j);
    cfg.name = preset;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    auto result = dvlab::run_experiment(cfg);
    for (const auto& a : result.assertions) {
      std::printf("[%s] %s\n", a.passed ? "PASS" : "FAIL", a.name.c_str());
    }
    std::printf("%s: %s (outputs in %s)\n", preset.c_str(),
                result.all_passed ? "all assertions passed" : "FAILURES present",
                cfg.out_dir.string().c_str());
    return result.all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
