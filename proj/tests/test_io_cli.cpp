#include "catch2/catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>

#include "dvlab/dvlab.hpp"
#include "dvlab/experiments.hpp"
#include "dvlab/io.hpp"

using namespace dvlab;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("dvlab-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("series csv round trip") {
  auto f = DirichletSeries::from_terms(
      12, {{1, Complex(0.25, 0.0)}, {3, Complex(-1.5, 2.0)}, {12, Complex(0.0, -0.125)}});
  auto g = series_from_csv(series_to_csv(f), 12);
  CHECK(g.truncation() == 12);
  f.for_each([&](std::uint64_t n, Complex a) { CHECK(g.coefficient(n) == a); });
  CHECK(series_to_csv(f) == series_to_csv(g));  // byte-stable re-emit
}

TEST_CASE("polydisc csv round trip") {
  PolydiscPolynomial p(2);
  p.add_term({0, 0}, Complex(1.0, 0.0));
  p.add_term({2, 1}, Complex(-0.5, 0.75));
  auto q = polydisc_from_csv(polydisc_to_csv(p), 2);
  CHECK(q.term_count() == 2);
  CHECK(q.coefficient({2, 1}) == Complex(-0.5, 0.75));
}

TEST_CASE("measure json spec round trip") {
  for (const char* spec :
       {R"({"family":"mu_alpha","alpha":1.0})", R"({"family":"nu_gamma","gamma":2.0})",
        R"({"family":"log_square"})"}) {
    auto mu = measure_from_json(nlohmann::json::parse(spec));
    auto back = measure_to_json(mu);
    auto mu2 = measure_from_json(back);
    CHECK(mu2.cache_key() == mu.cache_key());
  }
  auto tab = measure_from_json(nlohmann::json::parse(
      R"({"family":"tabulated","samples":[[0.01,1.0],[0.5,0.8],[1.0,0.1]]})"));
  CHECK(density(tab, 0.5) > 0.0);
  CHECK_THROWS_AS(measure_from_json(nlohmann::json::parse(R"({"family":"nope"})")),
                  std::invalid_argument);
}

TEST_CASE("norm record schema") {
  auto rec = norm_record("h2_norm", 2.5, "error_bound", 0.0, {{"seed", 7}});
  CHECK(rec.at("quantity") == "h2_norm");
  CHECK(rec.at("value") == 2.5);
  CHECK(rec.contains("error_bound"));
  CHECK(rec.at("metadata").at("seed") == 7);
}

TEST_CASE("presets run, pass, and reproduce byte-identical csv bodies") {
  // reduced-size configs keep the determinism check quick; scale lives in
  // the acceptance suite
  const std::map<std::string, nlohmann::json> small = {
      {"exp-weights", {{"closed_form_n", 120}, {"supermultiplicative_m", 24}}},
      {"exp-nu-gamma", {{"series_n", 4000}}},
      {"exp-lacunary", {{"j_max", 3}}},
      {"exp-lp-identity", {{"pairs", 3}, {"samples", 2500}}},
      {"exp-schatten", {{"n_max", 300}}},
      {"exp-compactness", {{"section_n", 256}}},
      {"exp-radicality", {{"polys", 4}, {"centers", 5}}},
      {"exp-functionals", {{"witness_terms", 40000}}},
  };

  for (const auto& [name, knobs] : small) {
    DYNAMIC_SECTION("preset " << name) {
      ExperimentConfig cfg;
      cfg.name = name;
      cfg.seed = 42;
      cfg.extra = knobs;
      cfg.out_dir = fresh_dir(name + "-run1");
      auto res1 = run_experiment(cfg);
      for (const auto& a : res1.assertions) {
        INFO(name << " assertion " << a.name << " details " << a.details.dump());
        CHECK(a.passed);
      }
      REQUIRE_FALSE(res1.output_files.empty());

      // assertions stay within the declared manifest
      const auto& manifest = preset_manifests().at(name);
      for (const auto& a : res1.assertions) {
        CHECK(std::find(manifest.begin(), manifest.end(), a.name) != manifest.end());
      }

      auto dir2 = fresh_dir(name + "-run2");
      cfg.out_dir = dir2;
      auto res2 = run_experiment(cfg);
      for (const auto& file : res1.output_files) {
        const auto p1 = std::filesystem::temp_directory_path() /
                        ("dvlab-" + name + "-run1") / file;
        const auto p2 = dir2 / file;
        REQUIRE(std::filesystem::exists(p1));
        REQUIRE(std::filesystem::exists(p2));
        CHECK(read_file(p1) == read_file(p2));
      }
      CHECK(std::filesystem::exists(cfg.out_dir / "summary.json"));

      std::filesystem::remove_all(std::filesystem::temp_directory_path() /
                                  ("dvlab-" + name + "-run1"));
      std::filesystem::remove_all(dir2);
    }
  }
}

TEST_CASE("cache directory override") {
  auto dir = fresh_dir("cache-env");
  setenv("DVLAB_CACHE_DIR", dir.string().c_str(), 1);
  CHECK(default_cache_dir() == dir);
  auto w = weight_table(AdmissibleMeasure::mu_alpha(0.0), 2, {}, default_cache_dir());
  CHECK(w.size() == 2);
  bool found_cache_file = false;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") found_cache_file = true;
  }
  CHECK(found_cache_file);
  unsetenv("DVLAB_CACHE_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("custom tasks") {
  auto dir = fresh_dir("custom");
  ExperimentConfig cfg;
  cfg.name = "custom";
  cfg.out_dir = dir;
  cfg.truncation = 16;
  cfg.seed = 3;
  cfg.measure = {{"family", "mu_alpha"}, {"alpha", 0.0}};

  cfg.extra = {{"task", "weight-table"}};
  CHECK(run_experiment(cfg).all_passed);
  CHECK(std::filesystem::exists(dir / "weights.csv"));

  cfg.extra = {{"task", "norm"},
               {"kind", "a2mu"},
               {"series", {{2, 1.0, 0.0}, {3, 0.5, -0.25}}}};
  CHECK(run_experiment(cfg).all_passed);
  auto rec = nlohmann::json::parse(read_file(dir / "norm.json"));
  CHECK(rec.at("quantity") == "a2mu_norm");
  CHECK(rec.at("value").get<double>() > 0.0);

  for (const char* kind : {"h2", "a2mu_integral", "hp_mc", "bloch_seminorm"}) {
    cfg.extra = {{"task", "norm"},
                 {"kind", kind},
                 {"series", {{2, 1.0, 0.0}, {6, 0.5, 0.0}}},
                 {"samples", 4096},
                 {"dimension", 2}};
    CHECK(run_experiment(cfg).all_passed);
    auto r = nlohmann::json::parse(read_file(dir / "norm.json"));
    CHECK(r.at("value").get<double>() >= 0.0);
    CHECK((r.contains("error_bound") || r.contains("std_error")));
  }

  cfg.extra = {{"task", "volterra-matrix"}, {"symbol", {{2, 1.0, 0.0}}}};
  CHECK(run_experiment(cfg).all_passed);
  auto matrix_csv = read_file(dir / "finite_section.csv");
  CHECK(matrix_csv.rfind("k,j,re,im\n", 0) == 0);

  cfg.extra = {{"task", "volterra-apply"},
               {"symbol", {{3, 1.0, 0.0}}},
               {"series", {{2, 1.0, 0.0}}}};
  cfg.truncation = 8;
  CHECK(run_experiment(cfg).all_passed);
  auto applied = series_from_csv(read_file(dir / "volterra_apply.csv"));
  CHECK(std::abs(applied.coefficient(6) -
                 Complex(std::log(3.0) / std::log(6.0))) < 1e-15);

  cfg.extra = {{"task", "singular-values"}, {"symbol", {{2, 1.0, 0.0}}}, {"count", 4}};
  cfg.truncation = 8;
  CHECK(run_experiment(cfg).all_passed);
  CHECK(std::filesystem::exists(dir / "singular_values.csv"));

  cfg.extra = {{"task", "carleson"},
               {"series", {{1, 1.0, 0.0}}},
               {"symbol", {{2, 1.0, 0.0}}},
               {"dimension", 1},
               {"samples", 32}};
  CHECK(run_experiment(cfg).all_passed);
  auto car = nlohmann::json::parse(read_file(dir / "carleson.json"));
  CHECK(car.at("ratio").get<double>() == Catch::Approx(0.25).epsilon(1e-6));

  cfg.extra = {{"task", "nope"}};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  ExperimentConfig bad;
  bad.name = "not-a-preset";
  bad.out_dir = dir;
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("umbrella header compiles and exposes the library") {
  // a couple of calls through the single include
  CHECK(dvlab::zeta(2.0) > 1.6);
  CHECK(dvlab::h2_norm(dvlab::DirichletSeries::constant(dvlab::Complex(1.0))) == 1.0);
}
