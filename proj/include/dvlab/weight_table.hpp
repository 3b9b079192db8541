#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvlab/measure.hpp"
#include "dvlab/measure_json.hpp"
#include "dvlab/quadrature.hpp"

namespace dvlab {

/// Directory for persisted tables: DVLAB_CACHE_DIR if set, else .dvlab-cache
/// under the working directory.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("DVLAB_CACHE_DIR")) return {env};
  return std::filesystem::path(".dvlab-cache");
}

namespace detail {

inline std::string weight_cache_name(const AdmissibleMeasure& mu, std::uint64_t n,
                                     const QuadratureConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "weights_" << mu.cache_key() << "_at" << cfg.abs_tol << "_rt" << cfg.rel_tol
     << "_N" << n << ".json";
  return os.str();
}

}  // namespace detail

/// Compute w_1..w_N.  Element n-1 holds bergman_weight(mu, n, cfg).
inline std::vector<double> compute_weight_table(const AdmissibleMeasure& mu,
                                                std::uint64_t n,
                                                const QuadratureConfig& cfg = {}) {
  std::vector<double> w(n);
  const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    w[static_cast<std::size_t>(i)] =
        bergman_weight(mu, static_cast<std::uint64_t>(i) + 1, cfg);
  }
  return w;
}

/// Serialize a table with its provenance header: family, params, tolerances
/// and N, then the weights.  Doubles are emitted with shortest round-trip
/// precision, so reloads are bit-identical.
inline nlohmann::json weight_table_to_json(const AdmissibleMeasure& mu, std::uint64_t n,
                                           const QuadratureConfig& cfg,
                                           const std::vector<double>& w) {
  nlohmann::json spec = measure_to_json(mu);
  nlohmann::json j;
  j["family"] = spec.at("family");
  spec.erase("family");
  j["params"] = spec;
  j["abs_tol"] = cfg.abs_tol;
  j["rel_tol"] = cfg.rel_tol;
  j["N"] = n;
  j["weights"] = w;
  return j;
}

inline void atomic_write_file(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);  // publish complete file or nothing
}

/// Batch of Bergman weights with a disk cache keyed by (family, params,
/// tolerances, N).  A corrupt or mismatched cache file is recomputed and
/// rewritten.
inline std::vector<double> weight_table(const AdmissibleMeasure& mu, std::uint64_t n,
                                        const QuadratureConfig& cfg = {},
                                        const std::filesystem::path& cache_dir =
                                            default_cache_dir()) {
  const std::filesystem::path file = cache_dir / detail::weight_cache_name(mu, n, cfg);
  if (std::filesystem::exists(file)) {
    try {
      std::ifstream in(file, std::ios::binary);
      nlohmann::json j = nlohmann::json::parse(in);
      nlohmann::json spec = measure_to_json(mu);
      const std::string family = spec.at("family");
      spec.erase("family");
      if (j.at("family") == family && j.at("params") == spec && j.at("N") == n &&
          j.at("abs_tol") == cfg.abs_tol && j.at("rel_tol") == cfg.rel_tol &&
          j.at("weights").size() == n) {
        return j.at("weights").get<std::vector<double>>();
      }
    } catch (const std::exception&) {
      // fall through to recompute
    }
  }
  std::vector<double> w = compute_weight_table(mu, n, cfg);
  atomic_write_file(file, weight_table_to_json(mu, n, cfg, w).dump());
  return w;
}

/// In-process store.  Tables are immutable once published; a request for a
/// shorter table reuses any longer one for the same key (weights do not
/// depend on N).
class WeightTableStore {
 public:
  static WeightTableStore& instance() {
    static WeightTableStore store;
    return store;
  }

  std::shared_ptr<const std::vector<double>> get(const AdmissibleMeasure& mu,
                                                 std::uint64_t n,
                                                 const QuadratureConfig& cfg = {}) {
    std::ostringstream key_os;
    key_os.precision(17);
    key_os << mu.cache_key() << "|" << cfg.abs_tol << "|" << cfg.rel_tol;
    const std::string key = key_os.str();
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = tables_.find(key);
      if (it != tables_.end() && it->second->size() >= n) return it->second;
    }
    auto table = std::make_shared<const std::vector<double>>(
        compute_weight_table(mu, n, cfg));
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = tables_[key];
    if (!slot || slot->size() < n) slot = table;
    return slot;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    tables_.clear();
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const std::vector<double>>> tables_;
};

}  // namespace dvlab
