#pragma once

#include "biquant/graph.hpp"
#include "biquant/propagator.hpp"
#include "biquant/weight.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biquant {

inline constexpr const char* kWeightTableVersion = "weight-table/1";

// One line `canonical_key value stderr samples eps`. Keys are shape keys; eps = 0 marks the
// extrapolated value. samples = 0 with stderr = 0 marks a value known without sampling.
struct WeightEntry {
  std::string key;
  double value = 0;
  double std_err = 0;
  long long samples = 0;
  double eps = 0;
};

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(std::string family, std::uint64_t seed) : family_(std::move(family)), seed_(seed) {}

  const std::string& family() const { return family_; }
  std::uint64_t seed() const { return seed_; }

  // Replaces an existing entry with the same (key, eps).
  void add(const WeightEntry& e);
  const WeightEntry* find(std::string_view key, double eps) const;
  std::vector<double> eps_values() const;  // ascending, distinct
  std::vector<WeightEntry> entries() const;  // sorted by (key, eps)
  bool empty() const { return rows_.empty(); }

  // Merges another table; throws ValidationError on a different family.
  void merge(const WeightTable& o);

 private:
  std::string family_;
  std::uint64_t seed_ = 0;
  std::map<std::pair<std::string, double>, WeightEntry> rows_;
};

// Header lines start with '#': "# weight-table/1", "# family <id>", "# seed <n>".
std::string to_text(const WeightTable& t);
WeightTable parse_weight_table(std::string_view text);
WeightTable read_weight_table(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Disk cache keyed by (key, family, ε, samples, seed). One file per (family, samples, seed).
class WeightCache {
 public:
  explicit WeightCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  // Directory from BIQUANT_CACHE_DIR, if set and non-empty.
  static std::optional<WeightCache> from_env();

  std::optional<WeightEntry> lookup(const std::string& family, long long samples, std::uint64_t seed,
                                    const std::string& key, double eps) const;
  void store(const std::string& family, long long samples, std::uint64_t seed, const WeightEntry& e) const;

 private:
  std::filesystem::path file_for(const std::string& family, long long samples, std::uint64_t seed) const;
  std::filesystem::path dir_;
};

// Weights of the shapes of the given graphs at every ε of the schedule plus the
// extrapolation (eps = 0). Each shape is integrated once; entries come from the cache when present.
WeightTable compute_weight_table(std::span<const AdmissibleGraph> graphs, const PropagatorParams& prm, const McOptions& mc,
                                 std::span<const double> eps_schedule, const WeightCache* cache = nullptr);

}  // namespace biquant
