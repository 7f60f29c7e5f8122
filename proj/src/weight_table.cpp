#include "biquant/weight_table.hpp"

#include "biquant/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace biquant {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string entry_line(const WeightEntry& e) {
  return e.key + ' ' + fmt(e.value) + ' ' + fmt(e.std_err) + ' ' + std::to_string(e.samples) + ' ' + fmt(e.eps);
}

WeightEntry parse_entry(const std::string& line) {
  std::istringstream in(line);
  WeightEntry e;
  std::string value, err, eps;
  if (!(in >> e.key >> value >> err >> e.samples >> eps)) throw IoError("weight table: malformed line: " + line);
  std::string extra;
  if (in >> extra) throw IoError("weight table: trailing fields: " + line);
  try {
    e.value = std::stod(value);
    e.std_err = std::stod(err);
    e.eps = std::stod(eps);
  } catch (const std::exception&) {
    throw IoError("weight table: bad number in: " + line);
  }
  if (!std::isfinite(e.value) || !(e.std_err >= 0) || e.samples < 0 || !(e.eps >= 0))
    throw IoError("weight table: out-of-range field in: " + line);
  return e;
}

}  // namespace

void WeightTable::add(const WeightEntry& e) { rows_[{e.key, e.eps}] = e; }

const WeightEntry* WeightTable::find(std::string_view key, double eps) const {
  const auto it = rows_.find({std::string(key), eps});
  return it == rows_.end() ? nullptr : &it->second;
}

std::vector<double> WeightTable::eps_values() const {
  std::set<double> s;
  for (const auto& [k, e] : rows_) s.insert(k.second);
  return {s.begin(), s.end()};
}

std::vector<WeightEntry> WeightTable::entries() const {
  std::vector<WeightEntry> out;
  for (const auto& [k, e] : rows_) out.push_back(e);
  return out;
}

void WeightTable::merge(const WeightTable& o) {
  if (o.family_ != family_) throw ValidationError("weight tables from different propagator profiles: " + family_ + " vs " + o.family_);
  for (const auto& [k, e] : o.rows_) rows_[k] = e;
}

std::string to_text(const WeightTable& t) {
  std::string out = std::string("# ") + kWeightTableVersion + "\n# family " + t.family() + "\n# seed " +
                    std::to_string(t.seed()) + "\n";
  for (const auto& e : t.entries()) out += entry_line(e) + '\n';
  return out;
}

WeightTable parse_weight_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, family;
  std::uint64_t seed = 0;
  bool versioned = false, seeded = false;
  std::vector<WeightEntry> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string tag, rest;
      h >> tag;
      std::getline(h >> std::ws, rest);
      if (tag == kWeightTableVersion) versioned = true;
      else if (tag == "family") family = rest;
      else if (tag == "seed") {
        try {
          seed = std::stoull(rest);
        } catch (const std::exception&) {
          throw IoError("weight table: bad seed line");
        }
        seeded = true;
      }
      continue;  // other comment lines are ignored
    }
    rows.push_back(parse_entry(line));
  }
  if (!versioned || family.empty() || !seeded) throw IoError("weight table: missing version, family or seed header");
  WeightTable t(family, seed);
  for (const auto& e : rows) {
    if (t.find(e.key, e.eps)) throw IoError("weight table: duplicate entry for " + e.key);
    t.add(e);
  }
  return t;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

WeightTable read_weight_table(const std::filesystem::path& path) { return parse_weight_table(read_text_file(path)); }

std::optional<WeightCache> WeightCache::from_env() {
  const char* dir = std::getenv("BIQUANT_CACHE_DIR");
  if (!dir || !*dir) return std::nullopt;
  return WeightCache(dir);
}

std::filesystem::path WeightCache::file_for(const std::string& family, long long samples, std::uint64_t seed) const {
  char name[64];
  std::snprintf(name, sizeof name, "w-%016llx-%lld-%llu.txt", static_cast<unsigned long long>(fnv1a(family)), samples,
                static_cast<unsigned long long>(seed));
  return dir_ / name;
}

std::optional<WeightEntry> WeightCache::lookup(const std::string& family, long long samples, std::uint64_t seed,
                                               const std::string& key, double eps) const {
  const auto path = file_for(family, samples, seed);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const WeightTable t = read_weight_table(path);
  if (t.family() != family || t.seed() != seed) return std::nullopt;  // hash collision
  const WeightEntry* e = t.find(key, eps);
  if (!e) return std::nullopt;
  return *e;
}

void WeightCache::store(const std::string& family, long long samples, std::uint64_t seed, const WeightEntry& e) const {
  std::filesystem::create_directories(dir_);
  const auto path = file_for(family, samples, seed);
  WeightTable t(family, seed);
  if (std::filesystem::exists(path)) {
    WeightTable old = read_weight_table(path);
    if (old.family() == family) t = std::move(old);
  }
  t.add(e);
  // Write to a temporary name first so a crash never leaves a truncated table.
  const auto tmp = path.string() + ".tmp";
  write_text_file(tmp, to_text(t));
  std::filesystem::rename(tmp, path);
}

WeightTable compute_weight_table(std::span<const AdmissibleGraph> graphs, const PropagatorParams& prm, const McOptions& mc,
                                 std::span<const double> eps_schedule, const WeightCache* cache) {
  if (eps_schedule.empty()) throw ValidationError("empty eps schedule");
  const std::string family = prm.family_id();
  WeightTable table(family, mc.seed);

  std::map<std::string, AdmissibleGraph> shapes;
  for (const auto& g : graphs) shapes.emplace(shape_key(g), shape_of(g));

  const auto coef = extrapolation_coefficients(eps_schedule);
  for (const auto& [key, shape] : shapes) {
    // Each shape gets its own stream so that errors of different weights are independent.
    McOptions o = mc;
    o.seed = derived_seed(mc.seed, fnv1a(key));
    double extra = 0, var = 0;
    long long total = 0;
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
      PropagatorParams p = prm;
      p.eps = eps_schedule[i];
      std::optional<WeightEntry> hit;
      if (cache) hit = cache->lookup(family, mc.samples, mc.seed, key, p.eps);
      WeightEntry e;
      if (hit) {
        e = *hit;
      } else {
        McOptions oi = o;
        // Seeded by the ε value, not its position, so cached entries stay valid across schedules.
        oi.seed = derived_seed(o.seed, std::bit_cast<std::uint64_t>(p.eps));
        const WeightEstimate w = weight(shape, p, oi);
        e = {key, w.value, w.std_err, w.samples, p.eps};
        if (cache) cache->store(family, mc.samples, mc.seed, e);
      }
      table.add(e);
      extra += coef[i] * e.value;
      var += coef[i] * coef[i] * e.std_err * e.std_err;
      total += e.samples;
    }
    if (eps_schedule.size() > 1) table.add({key, extra, std::sqrt(var), total, 0.0});
  }
  return table;
}

}  // namespace biquant
