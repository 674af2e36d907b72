#pragma once

// Experiment runner: named commands over the library, JSON/CSV reports with
// explicit checks, and self-verifying fixtures.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vnlab/ap_groups.hpp"
#include "vnlab/combinatorics.hpp"

namespace vnlab::harness {

using json = nlohmann::json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FixtureVerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Json, Csv };

struct ExperimentConfig {
  // One of command_names(), e.g. "k4" or "apgroup.verify".
  std::string command;
  json params = json::object();
  std::uint64_t seed = 0;
  Format format = Format::Json;
  int jobs = 1;
  // Empty means default_fixture_dir().
  std::filesystem::path fixture_dir;
};

struct Check {
  std::string name;
  json expected;
  json got;
  double tol = 0;
  bool pass = false;
};

struct Report {
  std::string command;
  json params = json::object();
  std::uint64_t seed = 0;
  json results = json::array();
  std::vector<Check> checks;
  std::string utc;
  double wall_seconds = 0;

  bool passed() const;
  void check(std::string name, json expected, json got, double tol, bool pass);
  // The timestamp object is the only field that varies between identical runs.
  json to_json(bool with_timestamp = true) const;
  // Results as a table: one row per result object, columns from the first row.
  std::string to_csv() const;
};

const std::vector<std::string>& command_names();
Report run(const ExperimentConfig& config);

// VNLAB_FIXTURES if set, else the fixtures directory of the source tree.
std::filesystem::path default_fixture_dir();
// Accepts a path, a file name inside dir, or a bare name without ".json".
std::filesystem::path resolve_fixture(const std::string& name, const std::filesystem::path& dir);

struct Fixture {
  std::string kind;  // negav_E | sign_vector | slop3_solutions
  json payload;
  json provenance;
  std::string checksum;

  json to_json() const;
};

// FNV-1a 64 of json{kind, payload}.dump(), as 16 hex digits.
std::string fixture_checksum(const std::string& kind, const json& payload);
Fixture make_fixture(std::string kind, json payload, json provenance);
// Checksum and the kind's defining predicate; throws FixtureVerificationFailed.
void verify_fixture(const Fixture& f);
Fixture fixture_from_json(const json& j);
Fixture load_fixture(const std::filesystem::path& path);
void save_fixture(const Fixture& f, const std::filesystem::path& path);

struct NegavFixture {
  std::int64_t d = 0;
  std::vector<std::int64_t> F;
  std::uint64_t seed = 0;
  comb::CyclicSet E;
  std::int64_t good = 0, bad = 0;
  std::int64_t negative_from_N = 0;
  std::int64_t scanned_up_to_N = 0;
};
NegavFixture negav_view(const Fixture& f);

struct SignFixture {
  comb::CyclicSet F;
  comb::SignVector eps;
  std::int64_t X = 0;
  std::vector<std::int64_t> M_values;
};
SignFixture sign_view(const Fixture& f);

std::map<std::int64_t, std::vector<ap::SlopTuple>> slop3_view(const Fixture& f);

// Annealed progression-free F in [1, d/10], then the first E-seed with
// good > 8 bad, then the smallest N from which has_sum stays negative up to
// n_scan.
Fixture build_negav_fixture(std::int64_t d, std::uint64_t set_seed, int iterations,
                            std::uint64_t max_seeds, std::int64_t n_scan);
// F = members, or greedy_progression_free(d, seed) when empty; signs from
// search_negative_X.
Fixture build_sign_vector_fixture(std::int64_t d, std::uint64_t seed, std::uint64_t max_draws,
                                  std::vector<std::int64_t> M_values, std::vector<std::int64_t> members = {});
Fixture build_slop3_fixture(std::vector<std::int64_t> rs);

// fn(i) for i in [0, n) on up to `jobs` threads; results in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs < 1 ? 1 : jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace vnlab::harness
