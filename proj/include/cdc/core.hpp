#pragma once

#include "cdc/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdc {

enum class Mode { sequential, parallel };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);  // "sequential"/"seq", "parallel"/"par"

/// Problem instance: Q output functions over N input files with the Map, Shuffle and
/// Reduce cost constants. Intermediate values are t_bits wide.
struct JobSpec {
  int q = 1;
  int n = 1;
  Rational cm = 1;
  Rational cs = 1;
  Rational cr = 0;
  int t_bits = 64;

  int value_bytes() const { return t_bits / 8; }
  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

/// Throws UsageError unless Q, N >= 1, c_m, c_s > 0, c_r >= 0 and t_bits is a positive multiple of 8.
void validate(const JobSpec& spec);

enum class Stratum { none, plus, minus, solver_only };

std::string to_string(Stratum s);
Stratum parse_stratum(const std::string& s);

/// Identifies a file batch B_{i,A}: the helper that maps it (absent for batches held
/// only by solvers) and the solver set A that also maps it.
struct BatchLabel {
  std::optional<int> helper;
  std::vector<int> solver_set;  // ascending, 1-based
  Stratum stratum = Stratum::none;

  /// "i=<helper>,A=<ids>,stratum=<s>", with i=- when there is no helper.
  std::string key() const;

  friend bool operator==(const BatchLabel&, const BatchLabel&) = default;
};

BatchLabel parse_batch_key(const std::string& key);

struct Batch {
  BatchLabel label;
  std::vector<int> files;  // ascending, 1-based

  friend bool operator==(const Batch&, const Batch&) = default;
};

/// Map and Reduce task assignment over K servers. Server k (1-based) maps map_sets[k-1]
/// and reduces reduce_sets[k-1]. All ids are 1-based and kept ascending.
struct Placement {
  int k = 0;
  std::vector<std::vector<int>> map_sets;
  std::vector<std::vector<int>> reduce_sets;
  std::optional<std::vector<Batch>> batch_index;

  const std::vector<int>& map_set(int server) const { return map_sets.at(server - 1); }
  const std::vector<int>& reduce_set(int server) const { return reduce_sets.at(server - 1); }

  friend bool operator==(const Placement&, const Placement&) = default;
};

enum class ViolationKind {
  server_count,
  file_out_of_range,
  function_out_of_range,
  duplicate_entry,
  file_unmapped,
  function_unreduced,
  function_reduced_twice,
  batch_file_out_of_range,
  batch_overlap,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool contains(const std::string& message) const;
};

ValidationReport validate_placement(const JobSpec& spec, const Placement& placement);

/// max_k |M_k| / N. Throws InvalidSchemeError for an inadmissible placement.
Rational peak_load(const JobSpec& spec, const Placement& placement);

struct LoadReport {
  Rational p;
  Rational l;
  Rational t_map;
  Rational t_shuffle;
  Rational t_reduce;
  Rational t_sequential;
  Rational t_parallel;
  std::int64_t bits_sent = 0;

  const Rational& total(Mode m) const { return m == Mode::sequential ? t_sequential : t_parallel; }
  friend bool operator==(const LoadReport&, const LoadReport&) = default;
};

/// Fills the phase times from measured loads with the linear cost model.
LoadReport make_load_report(const JobSpec& spec, const Rational& p, const Rational& l, int max_reduce_count,
                            std::int64_t bits_sent);

}  // namespace cdc
