#pragma once

#include "cdc/core.hpp"
#include "cdc/placement.hpp"
#include "cdc/shuffle.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace cdc {

inline constexpr const char* digest_version = "cdc-digest-v1";

/// 128-bit reduce output.
using Digest = std::array<std::uint64_t, 2>;

std::string to_hex(const Digest& d);

/// Synthetic intermediate values: v_{q,n} is a keyed hash of (seed, q, n) truncated to
/// T_bits, identical across machines and runs.
class SyntheticDataset {
 public:
  SyntheticDataset(const JobSpec& spec, std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  int value_bytes() const { return value_bytes_; }

  void fill(int q, int n, std::span<std::uint8_t> out) const;
  Bytes value(int q, int n) const;
  ValueStore all_values() const;

 private:
  std::uint64_t seed_;
  int q_;
  int n_;
  int value_bytes_;
};

/// Order-dependent 128-bit accumulator over v_{q,1..N}, absorbed in ascending n.
class DigestAccumulator {
 public:
  void absorb(std::span<const std::uint8_t> value);
  Digest finish() const;

 private:
  std::uint64_t lo_ = 0x6a09e667f3bcc908ULL;
  std::uint64_t hi_ = 0xbb67ae8584caa73bULL;
  std::uint64_t count_ = 0;
};

struct RunResult {
  LoadReport report;
  std::map<int, Digest> outputs;
  bool oracle_match = false;
  Mode mode = Mode::sequential;
  std::optional<std::string> failure;  // set when the scheme could not be executed

  const Rational& total_time() const { return report.total(mode); }
};

struct RunOptions {
  std::ostream* trace = nullptr;  // one JSON object per shuffle message
};

/// Map -> Shuffle -> Reduce on synthetic data. Loads are measured from the work done and
/// bytes sent; times follow the linear cost model. Invalid schemes come back with
/// `failure` set rather than throwing.
RunResult run(const JobSpec& spec, const Placement& placement, const ShufflePlan& plan, std::uint64_t seed, Mode mode,
              const RunOptions& options = {});

RunResult run(const SchemeLayout& layout, const ShufflePlan& plan, std::uint64_t seed, Mode mode,
              const RunOptions& options = {});

/// Every output computed directly from all Q N values.
std::map<int, Digest> centralized_oracle(const JobSpec& spec, std::uint64_t seed);

}  // namespace cdc
