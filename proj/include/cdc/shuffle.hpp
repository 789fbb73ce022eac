#pragma once

#include "cdc/core.hpp"
#include "cdc/placement.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cdc {

using Bytes = std::vector<std::uint8_t>;
using ValueId = std::pair<int, int>;  // (q, n), function first

/// dst ^= src. Throws InvalidSchemeError on a length mismatch.
void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src);

/// Dense Q x N table of intermediate values with a presence mask.
class ValueStore {
 public:
  ValueStore() = default;
  ValueStore(int q, int n, int value_bytes);

  int q() const { return q_; }
  int n() const { return n_; }
  int value_bytes() const { return value_bytes_; }

  bool contains(int q, int n) const { return present_[index(q, n)] != 0; }
  /// Throws InvalidSchemeError when (q, n) is absent.
  std::span<const std::uint8_t> at(int q, int n) const;
  std::span<std::uint8_t> slot(int q, int n);  // marks (q, n) present
  void put(int q, int n, std::span<const std::uint8_t> bytes);
  std::size_t size() const;

 private:
  std::size_t index(int q, int n) const;

  int q_ = 0;
  int n_ = 0;
  int value_bytes_ = 0;
  std::vector<std::uint8_t> data_;
  std::vector<std::uint8_t> present_;
};

/// Per-server copies holding only the values of the files each server maps.
std::vector<ValueStore> local_stores(const Placement& placement, const ValueStore& values);

/// Concatenation of v_{target_fn, n} over `files` (ascending n). Coded groups carry the
/// batch they were drawn from; unicast groups carry a single file and no batch.
struct ValueGroup {
  int target_fn = 0;
  std::vector<int> files;
  std::optional<BatchLabel> batch;

  friend bool operator==(const ValueGroup&, const ValueGroup&) = default;
};

/// xor_of[j] is the group addressed to recipients[j].
struct MulticastMessage {
  int sender = 0;
  std::vector<int> recipients;
  std::vector<ValueGroup> xor_of;
  std::optional<Bytes> payload;

  std::int64_t payload_bytes(int value_bytes) const;
  friend bool operator==(const MulticastMessage&, const MulticastMessage&) = default;
};

struct ShufflePlan {
  int q = 0;
  int n = 0;
  int t_bits = 64;
  bool coded = true;
  std::vector<MulticastMessage> messages;
  Rational predicted_load;  // one charge per message, normalized by Q N T

  std::int64_t total_bits() const;
  friend bool operator==(const ShufflePlan&, const ShufflePlan&) = default;
};

/// Helper i multicasts XOR_{k in S} V_{i, S\{k}, k} for every (r_s+1)-subset S of solvers,
/// per stratum. Strata held only by solvers send nothing. Throws InfeasibleError when the
/// layout carries no batch labels.
ShufflePlan build_coded_plan(const SchemeLayout& layout);

/// One unicast per needed value (q, n), sent by the lowest-id server that mapped n.
ShufflePlan build_uncoded_plan(const SchemeLayout& layout);
ShufflePlan build_uncoded_plan(const JobSpec& spec, const Placement& placement);

/// Fills every payload from the sender's local store. Throws InvalidSchemeError when a
/// sender references a value it did not map or a length disagrees.
ShufflePlan encode(const ShufflePlan& plan, std::span<const ValueStore> stores);

using DecodedValues = std::map<ValueId, Bytes>;

/// Recovers every value server `server` needs ({q in W_k, n not in M_k}) from the encoded
/// messages addressed to it. Throws InvalidSchemeError when a message cannot be decoded or
/// a needed value is never delivered.
DecodedValues decode(int server, const ShufflePlan& encoded, const ValueStore& local, const Placement& placement);

}  // namespace cdc
