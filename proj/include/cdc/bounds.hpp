#pragma once

#include "cdc/core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

namespace cdc {

/// a[(s, d)]: number of intermediate values available at exactly s servers and needed
/// (but unavailable) at exactly d servers.
struct AvailabilityTable {
  int q = 0;
  int n = 0;
  int k = 0;  // server count the table was taken over (super node counts once)
  std::map<std::pair<int, int>, std::int64_t> a;

  std::int64_t at(int s, int d) const;
  std::int64_t total() const;
};

/// Servers with an empty reduce set are merged into one super node when merge_helpers is set.
AvailabilityTable availability(const Placement& placement, const JobSpec& spec, bool merge_helpers);

/// (1 / QN) sum_{s,d} a[s,d] d / (s + d - 1).
Rational load_lower_bound(const AvailabilityTable& table);

struct BoundReport {
  Rational raw_bound;
  Rational enhanced_bound;
  Rational time_lower_sequential;
  Rational time_lower_parallel;
};

/// Communication bounds plus execution-time lower bounds for a placement in which every
/// server reduces at most one function. Placements with multi-function servers are
/// rejected with InvalidSchemeError; pass them through split_reducers first.
BoundReport time_lower_bounds(const Placement& placement, const JobSpec& spec);

/// Replaces each server reducing q_k > 1 functions by q_k copies with the same map set,
/// one function each. Loads and shuffle cost are unchanged.
Placement split_reducers(const Placement& placement);

struct SearchOptions {
  std::int64_t budget = 200'000'000;  // cap on (2^K - 1)^N * (#reduce assignments), summed over K
  bool prune_symmetry = true;         // pin function q to server q
  int threads = 0;                    // 0: CDC_THREADS or hardware concurrency
};

struct SearchResult {
  Rational minimum;
  Placement witness;
  std::map<int, Rational> minimum_per_k;
  std::int64_t evaluated = 0;
};

/// Exhaustive search over every Map assignment (each file to a nonempty server subset) and
/// every one-function-per-server Reduce assignment for K in [Q, k_max]. Objective:
/// c_m p + c_s enhanced_bound + c_r (sequential) or max{c_m p, c_s enhanced_bound} + c_r
/// (parallel). The witness is a minimizer with the fewest total map tasks. Throws
/// InfeasibleError when the enumeration exceeds options.budget.
SearchResult brute_force_search(const JobSpec& spec, int k_max, Mode mode, const SearchOptions& options = {});

/// Threads to use: CDC_THREADS when set and positive, else hardware concurrency.
int default_thread_count();

}  // namespace cdc
