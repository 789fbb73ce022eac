#include "cdc/bounds.hpp"

#include "cdc/allocator.hpp"
#include "cdc/error.hpp"
#include "cdc/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>
#include <thread>
#include <tuple>
#include <vector>

namespace cdc {

std::int64_t AvailabilityTable::at(int s, int d) const {
  auto it = a.find({s, d});
  return it == a.end() ? 0 : it->second;
}

std::int64_t AvailabilityTable::total() const {
  std::int64_t t = 0;
  for (const auto& [key, count] : a) t += count;
  return t;
}

AvailabilityTable availability(const Placement& placement, const JobSpec& spec, bool merge_helpers) {
  if (auto report = validate_placement(spec, placement); !report.ok()) {
    throw InvalidSchemeError("availability on invalid placement: " + report.violations.front().message);
  }
  std::vector<char> is_reducer(placement.k + 1, 0);
  std::vector<int> reducer_of(spec.q + 1, 0);
  for (int server = 1; server <= placement.k; ++server) {
    for (int fn : placement.reduce_set(server)) {
      is_reducer[server] = 1;
      reducer_of[fn] = server;
    }
  }

  // holders[n]: servers mapping n, merged non-reducers counted once.
  std::vector<int> holders(spec.n + 1, 0);
  std::vector<char> super_holds(spec.n + 1, 0);
  std::vector<std::vector<char>> maps(placement.k + 1, std::vector<char>(spec.n + 1, 0));
  for (int server = 1; server <= placement.k; ++server) {
    for (int n : placement.map_set(server)) {
      maps[server][n] = 1;
      if (merge_helpers && !is_reducer[server]) {
        super_holds[n] = 1;
      } else {
        ++holders[n];
      }
    }
  }
  int non_reducers = 0;
  for (int server = 1; server <= placement.k; ++server) non_reducers += is_reducer[server] ? 0 : 1;

  AvailabilityTable table;
  table.q = spec.q;
  table.n = spec.n;
  table.k = merge_helpers && non_reducers > 0 ? placement.k - non_reducers + 1 : placement.k;
  for (int n = 1; n <= spec.n; ++n) {
    const int s = holders[n] + super_holds[n];
    for (int fn = 1; fn <= spec.q; ++fn) {
      // Disjoint reduce sets: at most one server needs v_{fn,n}.
      const int d = maps[reducer_of[fn]][n] ? 0 : 1;
      ++table.a[{s, d}];
    }
  }
  return table;
}

Rational load_lower_bound(const AvailabilityTable& table) {
  Rational sum = 0;
  for (const auto& [key, count] : table.a) {
    const auto [s, d] = key;
    if (d == 0 || count == 0) continue;
    sum += Rational(count) * make_rational(d, s + d - 1);
  }
  return sum / (static_cast<std::int64_t>(table.q) * table.n);
}

Placement split_reducers(const Placement& placement) {
  Placement out;
  for (int server = 1; server <= placement.k; ++server) {
    const auto& w = placement.reduce_set(server);
    if (w.size() <= 1) {
      out.map_sets.push_back(placement.map_set(server));
      out.reduce_sets.push_back(w);
      continue;
    }
    for (int fn : w) {
      out.map_sets.push_back(placement.map_set(server));
      out.reduce_sets.push_back({fn});
    }
  }
  out.k = static_cast<int>(out.map_sets.size());
  return out;
}

BoundReport time_lower_bounds(const Placement& placement, const JobSpec& spec) {
  for (int server = 1; server <= placement.k; ++server) {
    if (placement.reduce_set(server).size() > 1) {
      throw InvalidSchemeError("server " + std::to_string(server) +
                               " reduces more than one function; apply split_reducers first (same loads, one "
                               "function per server)");
    }
  }
  BoundReport report;
  report.raw_bound = load_lower_bound(availability(placement, spec, false));
  report.enhanced_bound = load_lower_bound(availability(placement, spec, true));

  // Per file: j solvers map it, i = 1 when some non-reducer also maps it.
  std::vector<int> solvers_mapping(spec.n + 1, 0);
  std::vector<char> helper_maps(spec.n + 1, 0);
  std::int64_t solver_work = 0;
  for (int server = 1; server <= placement.k; ++server) {
    const bool solver = !placement.reduce_set(server).empty();
    for (int n : placement.map_set(server)) {
      if (solver) {
        ++solvers_mapping[n];
        ++solver_work;
      } else {
        helper_maps[n] = 1;
      }
    }
  }
  const int q = spec.q;
  Rational seq = 0;
  for (int n = 1; n <= spec.n; ++n) {
    const int j = solvers_mapping[n];
    const int i = helper_maps[n];
    seq += spec.cm * j + spec.cs * make_rational(q - j, j + i);
  }
  const std::int64_t qn = static_cast<std::int64_t>(q) * spec.n;
  report.time_lower_sequential = seq / qn + spec.cr;

  const Rational avg_load = make_rational(solver_work, qn);
  const Rational r_bar = avg_load * q;
  report.time_lower_parallel = std::max(spec.cm * avg_load, spec.cs * conv_envelope(q)(r_bar)) + spec.cr;
  return report;
}

int default_thread_count() {
  if (const char* env = std::getenv("CDC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

namespace {

constexpr int max_search_servers = 16;

std::int64_t saturating_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::int64_t>::max() / b) return std::numeric_limits<std::int64_t>::max();
  return a * b;
}

std::int64_t falling_factorial(int k, int q) {
  std::int64_t v = 1;
  for (int i = 0; i < q; ++i) v = saturating_mul(v, k - i);
  return v;
}

std::vector<std::vector<int>> reduce_assignments(int q, int k, bool prune) {
  // assignment[fn - 1] = 0-based server reducing fn
  std::vector<std::vector<int>> out;
  if (prune) {
    std::vector<int> a(q);
    std::iota(a.begin(), a.end(), 0);
    out.push_back(std::move(a));
    return out;
  }
  std::vector<int> current;
  std::vector<char> used(k, 0);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == q) {
      out.push_back(current);
      return;
    }
    for (int s = 0; s < k; ++s) {
      if (used[s]) continue;
      used[s] = 1;
      current.push_back(s);
      self(self);
      current.pop_back();
      used[s] = 0;
    }
  };
  rec(rec);
  return out;
}

struct Candidate {
  Rational value;
  std::vector<std::uint32_t> masks;  // per file, bit s = server s+1 maps it
  std::size_t reduce_index = 0;
  int work = 0;  // total map tasks; among equal values the leanest placement wins
  bool found = false;
};

// Evaluates every map assignment whose first file mask lies in [first_lo, first_hi).
Candidate search_slice(const JobSpec& spec, int k, Mode mode, const std::vector<std::vector<int>>& reducers,
                       std::uint32_t first_lo, std::uint32_t first_hi, std::int64_t& evaluated) {
  const int n = spec.n;
  const int q = spec.q;
  const std::uint32_t full = (1U << k) - 1;
  // Bound terms are (#missing)/s with s <= K; scale by lcm(1..K) to stay integral.
  std::int64_t scale = 1;
  for (int s = 2; s <= k; ++s) scale = lcm64(scale, s);
  const Rational bound_unit = Rational(1) / (Rational(scale) * q * n);

  Candidate best;
  std::map<std::pair<int, std::int64_t>, Rational> memo;  // (max count, scaled bound numerator)
  std::vector<std::uint32_t> masks(n, 1);
  masks[0] = first_lo;
  std::vector<int> counts(k, 0);

  for (std::size_t ri = 0; ri < reducers.size(); ++ri) {
    const auto& red = reducers[ri];
    std::uint32_t reducer_mask = 0;
    for (int s : red) reducer_mask |= 1U << s;
    const std::uint32_t helper_mask = full & ~reducer_mask;

    std::fill(masks.begin(), masks.end(), 1U);
    masks[0] = first_lo;
    while (true) {
      std::fill(counts.begin(), counts.end(), 0);
      std::int64_t bound_num = 0;
      for (int f = 0; f < n; ++f) {
        const std::uint32_t m = masks[f];
        for (int s = 0; s < k; ++s) counts[s] += (m >> s) & 1U;
        const int holders = std::popcount(m & reducer_mask) + ((m & helper_mask) ? 1 : 0);
        int missing = 0;
        for (int fn = 0; fn < q; ++fn) missing += ((m >> red[fn]) & 1U) ? 0 : 1;
        bound_num += static_cast<std::int64_t>(missing) * (scale / holders);
      }
      const int most = *std::max_element(counts.begin(), counts.end());
      const int work = std::accumulate(counts.begin(), counts.end(), 0);
      ++evaluated;

      auto [it, inserted] = memo.try_emplace({most, bound_num});
      if (inserted) {
        const Rational p = make_rational(most, n);
        const Rational bound = Rational(bound_num) * bound_unit;
        it->second = mode == Mode::sequential ? spec.cm * p + spec.cs * bound + spec.cr
                                              : std::max(spec.cm * p, spec.cs * bound) + spec.cr;
      }
      if (!best.found || it->second < best.value || (it->second == best.value && work < best.work)) {
        best.found = true;
        best.value = it->second;
        best.masks = masks;
        best.reduce_index = ri;
        best.work = work;
      }

      // Odometer over files n-1 .. 1, then the first file within its slice.
      int f = n - 1;
      while (f >= 1 && masks[f] == full) masks[f--] = 1;
      if (f >= 1) {
        ++masks[f];
        continue;
      }
      if (++masks[0] >= first_hi) break;
    }
  }
  return best;
}

Placement witness_placement(int k, const std::vector<std::uint32_t>& masks, const std::vector<int>& reducers) {
  Placement p;
  p.k = k;
  p.map_sets.resize(k);
  p.reduce_sets.resize(k);
  for (std::size_t f = 0; f < masks.size(); ++f) {
    for (int s = 0; s < k; ++s) {
      if ((masks[f] >> s) & 1U) p.map_sets[s].push_back(static_cast<int>(f) + 1);
    }
  }
  for (std::size_t fn = 0; fn < reducers.size(); ++fn) p.reduce_sets[reducers[fn]].push_back(static_cast<int>(fn) + 1);
  return p;
}

}  // namespace

SearchResult brute_force_search(const JobSpec& spec, int k_max, Mode mode, const SearchOptions& options) {
  validate(spec);
  if (k_max < spec.q) throw UsageError("k_max must be >= Q");
  if (k_max > max_search_servers) throw InfeasibleError("k_max above " + std::to_string(max_search_servers));

  std::int64_t total = 0;
  for (int k = spec.q; k <= k_max; ++k) {
    std::int64_t maps = 1;
    for (int f = 0; f < spec.n; ++f) maps = saturating_mul(maps, (std::int64_t{1} << k) - 1);
    total = std::min(std::numeric_limits<std::int64_t>::max() - 1,
                     total + saturating_mul(maps, falling_factorial(k, spec.q)));
  }
  if (total > options.budget) {
    throw InfeasibleError("search space of " + std::to_string(total) + " placements exceeds budget " +
                          std::to_string(options.budget));
  }

  const int threads = options.threads > 0 ? options.threads : default_thread_count();
  SearchResult result;
  bool have = false;
  for (int k = spec.q; k <= k_max; ++k) {
    const auto reducers = reduce_assignments(spec.q, k, options.prune_symmetry);
    const std::uint32_t first_count = (1U << k) - 1;
    const auto chunks = std::min<std::uint32_t>(static_cast<std::uint32_t>(threads), first_count);

    std::vector<std::future<std::pair<Candidate, std::int64_t>>> jobs;
    for (std::uint32_t c = 0; c < chunks; ++c) {
      const std::uint32_t lo = 1 + c * first_count / chunks;
      const std::uint32_t hi = 1 + (c + 1) * first_count / chunks;
      jobs.push_back(std::async(std::launch::async, [&, lo, hi] {
        std::int64_t evaluated = 0;
        Candidate cand = search_slice(spec, k, mode, reducers, lo, hi, evaluated);
        return std::make_pair(std::move(cand), evaluated);
      }));
    }
    Candidate best;
    for (auto& job : jobs) {
      auto [cand, evaluated] = job.get();
      result.evaluated += evaluated;
      if (!cand.found) continue;
      // Ties resolve to the smallest (work, reduce assignment, map masks) key, independent of slicing.
      if (!best.found || cand.value < best.value ||
          (cand.value == best.value && std::tie(cand.work, cand.reduce_index, cand.masks) <
                                           std::tie(best.work, best.reduce_index, best.masks))) {
        best = std::move(cand);
      }
    }
    result.minimum_per_k[k] = best.value;
    if (!have || best.value < result.minimum) {
      have = true;
      result.minimum = best.value;
      result.witness = witness_placement(k, best.masks, reducers[best.reduce_index]);
    }
  }
  return result;
}

}  // namespace cdc
