#include "cdc/placement.hpp"

#include "cdc/combinatorics.hpp"
#include "cdc/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cdc {

namespace {

constexpr std::int64_t max_batches = 10'000'000;

// Number of equal batches a stratum with repetition `rep` is split into.
std::int64_t batch_count(int q, int k, int rep) {
  if (rep == q) return 1;
  std::int64_t n = static_cast<std::int64_t>(k - q) * binomial(q, rep);
  if (n > max_batches) {
    throw InfeasibleError("layout needs " + std::to_string(n) + " batches; limit is " + std::to_string(max_batches));
  }
  return n;
}

std::int64_t round_up(std::int64_t n, std::int64_t step) { return (n + step - 1) / step * step; }

void append_stratum(std::vector<Batch>& batches, int q, int k, const StratumInfo& stratum) {
  if (stratum.file_count == 0) return;
  int next = stratum.first_file;
  if (stratum.repetition == q) {
    Batch b;
    b.label.solver_set.resize(q);
    std::iota(b.label.solver_set.begin(), b.label.solver_set.end(), 1);
    b.label.stratum = stratum.tag;
    b.files.resize(stratum.file_count);
    std::iota(b.files.begin(), b.files.end(), next);
    batches.push_back(std::move(b));
    return;
  }
  const auto subsets = colex_subsets(q, stratum.repetition);
  const auto size = stratum.file_count / batch_count(q, k, stratum.repetition);
  for (int helper = q + 1; helper <= k; ++helper) {
    for (SubsetMask a : subsets) {
      Batch b;
      b.label.helper = helper;
      b.label.solver_set = mask_to_ids(a);
      b.label.stratum = stratum.tag;
      b.files.resize(size);
      std::iota(b.files.begin(), b.files.end(), next);
      next += static_cast<int>(size);
      batches.push_back(std::move(b));
    }
  }
}

Placement assemble(int q, int k, std::vector<Batch> batches) {
  Placement p;
  p.k = k;
  p.map_sets.resize(k);
  p.reduce_sets.resize(k);
  for (int solver = 1; solver <= q; ++solver) p.reduce_sets[solver - 1] = {solver};
  for (const Batch& b : batches) {
    for (int solver : b.label.solver_set) {
      auto& m = p.map_sets[solver - 1];
      m.insert(m.end(), b.files.begin(), b.files.end());
    }
    if (b.label.helper) {
      auto& m = p.map_sets[*b.label.helper - 1];
      m.insert(m.end(), b.files.begin(), b.files.end());
    }
  }
  for (auto& m : p.map_sets) std::sort(m.begin(), m.end());
  p.batch_index = std::move(batches);
  return p;
}

void check_q(const JobSpec& spec) {
  validate(spec);
  if (spec.q > max_mask_elements) {
    throw InfeasibleError("scheme synthesis supports Q <= " + std::to_string(max_mask_elements));
  }
}

void require_divisible(std::int64_t n, std::int64_t step, Divisibility mode, const std::string& what) {
  if (n % step == 0 || mode == Divisibility::pad) return;
  throw DivisibilityError(what + ": N = " + std::to_string(n) + " is not a multiple of " + std::to_string(step) +
                              "; least compatible N is " + std::to_string(round_up(n, step)),
                          step, round_up(n, step));
}

}  // namespace

SchemeLayout build_sequential(const JobSpec& spec, int r, int k, Divisibility mode) {
  check_q(spec);
  const int q = spec.q;
  if (r < 0 || r > q) throw UsageError("r = " + std::to_string(r) + " outside [0, " + std::to_string(q) + "]");
  if (k < q) throw InfeasibleError("K = " + std::to_string(k) + " is below Q = " + std::to_string(q));
  if (r < q && k <= q) {
    throw InfeasibleError("r = " + std::to_string(r) + " needs at least one helper (K >= " + std::to_string(q + 1) +
                          ")");
  }

  const std::int64_t step = batch_count(q, k, r);
  require_divisible(spec.n, step, mode, "sequential layout");

  SchemeLayout layout;
  layout.spec = spec;
  layout.requested_n = spec.n;
  layout.spec.n = static_cast<int>(round_up(spec.n, step));
  layout.r_effective = r;
  layout.alpha = 1;
  layout.strata.push_back({Stratum::none, r, 1, layout.spec.n});

  std::vector<Batch> batches;
  append_stratum(batches, q, k, layout.strata.front());
  layout.placement = assemble(q, k, std::move(batches));
  return layout;
}

SchemeLayout build_parallel(const JobSpec& spec, const Rational& r, int k, Divisibility mode) {
  check_q(spec);
  const int q = spec.q;
  if (r <= 0 || r > q) throw UsageError("parallel r = " + to_string(r) + " outside (0, Q]");

  const int r_plus = static_cast<int>(to_int64(ceil(r)));
  const int r_minus = r_plus - 1;
  const Rational alpha = r - r_minus;
  const bool solver_only = r > q - 1;

  if (k < q) throw InfeasibleError("K = " + std::to_string(k) + " is below Q = " + std::to_string(q));
  if (k == q && (!solver_only || alpha < 1)) {
    throw InfeasibleError("r = " + to_string(r) + " needs at least one helper (K >= " + std::to_string(q + 1) + ")");
  }

  // alpha = a/b; N = b m, and each stratum's file count must be a multiple of its batch count.
  const std::int64_t a = to_int64(numerator_of(alpha));
  const std::int64_t b = to_int64(denominator_of(alpha));
  std::int64_t m_step = 1;
  if (!solver_only) {
    std::int64_t d_plus = batch_count(q, k, r_plus);
    m_step = lcm64(m_step, d_plus / gcd64(a, d_plus));
  }
  if (b - a > 0) {
    std::int64_t d_minus = batch_count(q, k, r_minus);
    m_step = lcm64(m_step, d_minus / gcd64(b - a, d_minus));
  }
  const std::int64_t step = b * m_step;
  require_divisible(spec.n, step, mode, "parallel layout");

  SchemeLayout layout;
  layout.spec = spec;
  layout.requested_n = spec.n;
  layout.spec.n = static_cast<int>(round_up(spec.n, step));
  layout.r_effective = r;
  layout.alpha = alpha;

  const int n = layout.spec.n;
  const int plus_count = static_cast<int>(to_int64(numerator_of(alpha * n)));
  layout.strata.push_back({solver_only ? Stratum::solver_only : Stratum::plus, solver_only ? q : r_plus, 1, plus_count});
  layout.strata.push_back({Stratum::minus, r_minus, plus_count + 1, n - plus_count});

  std::vector<Batch> batches;
  for (const auto& s : layout.strata) append_stratum(batches, q, k, s);
  // Canonical order: helpers ascending, then stratum, then A colex; solver-only batch first.
  std::stable_sort(batches.begin(), batches.end(), [](const Batch& x, const Batch& y) {
    return x.label.helper.value_or(0) < y.label.helper.value_or(0);
  });
  layout.placement = assemble(q, k, std::move(batches));
  return layout;
}

SchemeLayout build_from_plan(const JobSpec& spec, const AllocationPlan& plan, const BuildOptions& options) {
  if (!plan.coded) throw UsageError("layouts are synthesized from coded plans only");
  if (plan.mode == Mode::sequential) {
    const int r = static_cast<int>(to_int64(numerator_of(plan.r_star)));
    int k = 0;
    if (options.k) {
      k = *options.k;
    } else if (plan.k_star) {
      k = static_cast<int>(*plan.k_star);
    } else {
      if (options.epsilon <= 0) throw UsageError("epsilon must be > 0");
      k = spec.q + static_cast<int>(to_int64(ceil(1 / options.epsilon)));
    }
    return build_sequential(spec, r, k, options.divisibility);
  }
  const int k = options.k ? *options.k : static_cast<int>(plan.k_star.value());
  return build_parallel(spec, plan.r_star, k, options.divisibility);
}

ValidationReport validate_layout(const SchemeLayout& layout) {
  ValidationReport report = validate_placement(layout.spec, layout.placement);
  if (!report.ok()) return report;
  if (!layout.placement.batch_index) {
    report.violations.push_back({ViolationKind::batch_overlap, "layout has no batch labels"});
    return report;
  }
  const int q = layout.spec.q;
  const int n = layout.spec.n;
  const auto& p = layout.placement;

  std::vector<std::vector<int>> expected(p.k);
  std::vector<int> covered(n + 1, 0);
  for (const Batch& b : layout.labels()) {
    for (int f : b.files) {
      if (f >= 1 && f <= n) ++covered[f];
    }
    for (int s : b.label.solver_set) {
      if (s < 1 || s > q) {
        report.violations.push_back(
            {ViolationKind::function_out_of_range, "batch " + b.label.key() + " names non-solver " + std::to_string(s)});
        continue;
      }
      expected[s - 1].insert(expected[s - 1].end(), b.files.begin(), b.files.end());
    }
    if (b.label.helper) {
      int h = *b.label.helper;
      if (h <= q || h > p.k) {
        report.violations.push_back(
            {ViolationKind::server_count, "batch " + b.label.key() + " names non-helper " + std::to_string(h)});
        continue;
      }
      expected[h - 1].insert(expected[h - 1].end(), b.files.begin(), b.files.end());
    }
  }
  for (int f = 1; f <= n; ++f) {
    if (covered[f] != 1) {
      report.violations.push_back({ViolationKind::batch_overlap,
                                   "file " + std::to_string(f) + " is in " + std::to_string(covered[f]) + " batches"});
    }
  }
  for (int server = 1; server <= p.k; ++server) {
    auto& e = expected[server - 1];
    std::sort(e.begin(), e.end());
    if (e != p.map_set(server)) {
      report.violations.push_back({ViolationKind::duplicate_entry,
                                   "server " + std::to_string(server) + " map set disagrees with its batch labels"});
    }
    const auto& w = p.reduce_set(server);
    bool solver_ok = server <= q ? (w == std::vector<int>{server}) : w.empty();
    if (!solver_ok) {
      report.violations.push_back({ViolationKind::function_reduced_twice,
                                   "server " + std::to_string(server) + " has a non-canonical reduce set"});
    }
  }
  return report;
}

Rational layout_coded_load(const SchemeLayout& layout) {
  Rational load = 0;
  for (const auto& s : layout.strata) {
    load += make_rational(s.file_count, layout.spec.n) * coded_load(layout.spec.q, s.repetition);
  }
  return load;
}

std::vector<Rational> server_loads(const SchemeLayout& layout) {
  std::vector<Rational> loads;
  loads.reserve(layout.placement.k);
  for (const auto& m : layout.placement.map_sets) {
    loads.push_back(make_rational(static_cast<std::int64_t>(m.size()), layout.spec.n));
  }
  return loads;
}

}  // namespace cdc
