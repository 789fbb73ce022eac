#pragma once

#include "cdc/core.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace cdc {

/// Optimal (or baseline) resource allocation for one implementation mode.
struct AllocationPlan {
  Mode mode = Mode::sequential;
  bool coded = true;
  Rational r_star;
  std::optional<std::int64_t> k_star;  // empty: not achievable with finitely many servers
  Rational t_star;
  Rational t_map_pred;
  Rational t_shuffle_pred;
  Rational t_reduce_pred;
  double r_star_approx = 0.0;  // diagnostic only
  bool r_star_unique = true;

  bool finite_k_achievable() const { return k_star.has_value(); }
};

/// Communication load (Q - r) / (Q (r + 1)) of the repetition-r design.
Rational coded_load(int q, int r);

/// c_m r/Q + c_s (Q-r)/(Q(r+1)). Throws UsageError unless 0 <= r <= Q.
Rational seq_objective(const JobSpec& spec, int r);

AllocationPlan plan_sequential(const JobSpec& spec);

/// Lower convex envelope of {(r, coded_load(Q, r)) : r = 0..Q}. The point set is convex,
/// so the envelope is the piecewise-linear interpolation through every breakpoint.
struct EnvelopeFn {
  int q = 1;
  std::vector<std::pair<int, Rational>> breakpoints;

  /// Exact interpolated value; throws UsageError for r outside [0, Q].
  Rational operator()(const Rational& r) const;
};

EnvelopeFn conv_envelope(int q);
Rational eval(const EnvelopeFn& env, const Rational& r);

/// Exact minimizer of max{c_m r/Q, c_s Conv(r)} over real r in [0, Q], solved segment by segment.
AllocationPlan plan_parallel(const JobSpec& spec);

AllocationPlan plan_uncoded(const JobSpec& spec, Mode mode);

AllocationPlan plan(const JobSpec& spec, Mode mode, bool coded = true);

/// K* for a parallel design parameter, including the r* > Q-1 branch.
std::int64_t parallel_server_count(int q, const Rational& r_star);

struct SweepRow {
  Rational ratio;  // c_s / c_m
  AllocationPlan coded;
  AllocationPlan uncoded;
};

/// Evaluates coded and uncoded plans at `steps` evenly spaced c_s/c_m ratios in
/// [ratio_min, ratio_max] (c_m fixed at 1).
std::vector<SweepRow> sweep(int q, const Rational& ratio_min, const Rational& ratio_max, int steps, Mode mode,
                            const Rational& cr = 0);

}  // namespace cdc
