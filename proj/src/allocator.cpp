#include "cdc/allocator.hpp"

#include "cdc/error.hpp"

#include <algorithm>
#include <cmath>

namespace cdc {

namespace {

double clamp_approx(double r, int q) {
  if (!std::isfinite(r)) return 0.0;
  return std::clamp(r, 0.0, static_cast<double>(q));
}

}  // namespace

Rational coded_load(int q, int r) { return make_rational(q - r, static_cast<std::int64_t>(q) * (r + 1)); }

Rational seq_objective(const JobSpec& spec, int r) {
  if (r < 0 || r > spec.q) {
    throw UsageError("r = " + std::to_string(r) + " outside [0, " + std::to_string(spec.q) + "]");
  }
  return spec.cm * make_rational(r, spec.q) + spec.cs * coded_load(spec.q, r);
}

AllocationPlan plan_sequential(const JobSpec& spec) {
  validate(spec);
  int best_r = 0;
  Rational best = seq_objective(spec, 0);
  for (int r = 1; r <= spec.q; ++r) {
    Rational v = seq_objective(spec, r);
    if (v <= best) {  // largest minimizer wins ties
      best = v;
      best_r = r;
    }
  }

  AllocationPlan plan;
  plan.mode = Mode::sequential;
  plan.coded = true;
  plan.r_star = best_r;
  plan.t_map_pred = spec.cm * make_rational(best_r, spec.q);
  plan.t_shuffle_pred = spec.cs * coded_load(spec.q, best_r);
  plan.t_reduce_pred = spec.cr;
  plan.t_star = plan.t_map_pred + plan.t_shuffle_pred + plan.t_reduce_pred;
  if (best_r == spec.q) {
    plan.k_star = spec.q;
  } else if (best_r > 0) {
    plan.k_star = spec.q + (spec.q + best_r - 1) / best_r;
  }
  double ratio = to_double(spec.cs / spec.cm);
  plan.r_star_approx = clamp_approx(std::sqrt((spec.q + 1) * ratio) - 1.0, spec.q);
  return plan;
}

EnvelopeFn conv_envelope(int q) {
  if (q < 1) throw UsageError("Q must be >= 1");
  EnvelopeFn env;
  env.q = q;
  env.breakpoints.reserve(q + 1);
  for (int r = 0; r <= q; ++r) env.breakpoints.emplace_back(r, coded_load(q, r));
  return env;
}

Rational EnvelopeFn::operator()(const Rational& r) const {
  if (r < 0 || r > q) {
    throw UsageError("envelope argument " + to_string(r) + " outside [0, " + std::to_string(q) + "]");
  }
  auto j = to_int64(floor(r));
  if (j == q) return breakpoints.back().second;
  const Rational& lo = breakpoints[j].second;
  const Rational& hi = breakpoints[j + 1].second;
  return lo + (hi - lo) * (r - j);
}

Rational eval(const EnvelopeFn& env, const Rational& r) { return env(r); }

std::int64_t parallel_server_count(int q, const Rational& r_star) {
  if (r_star <= 0 || r_star > q) throw UsageError("parallel r* must lie in (0, Q]");
  if (r_star <= q - 1) return q + to_int64(ceil(Rational(q) / r_star));
  return q + to_int64(ceil(Rational(q) * (q - r_star) / r_star));
}

AllocationPlan plan_parallel(const JobSpec& spec) {
  validate(spec);
  const int q = spec.q;
  const EnvelopeFn env = conv_envelope(q);
  auto objective = [&](const Rational& r) { return std::max(spec.cm * r / q, spec.cs * env(r)); };

  // On [j, j+1] both curves are linear, so the max is minimized at an endpoint or at the crossing.
  std::vector<Rational> candidates;
  for (int j = 0; j < q; ++j) {
    Rational map_lo = spec.cm * make_rational(j, q);
    Rational map_hi = spec.cm * make_rational(j + 1, q);
    Rational shuffle_lo = spec.cs * env.breakpoints[j].second;
    Rational shuffle_hi = spec.cs * env.breakpoints[j + 1].second;
    candidates.emplace_back(j);
    Rational slope_gap = (map_hi - map_lo) - (shuffle_hi - shuffle_lo);
    if (slope_gap != 0) {
      Rational t = (shuffle_lo - map_lo) / slope_gap;
      if (t > 0 && t < 1) candidates.push_back(j + t);
    }
  }
  candidates.emplace_back(q);

  Rational best_r = candidates.front();
  Rational best = objective(best_r);
  bool unique = true;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    Rational v = objective(candidates[i]);
    if (v < best) {
      best = v;
      best_r = candidates[i];
      unique = true;
    } else if (v == best && candidates[i] != best_r) {
      unique = false;
    }
  }

  AllocationPlan plan;
  plan.mode = Mode::parallel;
  plan.coded = true;
  plan.r_star = best_r;
  plan.r_star_unique = unique;
  plan.t_map_pred = spec.cm * best_r / q;
  plan.t_shuffle_pred = spec.cs * env(best_r);
  plan.t_reduce_pred = spec.cr;
  plan.t_star = std::max(plan.t_map_pred, plan.t_shuffle_pred) + plan.t_reduce_pred;
  plan.k_star = parallel_server_count(q, best_r);
  double ratio = to_double(spec.cs / spec.cm);
  double half = (ratio + 1.0) / 2.0;
  plan.r_star_approx = clamp_approx(std::sqrt(q * ratio + half * half) - half, q);
  return plan;
}

AllocationPlan plan_uncoded(const JobSpec& spec, Mode mode) {
  validate(spec);
  const int q = spec.q;
  AllocationPlan plan;
  plan.mode = mode;
  plan.coded = false;
  plan.t_reduce_pred = spec.cr;
  if (mode == Mode::sequential) {
    // Only r in {0, Q} is useful without multicast; r = Q also wins the tie.
    bool replicate = spec.cm <= spec.cs;
    plan.r_star = replicate ? q : 0;
    plan.t_map_pred = replicate ? spec.cm : Rational(0);
    plan.t_shuffle_pred = replicate ? Rational(0) : spec.cs;
    plan.t_star = std::min(spec.cm, spec.cs) + spec.cr;
    if (replicate) plan.k_star = q;
    plan.r_star_approx = replicate ? q : 0.0;
  } else {
    plan.r_star = Rational(q) * spec.cs / (spec.cm + spec.cs);
    plan.t_map_pred = spec.cm * plan.r_star / q;
    plan.t_shuffle_pred = spec.cs * (1 - plan.r_star / q);
    plan.t_star = spec.cm * spec.cs / (spec.cm + spec.cs) + spec.cr;
    plan.k_star = std::max<std::int64_t>(q, to_int64(ceil(Rational(q) / plan.r_star)));
    plan.r_star_approx = to_double(plan.r_star);
  }
  return plan;
}

AllocationPlan plan(const JobSpec& spec, Mode mode, bool coded) {
  if (!coded) return plan_uncoded(spec, mode);
  return mode == Mode::sequential ? plan_sequential(spec) : plan_parallel(spec);
}

std::vector<SweepRow> sweep(int q, const Rational& ratio_min, const Rational& ratio_max, int steps, Mode mode,
                            const Rational& cr) {
  if (steps < 1) throw UsageError("steps must be >= 1");
  if (ratio_min <= 0 || ratio_max < ratio_min) throw UsageError("need 0 < ratio_min <= ratio_max");
  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    Rational ratio = steps == 1 ? ratio_min : ratio_min + (ratio_max - ratio_min) * make_rational(i, steps - 1);
    JobSpec spec;
    spec.q = q;
    spec.cm = 1;
    spec.cs = ratio;
    spec.cr = cr;
    rows.push_back({ratio, plan(spec, mode, true), plan(spec, mode, false)});
  }
  return rows;
}

}  // namespace cdc
