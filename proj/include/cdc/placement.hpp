#pragma once

#include "cdc/allocator.hpp"
#include "cdc/core.hpp"

#include <optional>
#include <vector>

namespace cdc {

/// One repetition class of files. Sequential layouts have a single stratum; parallel
/// layouts split files into an alpha-weighted r_+ stratum and a (1-alpha) r_- stratum.
struct StratumInfo {
  Stratum tag = Stratum::none;
  int repetition = 0;  // number of solvers mapping each file of the stratum
  int first_file = 1;
  int file_count = 0;

  friend bool operator==(const StratumInfo&, const StratumInfo&) = default;
};

/// Map/Reduce assignment of an achievability scheme plus its batch label table.
/// Servers 1..Q are solvers (W_k = {k}); servers Q+1..K are helpers.
struct SchemeLayout {
  JobSpec spec;  // spec.n is the effective file count after any padding
  int requested_n = 0;
  Placement placement;
  Rational r_effective;
  Rational alpha = 1;
  std::vector<StratumInfo> strata;

  const std::vector<Batch>& labels() const { return *placement.batch_index; }
  int k() const { return placement.k; }
  bool padded() const { return spec.n != requested_n; }

  friend bool operator==(const SchemeLayout&, const SchemeLayout&) = default;
};

enum class Divisibility { strict, pad };

/// Sequential scheme with integer repetition r on K servers. Throws DivisibilityError in
/// strict mode when N is not a multiple of the batch count, InfeasibleError when K is
/// below the case minimum, UsageError for r outside [0, Q].
SchemeLayout build_sequential(const JobSpec& spec, int r, int k, Divisibility mode = Divisibility::strict);

/// Parallel scheme for rational r in (0, Q]: memory sharing between repetitions
/// ceil(r) and ceil(r)-1 with weight alpha = r - (ceil(r) - 1).
SchemeLayout build_parallel(const JobSpec& spec, const Rational& r, int k, Divisibility mode = Divisibility::strict);

struct BuildOptions {
  std::optional<int> k;
  Divisibility divisibility = Divisibility::pad;
  Rational epsilon = make_rational(1, 100);  // helper load target when r* = 0
};

/// Layout for a coded allocation plan, using K* unless overridden.
SchemeLayout build_from_plan(const JobSpec& spec, const AllocationPlan& plan, const BuildOptions& options = {});

/// Structural checks beyond validate_placement: labels partition {1..N}, solver k maps
/// exactly the files labelled with k in A (or solver_only), helper i maps exactly its batches.
ValidationReport validate_layout(const SchemeLayout& layout);

/// Sum over strata of (file fraction) * (Q - r_s) / (Q (r_s + 1)).
Rational layout_coded_load(const SchemeLayout& layout);

/// |M_k| / N for each server.
std::vector<Rational> server_loads(const SchemeLayout& layout);

}  // namespace cdc
