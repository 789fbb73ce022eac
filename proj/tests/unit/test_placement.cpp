#include "cdc/combinatorics.hpp"
#include "cdc/error.hpp"
#include "cdc/placement.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <algorithm>
#include <map>

using fixtures::q;
using fixtures::spec;

namespace {

// Servers mapping each file, as (solver count, helper count).
std::map<int, std::pair<int, int>> mapper_counts(const cdc::SchemeLayout& layout) {
  std::map<int, std::pair<int, int>> out;
  for (int k = 1; k <= layout.k(); ++k) {
    for (int f : layout.placement.map_set(k)) {
      (k <= layout.spec.q ? out[f].first : out[f].second) += 1;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("worked example layout has the published structure") {
  auto layout = cdc::build_sequential(fixtures::worked_spec(), 2, 5);
  CHECK(cdc::validate_layout(layout).ok());
  CHECK(cdc::validate_placement(layout.spec, layout.placement).ok());
  auto loads = cdc::server_loads(layout);
  CHECK(loads == std::vector<cdc::Rational>{q(4, 6), q(4, 6), q(4, 6), q(3, 6), q(3, 6)});
  CHECK(cdc::peak_load(layout.spec, layout.placement) == q(4, 6));
  for (auto [file, counts] : mapper_counts(layout)) {
    CAPTURE(file);
    CHECK(counts == std::pair{2, 1});
  }
  // Every pair of solvers shares exactly one file per helper.
  std::map<std::vector<int>, int> pairs;
  for (int f = 1; f <= 6; ++f) {
    std::vector<int> who;
    for (int k = 1; k <= 3; ++k) {
      auto& m = layout.placement.map_set(k);
      if (std::find(m.begin(), m.end(), f) != m.end()) who.push_back(k);
    }
    ++pairs[who];
  }
  CHECK(pairs == std::map<std::vector<int>, int>{{{1, 2}, 2}, {{1, 3}, 2}, {{2, 3}, 2}});
  CHECK(layout.placement.reduce_sets == std::vector<std::vector<int>>{{1}, {2}, {3}, {}, {}});
  CHECK(layout.labels().size() == 6);
  CHECK(layout.labels().front().label.key() == "i=4,A={1 2},stratum=none");
  CHECK(layout_coded_load(layout) == q(1, 9));
}

TEST_CASE("canonical order is helper then colex") {
  auto layout = cdc::build_sequential(spec(3, 6, 1, 2), 2, 5);
  std::vector<std::string> keys;
  for (const auto& b : layout.labels()) keys.push_back(b.label.key());
  CHECK(keys == std::vector<std::string>{"i=4,A={1 2},stratum=none", "i=4,A={1 3},stratum=none",
                                         "i=4,A={2 3},stratum=none", "i=5,A={1 2},stratum=none",
                                         "i=5,A={1 3},stratum=none", "i=5,A={2 3},stratum=none"});
  CHECK(layout.labels()[2].files == std::vector<int>{3});
}

TEST_CASE("full replication") {
  auto layout = cdc::build_sequential(spec(2, 4, 1, 1), 2, 2);
  CHECK(layout.placement.map_sets == std::vector<std::vector<int>>{{1, 2, 3, 4}, {1, 2, 3, 4}});
  CHECK(cdc::peak_load(layout.spec, layout.placement) == 1);
  CHECK(cdc::validate_layout(layout).ok());

  // Odd N is fine when every solver maps everything.
  CHECK_NOTHROW(cdc::build_sequential(spec(2, 5, 1, 1), 2, 2));
}

TEST_CASE("no repetition: helpers split the files") {
  auto layout = cdc::build_sequential(spec(2, 6, 1, 1), 0, 5);
  CHECK(layout.placement.map_sets == std::vector<std::vector<int>>{{}, {}, {1, 2}, {3, 4}, {5, 6}});
  CHECK(cdc::peak_load(layout.spec, layout.placement) == q(1, 3));
  CHECK(cdc::validate_layout(layout).ok());
  CHECK(layout_coded_load(layout) == 1);
}

TEST_CASE("sequential preconditions") {
  auto s = spec(3, 7, 1, 2);
  try {
    cdc::build_sequential(s, 2, 5);
    FAIL("expected a divisibility error");
  } catch (const cdc::DivisibilityError& e) {
    CHECK(e.required_multiple() == 6);
    CHECK(e.suggested_n() == 12);
  }
  auto padded = cdc::build_sequential(s, 2, 5, cdc::Divisibility::pad);
  CHECK(padded.spec.n == 12);
  CHECK(padded.requested_n == 7);
  CHECK(padded.padded());
  CHECK_THROWS_AS(cdc::build_sequential(spec(3, 6, 1, 2), 2, 3), cdc::InfeasibleError);
  CHECK_THROWS_AS(cdc::build_sequential(spec(3, 6, 1, 2), 0, 3), cdc::InfeasibleError);
  CHECK_THROWS_AS(cdc::build_sequential(spec(3, 6, 1, 2), 4, 5), cdc::UsageError);
  CHECK_THROWS_AS(cdc::build_sequential(spec(3, 6, 1, 2), 2, 2), cdc::InfeasibleError);
}

TEST_CASE("parallel split with three solvers") {
  auto s = spec(3, 63, 1, 2, 1);
  auto layout = cdc::build_parallel(s, q(10, 7), 6);
  CHECK(layout.alpha == q(3, 7));
  REQUIRE(layout.strata.size() == 2);
  CHECK(layout.strata[0].repetition == 2);
  CHECK(layout.strata[0].file_count == 27);
  CHECK(layout.strata[1].repetition == 1);
  CHECK(layout.strata[1].file_count == 36);
  CHECK(cdc::validate_layout(layout).ok());
  auto loads = cdc::server_loads(layout);
  for (int k = 0; k < 3; ++k) CHECK(loads[k] == q(10, 21));
  for (int k = 3; k < 6; ++k) CHECK(loads[k] == q(1, 3));
  CHECK(cdc::layout_coded_load(layout) == cdc::eval(cdc::conv_envelope(3), q(10, 7)));

  // 63 is the least compatible N.
  try {
    cdc::build_parallel(spec(3, 1, 1, 2, 1), q(10, 7), 6);
    FAIL("expected a divisibility error");
  } catch (const cdc::DivisibilityError& e) {
    CHECK(e.suggested_n() == 63);
  }
  CHECK(cdc::build_parallel(spec(3, 1, 1, 2, 1), q(10, 7), 6, cdc::Divisibility::pad).spec.n == 63);
}

TEST_CASE("parallel split above Q - 1 uses a solver-only stratum") {
  auto layout = cdc::build_parallel(spec(2, 8, 1, 1), q(3, 2), 4);
  CHECK(layout.alpha == q(1, 2));
  CHECK(cdc::validate_layout(layout).ok());
  for (int k = 1; k <= 2; ++k) CHECK(layout.placement.map_set(k).size() == 6);
  CHECK(cdc::peak_load(layout.spec, layout.placement) == q(3, 4));
  int solver_only = 0;
  for (const auto& b : layout.labels()) {
    if (b.label.stratum == cdc::Stratum::solver_only) {
      ++solver_only;
      CHECK_FALSE(b.label.helper.has_value());
      CHECK(b.label.solver_set == std::vector<int>{1, 2});
      CHECK(b.files.size() == 4);
    }
  }
  CHECK(solver_only == 1);
  for (auto [file, counts] : mapper_counts(layout)) {
    CAPTURE(file);
    CHECK((counts == std::pair{2, 0} || counts == std::pair{1, 1}));
  }
}

TEST_CASE("parallel integer repetition leaves an empty stratum") {
  auto full = cdc::build_parallel(spec(2, 5, 1, 1), 2, 2);
  CHECK(full.alpha == 1);
  CHECK(full.placement.map_sets == std::vector<std::vector<int>>{{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}});
  CHECK(cdc::peak_load(full.spec, full.placement) == 1);

  auto mid = cdc::build_parallel(spec(4, 12, 1, 1), 2, 6);
  CHECK(mid.alpha == 1);
  bool has_empty = false;
  for (const auto& st : mid.strata) has_empty |= st.file_count == 0;
  CHECK(has_empty);
  CHECK(cdc::validate_layout(mid).ok());
  CHECK(cdc::layout_coded_load(mid) == cdc::coded_load(4, 2));
}

TEST_CASE("solver symmetry of the design") {
  for (int Q = 2; Q <= 5; ++Q) {
    for (int r = 1; r < Q; ++r) {
      int helpers = 2;
      auto n = helpers * cdc::binomial(Q, r);
      auto layout = cdc::build_sequential(spec(Q, static_cast<int>(n), 1, 1), r, Q + helpers);
      for (int k = 1; k <= Q; ++k) {
        int labels = 0;
        for (const auto& b : layout.labels())
          labels += std::count(b.label.solver_set.begin(), b.label.solver_set.end(), k) > 0;
        CHECK(labels == cdc::binomial(Q - 1, r - 1) * helpers);
      }
    }
  }
}

TEST_CASE("layout from a plan") {
  auto layout = cdc::build_from_plan(fixtures::worked_spec(), cdc::plan_sequential(fixtures::worked_spec()));
  CHECK(layout.k() == 5);
  CHECK(layout.spec.n == 6);

  auto s = spec(3, 1, 100, 1);
  auto zero = cdc::build_from_plan(s, cdc::plan_sequential(s));
  CHECK(zero.k() == 103);
  CHECK(cdc::peak_load(zero.spec, zero.placement) == q(1, 100));

  cdc::BuildOptions strict;
  strict.divisibility = cdc::Divisibility::strict;
  CHECK_THROWS_AS(cdc::build_from_plan(spec(3, 7, 1, 2), cdc::plan_sequential(spec(3, 7, 1, 2)), strict),
                  cdc::DivisibilityError);

  cdc::BuildOptions more;
  more.k = 7;
  CHECK(cdc::build_from_plan(fixtures::worked_spec(), cdc::plan_sequential(fixtures::worked_spec()), more)
            .spec.n == 12);
}

TEST_CASE("layouts are deterministic") {
  auto a = cdc::build_parallel(spec(4, 1, 1, 3), q(7, 3), 6, cdc::Divisibility::pad);
  auto b = cdc::build_parallel(spec(4, 1, 1, 3), q(7, 3), 6, cdc::Divisibility::pad);
  CHECK(a == b);
}
