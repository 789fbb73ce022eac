#include "cdc/allocator.hpp"
#include "cdc/error.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <random>

using fixtures::q;
using fixtures::spec;

TEST_CASE("sequential objective") {
  auto s = spec(3, 6, 1, 2);
  CHECK(cdc::seq_objective(s, 2) == q(8, 9));
  CHECK(cdc::seq_objective(s, 3) == s.cm);
  CHECK(cdc::seq_objective(s, 0) == 2);
  CHECK_THROWS_AS(cdc::seq_objective(s, 4), cdc::UsageError);
  CHECK_THROWS_AS(cdc::seq_objective(s, -1), cdc::UsageError);
}

TEST_CASE("sequential plan: worked example") {
  auto plan = cdc::plan_sequential(fixtures::worked_spec());
  CHECK(plan.r_star == 2);
  REQUIRE(plan.k_star);
  CHECK(*plan.k_star == 5);
  CHECK(plan.t_star == q(17, 9));
  CHECK(plan.t_map_pred == q(2, 3));
  CHECK(plan.t_shuffle_pred == q(2, 9));
  CHECK(plan.t_reduce_pred == 1);
}

TEST_CASE("sequential plan: full replication and no repetition") {
  auto hi = cdc::plan_sequential(spec(3, 1, 1, 100));
  CHECK(hi.r_star == 3);
  CHECK(hi.k_star == 3);
  CHECK(hi.t_star == 1);

  auto lo = cdc::plan_sequential(spec(3, 1, 100, 1));
  CHECK(lo.r_star == 0);
  CHECK_FALSE(lo.k_star.has_value());
  CHECK_FALSE(lo.finite_k_achievable());
  CHECK(lo.t_star == 1);
  CHECK(lo.t_map_pred == 0);
}

TEST_CASE("sequential tie goes to the larger minimizer") {
  // c_m = Q + 1, c_s = (r+1)(r+2) makes r and r+1 tie exactly.
  for (int Q = 2; Q <= 9; ++Q) {
    for (int r = 0; r + 1 <= Q; ++r) {
      auto s = spec(Q, 1, Q + 1, (r + 1) * (r + 2));
      CAPTURE(Q);
      CAPTURE(r);
      REQUIRE(cdc::seq_objective(s, r) == cdc::seq_objective(s, r + 1));
      CHECK(cdc::plan_sequential(s).r_star == r + 1);
    }
  }
}

TEST_CASE("envelope interpolation") {
  auto env = cdc::conv_envelope(3);
  CHECK(cdc::eval(env, 1) == q(1, 3));
  CHECK(cdc::eval(env, q(3, 2)) == q(2, 9));
  CHECK(cdc::eval(env, 3) == 0);
  CHECK(cdc::eval(env, 0) == 1);
  CHECK_THROWS_AS(cdc::eval(env, q(-1, 2)), cdc::UsageError);
  CHECK_THROWS_AS(cdc::eval(env, q(7, 2)), cdc::UsageError);
  REQUIRE(env.breakpoints.size() == 4);
  for (std::size_t i = 1; i < env.breakpoints.size(); ++i) {
    CHECK(env.breakpoints[i].second < env.breakpoints[i - 1].second);
  }
}

TEST_CASE("parallel plan examples") {
  auto p = cdc::plan_parallel(spec(3, 1, 1, 2, 1));
  CHECK(p.r_star == q(10, 7));
  CHECK(p.t_star == q(31, 21));
  CHECK(p.k_star == 6);
  CHECK(p.r_star_unique);
  CHECK(p.t_map_pred == p.t_shuffle_pred);

  auto one = cdc::plan_parallel(spec(1, 1, 1, 1));
  CHECK(one.r_star == q(1, 2));
  CHECK(one.t_star == q(1, 2));
  CHECK(one.k_star == 2);

  // r* approaches Q from below as c_s grows; K* falls to Q + 1 and then Q only at r* = Q.
  auto big = cdc::plan_parallel(spec(3, 1, 1, 100));
  CHECK(big.r_star == q(300, 103));
  CHECK(big.k_star == 4);
  CHECK(cdc::parallel_server_count(3, 3) == 3);
  CHECK(cdc::parallel_server_count(3, 2) == 3 + 2);
  CHECK(cdc::parallel_server_count(3, q(5, 2)) == 3 + 1);
}

TEST_CASE("parallel optimum beats nearby probes on both sides") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int Q = 1 + static_cast<int>(rng() % 12);
    auto s = spec(Q, 1, q(1 + static_cast<long long>(rng() % 20), 1 + static_cast<long long>(rng() % 5)),
                  q(1 + static_cast<long long>(rng() % 20), 1 + static_cast<long long>(rng() % 5)));
    auto plan = cdc::plan_parallel(s);
    auto env = cdc::conv_envelope(Q);
    auto f = [&](const cdc::Rational& r) {
      auto a = s.cm * r / Q;
      auto b = s.cs * cdc::eval(env, r);
      return a > b ? a : b;
    };
    CHECK(plan.t_star == f(plan.r_star) + s.cr);
    for (auto eps : {q(1, 1000), q(1, 97), q(1, 7)}) {
      if (plan.r_star - eps >= 0) CHECK(f(plan.r_star) <= f(plan.r_star - eps));
      if (plan.r_star + eps <= Q) CHECK(f(plan.r_star) <= f(plan.r_star + eps));
    }
  }
}

TEST_CASE("uncoded baselines") {
  auto s = spec(3, 1, 1, 2, 1);
  auto seq = cdc::plan_uncoded(s, cdc::Mode::sequential);
  CHECK(seq.t_star == 2);
  CHECK(seq.k_star == 3);
  CHECK_FALSE(seq.coded);
  CHECK_FALSE(cdc::plan_uncoded(spec(3, 1, 2, 1), cdc::Mode::sequential).k_star.has_value());

  auto par = cdc::plan_uncoded(s, cdc::Mode::parallel);
  CHECK(par.t_star == q(5, 3));
  CHECK(par.r_star == 2);
  CHECK(par.k_star == 3);

  CHECK(cdc::plan_uncoded(spec(4, 1, 5, 5), cdc::Mode::parallel).t_star == q(5, 2));
}

TEST_CASE("coded never loses to uncoded, and costs scale") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    int Q = 1 + static_cast<int>(rng() % 20);
    auto s = spec(Q, 1, q(1 + static_cast<long long>(rng() % 50), 1 + static_cast<long long>(rng() % 9)),
                  q(1 + static_cast<long long>(rng() % 50), 1 + static_cast<long long>(rng() % 9)),
                  q(static_cast<long long>(rng() % 3)));
    for (auto mode : {cdc::Mode::sequential, cdc::Mode::parallel}) {
      auto coded = cdc::plan(s, mode, true);
      auto uncoded = cdc::plan(s, mode, false);
      CHECK(coded.t_star <= uncoded.t_star);
      CHECK(coded.r_star >= 0);
      CHECK(coded.r_star <= Q);
      if (coded.k_star) CHECK(*coded.k_star >= Q);

      auto scaled = s;
      scaled.cm *= 3;
      scaled.cs *= 3;
      auto again = cdc::plan(scaled, mode, true);
      CHECK(again.r_star == coded.r_star);
      CHECK(again.k_star == coded.k_star);
      CHECK(again.t_star - s.cr == 3 * (coded.t_star - s.cr));
    }
  }
}

TEST_CASE("server count shrinks as the repetition grows") {
  for (int Q = 2; Q <= 30; ++Q) {
    std::int64_t prev = -1;
    for (int r = 1; r < Q; ++r) {
      auto k = cdc::parallel_server_count(Q, r);
      CHECK(k == Q + (Q + r - 1) / r);
      if (prev >= 0) CHECK(k <= prev);
      prev = k;
    }
  }
}

TEST_CASE("sweep rows") {
  auto rows = cdc::sweep(4, q(1, 2), 2, 4, cdc::Mode::sequential);
  REQUIRE(rows.size() == 4);
  CHECK(rows.front().ratio == q(1, 2));
  CHECK(rows[1].ratio == 1);
  CHECK(rows.back().ratio == 2);
  for (const auto& row : rows) CHECK(row.coded.t_star <= row.uncoded.t_star);
  CHECK(cdc::sweep(4, 1, 1, 1, cdc::Mode::parallel).size() == 1);
  CHECK_THROWS_AS(cdc::sweep(4, 2, 1, 3, cdc::Mode::parallel), cdc::UsageError);
}
