#pragma once

#include "cdc/core.hpp"

namespace fixtures {

inline cdc::Rational q(long long num, long long den = 1) { return cdc::make_rational(num, den); }

inline cdc::JobSpec spec(int Q, int N, cdc::Rational cm, cdc::Rational cs, cdc::Rational cr = 0) {
  cdc::JobSpec s;
  s.q = Q;
  s.n = N;
  s.cm = cm;
  s.cs = cs;
  s.cr = cr;
  return s;
}

// Q=3, N=6, c_m=1, c_s=2, c_r=1: the five-server worked example.
inline cdc::JobSpec worked_spec() { return spec(3, 6, 1, 2, 1); }

inline cdc::Placement worked_placement() {
  cdc::Placement p;
  p.k = 5;
  p.map_sets = {{1, 2, 3, 4}, {3, 4, 5, 6}, {1, 2, 5, 6}, {1, 3, 5}, {2, 4, 6}};
  p.reduce_sets = {{1}, {2}, {3}, {}, {}};
  return p;
}

}  // namespace fixtures
