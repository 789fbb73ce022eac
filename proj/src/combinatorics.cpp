#include "cdc/combinatorics.hpp"

#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cdc {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Multiplicative formula keeps every partial product an exact binomial.
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    std::int64_t factor = n - k + i;
    std::int64_t g = std::gcd(result, i);
    std::int64_t reduced = result / g;
    std::int64_t f = factor / (i / g);
    if (reduced > std::numeric_limits<std::int64_t>::max() / f) {
      throw std::overflow_error("binomial coefficient overflows int64");
    }
    result = reduced * f;
  }
  return result;
}

std::vector<SubsetMask> colex_subsets(int n, int k) {
  if (n < 0 || n > max_mask_elements) {
    throw std::out_of_range("subset enumeration supports at most 62 elements");
  }
  std::vector<SubsetMask> out;
  if (k < 0 || k > n) return out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const SubsetMask limit = SubsetMask{1} << n;
  SubsetMask mask = (SubsetMask{1} << k) - 1;
  while (mask < limit) {
    out.push_back(mask);
    // Gosper's hack: next larger integer with the same popcount.
    SubsetMask low = mask & (~mask + 1);
    SubsetMask ripple = mask + low;
    mask = ripple | (((ripple ^ mask) >> 2) / low);
  }
  return out;
}

std::vector<int> mask_to_ids(SubsetMask mask) {
  std::vector<int> ids;
  ids.reserve(std::popcount(mask));
  while (mask) {
    ids.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return ids;
}

SubsetMask ids_to_mask(const std::vector<int>& ids) {
  SubsetMask mask = 0;
  for (int id : ids) {
    if (id < 1 || id > max_mask_elements) throw std::out_of_range("subset element out of range");
    mask |= SubsetMask{1} << (id - 1);
  }
  return mask;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  std::int64_t g = std::gcd(a, b);
  std::int64_t x = a / g;
  if (x > std::numeric_limits<std::int64_t>::max() / b) throw std::overflow_error("lcm overflows int64");
  return x * b;
}

}  // namespace cdc
