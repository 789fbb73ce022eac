#pragma once

#include <cstdint>
#include <vector>

namespace cdc {

// Subsets of {1..Q} as bit masks: element j <-> bit (j-1). Requires Q <= 62.
using SubsetMask = std::uint64_t;

inline constexpr int max_mask_elements = 62;

/// C(n, k), 0 when k < 0 or k > n. Throws std::overflow_error past int64.
std::int64_t binomial(std::int64_t n, std::int64_t k);

/// All k-subsets of {1..n} in colexicographic order (equivalently ascending mask value).
std::vector<SubsetMask> colex_subsets(int n, int k);

std::vector<int> mask_to_ids(SubsetMask mask);
SubsetMask ids_to_mask(const std::vector<int>& ids);

inline bool mask_has(SubsetMask mask, int id) { return (mask >> (id - 1)) & 1U; }

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);  // throws std::overflow_error

}  // namespace cdc
