#pragma once

#include <cstdint>
#include <string_view>

namespace tcsel {

// Derives an independent substream seed from a root seed and a label, so that
// every consumer of randomness (fixture, SVD start vector, permutations) is
// reproducible from the single root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

// 64-bit FNV-1a, used for config hashes.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace tcsel
