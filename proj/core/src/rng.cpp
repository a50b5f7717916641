#include "quickdetect/rng.hpp"

namespace quickdetect {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace quickdetect
