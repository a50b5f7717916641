#pragma once

#include <cstdint>
#include <random>

namespace quickdetect {

// Seed of replication `index` under `master_seed`: the splitmix64 finaliser
// applied to master_seed + (index + 1) * 0x9E3779B97F4A7C15. Replications
// therefore never share a stream, and the mapping does not depend on how
// replications are scheduled across threads.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Owns one engine and one standard normal distribution. Every draw made by a
// simulation goes through a single stream, so a (model, seed) pair always
// yields the same noise sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace quickdetect
