#pragma once

#include <cstdint>
#include <vector>

namespace flt {

// Identifies a reproducible random sequence. The same (seed, stream_id)
// always produces the same sequence, independent of thread scheduling.
// Parallel work units each derive their own child stream, so nothing is
// consumed from a shared generator.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Deterministic sub-stream for work unit i (trial, replicate, ...).
  RngStream child(std::uint64_t i) const;
};

// Sequential cursor over a stream. splitmix64 core: the state advances by a
// fixed odd constant, the output is an avalanche mix, so the n-th draw is a
// pure function of (seed, stream_id, n).
class RngEngine {
 public:
  explicit RngEngine(RngStream stream);

  std::uint64_t next_u64();
  double uniform_01();  // strictly inside (0,1)
  double normal();      // inverse-CDF of uniform_01

 private:
  std::uint64_t state_;
};

std::vector<double> sample_standard_normal(RngStream stream, std::size_t count);

}  // namespace flt
