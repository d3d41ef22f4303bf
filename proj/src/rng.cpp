#include "flt/rng.hpp"

#include <stdexcept>

#include "flt/special.hpp"

namespace flt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::child(std::uint64_t i) const {
  return RngStream{seed, mix64(stream_id ^ (kGolden * (i + 1)))};
}

RngEngine::RngEngine(RngStream stream)
    : state_(mix64(stream.seed + kGolden * (stream.stream_id + 1))) {}

std::uint64_t RngEngine::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngEngine::uniform_01() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are never returned
  return (static_cast<double>(next_u64() >> 11) + 0.5) *
         (1.0 / 9007199254740992.0);
}

double RngEngine::normal() { return normal_quantile(uniform_01()); }

std::vector<double> sample_standard_normal(RngStream stream,
                                           std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample_standard_normal: count == 0");
  RngEngine eng(stream);
  std::vector<double> out(count);
  for (auto& v : out) v = eng.normal();
  return out;
}

}  // namespace flt
