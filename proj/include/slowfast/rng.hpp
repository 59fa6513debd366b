#pragma once

// Seeded, stream-addressable RNG. Identical (seed, stream) reproduces the
// same draws bit-for-bit on a fixed platform/toolchain; distinct streams are
// statistically independent. Replica tasks each own one stream, so parallel
// runs are reproducible regardless of scheduling.

#include <cstdint>
#include <random>

namespace slowfast {

std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    double normal();                                // N(0, 1)
    double normal(double sd) { return sd * normal(); }
    double uniform();                               // U(0, 1)

    // derived stream for a sub-purpose; pure in (this stream id, child)
    RngStream fork(std::uint64_t child) const;

    std::uint64_t seed_value() const { return seed_; }
    std::uint64_t stream_value() const { return stream_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::mt19937_64 eng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

// stream-id layout used by the experiment drivers: one id per
// (experiment tag, epsilon index, replica, channel), collision-free by mixing
std::uint64_t compose_stream(std::uint64_t tag, std::uint64_t eps_idx,
                             std::uint64_t replica, std::uint64_t channel);

} // namespace slowfast
