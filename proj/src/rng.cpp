#include "slowfast/rng.hpp"

namespace slowfast {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

// expand (seed, stream) into engine seed material; two rounds of splitmix
// over the xored pair give well-separated streams for any id layout
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t a = splitmix64(seed);
    std::uint64_t b = splitmix64(a ^ splitmix64(stream));
    std::uint64_t c = splitmix64(b + 0x6A09E667F3BCC909ULL);
    std::uint64_t d = splitmix64(c ^ stream);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), eng_(make_engine(seed, stream)) {}

double RngStream::normal() { return gauss_(eng_); }

double RngStream::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
}

RngStream RngStream::fork(std::uint64_t child) const {
    return RngStream(seed_, splitmix64(stream_ ^ splitmix64(child)));
}

std::uint64_t compose_stream(std::uint64_t tag, std::uint64_t eps_idx,
                             std::uint64_t replica, std::uint64_t channel) {
    std::uint64_t s = splitmix64(tag);
    s = splitmix64(s ^ splitmix64(eps_idx + 0x100));
    s = splitmix64(s ^ splitmix64(replica + 0x10000));
    s = splitmix64(s ^ splitmix64(channel + 0x1000000));
    return s;
}

} // namespace slowfast
