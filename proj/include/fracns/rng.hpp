#pragma once

#include <cstdint>
#include <random>

namespace fracns {

/// Root seed plus a stream counter; every random draw in the library comes
/// from an engine built from one of these.
struct Seed {
    std::uint64_t root = 0;
    std::uint64_t stream = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based stream id for (suite, replicate, mode). Independent of scheduling.
inline std::uint64_t stream_id(std::uint64_t suite, std::uint64_t replicate, std::uint64_t mode) {
    std::uint64_t h = splitmix64(suite);
    h = splitmix64(h ^ replicate);
    return splitmix64(h ^ (mode + 0x51ED2701ULL));
}

inline Seed derive_seed(std::uint64_t root, std::uint64_t suite, std::uint64_t replicate,
                        std::uint64_t mode) {
    return {root, stream_id(suite, replicate, mode)};
}

inline std::mt19937_64 make_engine(const Seed& s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.root), static_cast<std::uint32_t>(s.root >> 32),
                      static_cast<std::uint32_t>(s.stream),
                      static_cast<std::uint32_t>(s.stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace fracns
