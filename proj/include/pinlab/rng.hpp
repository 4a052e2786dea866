#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace pinlab::rng {

/// Identifier written into every run manifest.
inline constexpr std::string_view kAlgorithmId = "philox4x64-10";

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al., SC'11). Stateless: the output
/// block is a pure function of (counter, key).
Counter philox4x64(Counter ctr, Key key);

/// Maps 64 random bits to a double strictly inside (0, 1).
inline double to_open_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

/// Domain-separates the counter space of one key.
enum class StreamTag : std::uint64_t {
    DisorderField = 0x6669656c64ULL,
    Renewal = 0x72656e6577ULL,
    Generic = 0x67656e6572ULL,
};

/// Sequential view over a Philox key. Block i of the stream is
/// philox4x64({i, tag, 0, 0}, {seed, stream}); the stream position fully
/// determines the next output, so copies replay identically.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream, StreamTag tag = StreamTag::Generic)
        : key_{seed, stream}, tag_(static_cast<std::uint64_t>(tag)) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buf_ = philox4x64({block_++, tag_, 0, 0}, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    double uniform() { return to_open_unit(next_u64()); }

    std::uint64_t blocks_consumed() const { return block_; }

private:
    Key key_;
    std::uint64_t tag_;
    std::uint64_t block_ = 0;
    Counter buf_{};
    int pos_ = 4;
};

/// SplitMix64 finalizer, used to derive child seeds deterministically.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

/// 64-bit FNV-1a, used for config hashes and law identifiers.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pinlab::rng
