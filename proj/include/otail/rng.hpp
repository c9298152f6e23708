#pragma once

#include <cstdint>

namespace otail {

// Deterministic per-replicate stream: the (seed, stream) pair is hashed into
// an independent SplitMix64 state, so replicate k of a run always sees the
// same draws no matter how replicates are scheduled.
class RngStream {
  public:
    static RngStream make(std::uint64_t seed, std::uint64_t stream) {
        RngStream r;
        r.state_ = mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // strictly inside (0,1); safe for -log(u) style inverse transforms
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

}
