#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fracsub {

// Reproducible stream of uniform deviates identified by (master_seed,
// stream_id).  Single owner: movable, not copyable.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                          0x5eedu};
        engine_.seed(seq);
    }

    RngStream(const RngStream&) = delete;
    RngStream& operator=(const RngStream&) = delete;
    RngStream(RngStream&&) noexcept = default;
    RngStream& operator=(RngStream&&) noexcept = default;

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unit-mean exponential deviate.
    double exponential() { return -std::log(uniform()); }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

} // namespace fracsub
