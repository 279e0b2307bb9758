#pragma once

#include <array>
#include <cstdint>

namespace logonet {

// Philox4x32-10 counter-based generator. key = 64-bit user seed,
// counter words 0-1 = block index, words 2-3 = stream id, so any
// (seed, stream) pair yields an independent, randomly accessible
// sequence and parallel generation reproduces sequential output.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key);

std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t block,
                                          std::uint64_t stream);

class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // uniform on the open interval (0, 1), 53-bit resolution
    double next_uniform();
    // standard normal via Box-Muller (second value cached)
    double next_normal();
    // Gamma(shape, rate) via Marsaglia-Tsang; requires shape >= 1
    double next_gamma(double shape, double rate);
    // unbiased integer in [0, n)
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t seed_, stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace logonet
