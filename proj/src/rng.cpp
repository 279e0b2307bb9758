#include "logonet/rng.hpp"

#include <cmath>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t w = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(w >> 32);
    lo = static_cast<std::uint32_t>(w);
}

inline std::array<std::uint32_t, 4> round_once(const std::array<std::uint32_t, 4>& c,
                                               const std::array<std::uint32_t, 2>& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        c = round_once(c, k);
    }
    return c;
}

std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t block,
                                          std::uint64_t stream) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    return philox4x32_10(ctr, key);
}

std::uint32_t rng_stream::next_u32() {
    if (pos_ == 4) {
        buf_ = philox_block(seed_, block_++, stream_);
        pos_ = 0;
    }
    return buf_[pos_++];
}

std::uint64_t rng_stream::next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

double rng_stream::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double rng_stream::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

double rng_stream::next_gamma(double shape, double rate) {
    if (shape < 1.0 || rate <= 0.0)
        throw domain_error("next_gamma: requires shape >= 1 and rate > 0");
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = next_uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

std::uint64_t rng_stream::next_below(std::uint64_t n) {
    if (n == 0) throw domain_error("next_below: n must be positive");
    for (;;) {
        std::uint64_t x = next_u64();
        std::uint64_t r = x % n;
        if (x - r <= ~std::uint64_t{0} - (n - 1)) return r;
    }
}

}  // namespace logonet
