#ifndef SEMTURBO_RNG_HPP
#define SEMTURBO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace semturbo::rng {

// Fixed tags for deriving independent substreams from one master seed.
// Streams are keyed as (seed, tag, a, b) so every image/block/epoch gets
// its own reproducible sequence regardless of evaluation order.
enum class StreamTag : std::uint64_t {
    code_construction = 1,
    weight_init = 2,
    shuffle = 3,
    corruption = 4,
    channel_noise = 5,
    message_bits = 6,
};

// splitmix64 finalizer (Steele, Lea, Fortuna 2014); counter mode below.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t k = 0x6a09e667f3bcc908ULL;
    for (auto p : parts) k = mix64(k ^ p);
    return k;
}

// Counter-based generator: output i is mix64(key + i * golden ratio).
// Stateless apart from the counter, so substreams never collide and
// parallel consumers stay deterministic.
class Stream {
  public:
    explicit Stream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    // uniform in [0,1), 53-bit resolution
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // standard normal via Box-Muller; second value cached
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline Stream derive(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Stream(derive_key({seed, static_cast<std::uint64_t>(tag), a, b}));
}

}  // namespace semturbo::rng

#endif
