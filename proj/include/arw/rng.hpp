#ifndef ARW_RNG_HPP
#define ARW_RNG_HPP

#include <cstdint>

namespace arw {

// Counter-based pseudorandom function. Every random draw in the library is a
// pure function of (seed, domain tag, key, counter), so the same values are
// produced no matter how many threads consume them or in which order.

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Domain tags keep the instruction stream, the Poisson stream, the walk
// stream and per-trial seed derivation statistically disjoint.
enum Domain : std::uint64_t {
    kTape = 1,
    kPoisson = 2,
    kWalk = 3,
    kTrialSeed = 4,
    kOrder = 5,
    kState = 6,
};

inline std::uint64_t prf(std::uint64_t seed, std::uint64_t tag,
                         std::uint64_t key, std::uint64_t counter) {
    std::uint64_t z = mix(seed + kGolden * tag);
    z = mix(z ^ (key + kGolden));
    z = mix(z ^ (counter + kGolden));
    return z;
}

inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t tag,
                      std::uint64_t key, std::uint64_t counter) {
    return to_unit(prf(seed, tag, key, counter));
}

// Derives the seed for one Monte Carlo trial from the master seed. Trial
// sets are therefore identical across thread counts.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
    return prf(master_seed, kTrialSeed, trial, 0);
}

// Sequential stream view over the counter-based function, for consumers that
// just need "the next draw" (random walks, toppling-order shuffles).
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t key)
        : seed_(seed), tag_(tag), key_(key) {}

    std::uint64_t next_bits() { return prf(seed_, tag_, key_, counter_++); }
    double next_unit() { return to_unit(next_bits()); }

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n)) % n;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t tag_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace arw

#endif
