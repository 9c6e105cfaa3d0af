#ifndef ARW_CONFIG_HPP
#define ARW_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arw/region.hpp"
#include "arw/rng.hpp"

namespace arw {

// Per-vertex particle state: 0 = empty, kSleeping = one S-particle,
// n >= 1 = n active particles.
inline constexpr std::int32_t kSleeping = -1;

using Config = std::vector<std::int32_t>;

inline bool is_active(std::int32_t s) { return s >= 1; }
inline bool is_stable_state(std::int32_t s) { return s == 0 || s == kSleeping; }

// Rank in the paper's order 0 < rho < 1 < 2 < ...; used by monotonicity
// checks, not by the simulation itself.
inline int state_rank(std::int32_t s) {
    if (s == 0) return 0;
    if (s == kSleeping) return 1;
    return s + 1;
}

inline std::int64_t particle_count(const Config& c) {
    std::int64_t n = 0;
    for (std::int32_t s : c) n += (s == kSleeping) ? 1 : s;
    return n;
}

inline bool is_stable(const Config& c) {
    for (std::int32_t s : c)
        if (!is_stable_state(s)) return false;
    return true;
}

// Independent Poisson(mu) active particles per interior vertex. Sampled by
// Knuth's product method from the counter-based stream, keyed per site, so
// the draw at a site does not depend on region shape or thread count.
inline Config sample_poisson_config(const FiniteRegion& region, double mu,
                                    std::uint64_t seed) {
    if (mu < 0.0) throw std::invalid_argument("sample_poisson_config: mu must be >= 0");
    Config c(static_cast<std::size_t>(region.n_vertices()), 0);
    if (mu == 0.0) return c;
    const double limit = std::exp(-mu);
    for (Vertex v = 0; v < region.n_vertices(); ++v) {
        rng::Stream s(seed, rng::kPoisson, region.site_key(v));
        std::int32_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= s.next_unit();
        } while (p > limit);
        c[static_cast<std::size_t>(v)] = k - 1;
    }
    return c;
}

}  // namespace arw

#endif
