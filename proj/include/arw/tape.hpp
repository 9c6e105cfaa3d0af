#ifndef ARW_TAPE_HPP
#define ARW_TAPE_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arw/region.hpp"
#include "arw/rng.hpp"

namespace arw {

enum class InstructionKind : std::uint8_t { Jump, Sleep, Neutral };

struct Instruction {
    InstructionKind kind;
    int jump_target = -1;  // neighbor index, valid iff kind == Jump

    bool is_jump() const { return kind == InstructionKind::Jump; }
    bool operator==(const Instruction&) const = default;
};

// Unit-interval partition of the instruction law: Sleep on [0, s) with
// s = lambda/(1+lambda), then d equal slices for Jump(0..d-1).
inline Instruction instruction_from_uniform(double u, double lambda, int degree) {
    const double s = lambda / (1.0 + lambda);
    if (u < s) return {InstructionKind::Sleep};
    int i = static_cast<int>((u - s) / ((1.0 - s) / degree));
    i = std::min(i, degree - 1);
    return {InstructionKind::Jump, i};
}

// Reproducible instruction array tau = (tau^{x,j}). Sampling is a pure
// function of (master_seed, site key, j, lambda, degree, erased), so the
// same array can be replayed under different stabilization strategies.
// `erased` holds the sites where Sleep reads as Neutral (the T^x transform).
class InstructionTape {
  public:
    InstructionTape(std::uint64_t master_seed, double lambda, int degree)
        : master_seed_(master_seed), lambda_(lambda), degree_(degree) {
        if (!(lambda > 0.0)) throw std::invalid_argument("InstructionTape: lambda must be > 0");
        if (degree < 1) throw std::invalid_argument("InstructionTape: degree must be >= 1");
    }

    std::uint64_t master_seed() const { return master_seed_; }
    double lambda() const { return lambda_; }
    int degree() const { return degree_; }
    const std::vector<std::uint64_t>& erased() const { return erased_; }

    bool is_erased(std::uint64_t site_key) const {
        return std::binary_search(erased_.begin(), erased_.end(), site_key);
    }

    // tau^{x,j}, j >= 1, addressed by region-independent site key.
    Instruction sample_key(std::uint64_t site_key, std::uint64_t j) const {
        const double u = rng::uniform(master_seed_, rng::kTape, site_key, j);
        Instruction ins = instruction_from_uniform(u, lambda_, degree_);
        if (ins.kind == InstructionKind::Sleep && is_erased(site_key))
            return {InstructionKind::Neutral};
        return ins;
    }

    Instruction sample(const FiniteRegion& region, Vertex x, std::uint64_t j) const {
        return sample_key(region.site_key(x), j);
    }

    // T^x(tau): identical tape except Sleep at x reads as Neutral. Idempotent.
    InstructionTape ignore_sleep_at_key(std::uint64_t site_key) const {
        InstructionTape t = *this;
        if (!t.is_erased(site_key)) {
            t.erased_.insert(std::lower_bound(t.erased_.begin(), t.erased_.end(), site_key),
                             site_key);
        }
        return t;
    }

    InstructionTape ignore_sleep_at(const FiniteRegion& region, Vertex x) const {
        return ignore_sleep_at_key(region.site_key(x));
    }

  private:
    std::uint64_t master_seed_;
    double lambda_;
    int degree_;
    std::vector<std::uint64_t> erased_;  // sorted
};

}  // namespace arw

#endif
