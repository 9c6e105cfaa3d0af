#ifndef ARW_STABILIZE_HPP
#define ARW_STABILIZE_HPP

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "arw/config.hpp"
#include "arw/region.hpp"
#include "arw/tape.hpp"

namespace arw {

// Stabilization of a finite region terminates almost surely; the budget is a
// guard against bugs and extreme parameters, and hitting it aborts loudly.
inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000ULL;

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(std::uint64_t budget)
        : std::runtime_error("stabilization exceeded instruction budget of " +
                             std::to_string(budget)) {}
};

struct OdometerReport {
    std::vector<std::uint64_t> m;  // instructions used per vertex
    std::vector<std::uint64_t> M;  // jump instructions used per vertex
    Config final;
    std::int64_t absorbed = 0;

    // Next-instruction counters; equal to m by construction (every
    // consumption advances both).
    const std::vector<std::uint64_t>& h() const { return m; }

    bool operator==(const OdometerReport&) const = default;
};

inline OdometerReport make_report(const FiniteRegion& region, const Config& initial) {
    OdometerReport rep;
    rep.m.assign(static_cast<std::size_t>(region.n_vertices()), 0);
    rep.M.assign(static_cast<std::size_t>(region.n_vertices()), 0);
    rep.final = initial;
    return rep;
}

// One application of the toppling operator: consumes tau^{x, h(x)+1} and
// applies it to the current configuration. Defined for any configuration;
// legality is the caller's concern.
inline Instruction topple(const FiniteRegion& region, const InstructionTape& tape,
                          Config& cfg, OdometerReport& rep, Vertex x) {
    if (x == kSink) throw std::invalid_argument("topple: cannot topple the sink");
    const std::size_t xi = static_cast<std::size_t>(x);
    const Instruction ins = tape.sample(region, x, rep.m[xi] + 1);
    ++rep.m[xi];
    switch (ins.kind) {
        case InstructionKind::Jump: {
            ++rep.M[xi];
            if (is_active(cfg[xi])) {
                --cfg[xi];
                const Vertex y = region.neighbor(x, ins.jump_target);
                if (y == kSink) {
                    ++rep.absorbed;
                } else {
                    const std::size_t yi = static_cast<std::size_t>(y);
                    cfg[yi] = (cfg[yi] == kSleeping) ? 2 : cfg[yi] + 1;  // 1 + rho = 2
                }
            }
            break;
        }
        case InstructionKind::Sleep:
            if (cfg[xi] == 1) cfg[xi] = kSleeping;
            break;
        case InstructionKind::Neutral:
            break;
    }
    return ins;
}

enum class ToppleOrder { Fifo, Random };

struct StabilizeOptions {
    std::uint64_t budget = kDefaultBudget;
    ToppleOrder order = ToppleOrder::Fifo;
    std::uint64_t order_seed = 0;  // used only by ToppleOrder::Random
};

namespace detail {

// Topples until no vertex is unstable for the given threshold profile:
// weak_x == kSink gives full stabilization (unstable = at least one active
// particle); otherwise weak_x needs at least two active particles to be
// toppled (weak stabilization of (weak_x, K)).
inline void run_stabilization(const FiniteRegion& region, const InstructionTape& tape,
                              Config& cfg, OdometerReport& rep, Vertex weak_x,
                              const StabilizeOptions& opts) {
    const auto unstable = [&](Vertex v) {
        const std::int32_t s = cfg[static_cast<std::size_t>(v)];
        return is_active(s) && s >= 1 + (v == weak_x ? 1 : 0);
    };

    std::uint64_t used = 0;
    if (opts.order == ToppleOrder::Fifo) {
        std::deque<Vertex> queue;
        std::vector<char> queued(static_cast<std::size_t>(region.n_vertices()), 0);
        for (Vertex v = 0; v < region.n_vertices(); ++v)
            if (unstable(v)) {
                queue.push_back(v);
                queued[static_cast<std::size_t>(v)] = 1;
            }
        while (!queue.empty()) {
            const Vertex v = queue.front();
            queue.pop_front();
            queued[static_cast<std::size_t>(v)] = 0;
            if (!unstable(v)) continue;
            const Instruction ins = topple(region, tape, cfg, rep, v);
            if (++used > opts.budget) throw BudgetExceeded(opts.budget);
            if (unstable(v) && !queued[static_cast<std::size_t>(v)]) {
                queue.push_back(v);
                queued[static_cast<std::size_t>(v)] = 1;
            }
            if (ins.is_jump()) {
                const Vertex y = region.neighbor(v, ins.jump_target);
                if (y != kSink && unstable(y) && !queued[static_cast<std::size_t>(y)]) {
                    queue.push_back(y);
                    queued[static_cast<std::size_t>(y)] = 1;
                }
            }
        }
    } else {
        rng::Stream order(opts.order_seed, rng::kOrder, 0);
        std::vector<Vertex> pool;
        std::vector<std::int32_t> pos(static_cast<std::size_t>(region.n_vertices()), -1);
        const auto add = [&](Vertex v) {
            if (pos[static_cast<std::size_t>(v)] < 0) {
                pos[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(pool.size());
                pool.push_back(v);
            }
        };
        const auto remove = [&](Vertex v) {
            const std::int32_t p = pos[static_cast<std::size_t>(v)];
            if (p < 0) return;
            pool[static_cast<std::size_t>(p)] = pool.back();
            pos[static_cast<std::size_t>(pool.back())] = p;
            pool.pop_back();
            pos[static_cast<std::size_t>(v)] = -1;
        };
        for (Vertex v = 0; v < region.n_vertices(); ++v)
            if (unstable(v)) add(v);
        while (!pool.empty()) {
            const Vertex v = pool[static_cast<std::size_t>(order.next_below(pool.size()))];
            const Instruction ins = topple(region, tape, cfg, rep, v);
            if (++used > opts.budget) throw BudgetExceeded(opts.budget);
            if (!unstable(v)) remove(v);
            if (ins.is_jump()) {
                const Vertex y = region.neighbor(v, ins.jump_target);
                if (y != kSink && unstable(y)) add(y);
            }
        }
    }
}

}  // namespace detail

// Full stabilization of the region: legal topplings until every interior
// vertex is empty or sleeping. The report is order-independent (Abelian).
inline OdometerReport stabilize(const FiniteRegion& region, const Config& initial,
                                const InstructionTape& tape,
                                const StabilizeOptions& opts = {}) {
    OdometerReport rep = make_report(region, initial);
    detail::run_stabilization(region, tape, rep.final, rep, kSink, opts);
    return rep;
}

struct WeakStabOutcome {
    OdometerReport report;  // m^1, M^1, eta_1
    Vertex x;
};

// Weak stabilization of (x, K): x is toppled only while it holds at least
// two active particles; every other vertex is stabilized fully.
inline WeakStabOutcome weak_stabilize(Vertex x, const FiniteRegion& region,
                                      const Config& initial, const InstructionTape& tape,
                                      const StabilizeOptions& opts = {}) {
    if (x == kSink) throw std::invalid_argument("weak_stabilize: x must be interior");
    OdometerReport rep = make_report(region, initial);
    detail::run_stabilization(region, tape, rep.final, rep, x, opts);
    return {std::move(rep), x};
}

struct ViaWeakOutcome {
    std::int64_t T = 0;                             // number of iterations
    std::vector<std::vector<std::uint64_t>> rounds; // cumulative m^i, i = 1..T
    std::vector<std::uint64_t> first_round_M;       // M^1, jump odometer of round 1
    OdometerReport report;                          // totals; equals stabilize()
};

// Stabilization via weak stabilization: a weak stabilization of (x,K),
// then rounds of one instruction at x followed (if that instruction is not
// sleep) by another weak stabilization, until the configuration is stable.
inline ViaWeakOutcome stabilize_via_weak(Vertex x, const FiniteRegion& region,
                                         const Config& initial, const InstructionTape& tape,
                                         const StabilizeOptions& opts = {}) {
    if (x == kSink) throw std::invalid_argument("stabilize_via_weak: x must be interior");
    ViaWeakOutcome out;
    out.report = make_report(region, initial);
    Config& cfg = out.report.final;

    detail::run_stabilization(region, tape, cfg, out.report, x, opts);
    out.rounds.push_back(out.report.m);
    out.first_round_M = out.report.M;
    out.T = 1;
    while (!is_stable_state(cfg[static_cast<std::size_t>(x)])) {
        // x holds exactly one active particle here.
        const Instruction ins = topple(region, tape, cfg, out.report, x);
        if (ins.kind != InstructionKind::Sleep)
            detail::run_stabilization(region, tape, cfg, out.report, x, opts);
        out.rounds.push_back(out.report.m);
        ++out.T;
    }
    return out;
}

// Enforced stabilization: full stabilization under T^x(tau). The final
// configuration necessarily has x empty.
inline OdometerReport enforced_stabilize(Vertex x, const FiniteRegion& region,
                                         const Config& initial, const InstructionTape& tape,
                                         const StabilizeOptions& opts = {}) {
    if (x == kSink) throw std::invalid_argument("enforced_stabilize: x must be interior");
    return stabilize(region, initial, tape.ignore_sleep_at(region, x), opts);
}

// A_{(x,K)}: jump instructions used at x by the enforced stabilization but
// not by the weak stabilization of (x,K).
inline std::int64_t excess_jumps(Vertex x, const FiniteRegion& region, const Config& initial,
                                 const InstructionTape& tape, const StabilizeOptions& opts = {}) {
    const OdometerReport enforced = enforced_stabilize(x, region, initial, tape, opts);
    const WeakStabOutcome weak = weak_stabilize(x, region, initial, tape, opts);
    return static_cast<std::int64_t>(enforced.M[static_cast<std::size_t>(x)]) -
           static_cast<std::int64_t>(weak.report.M[static_cast<std::size_t>(x)]);
}

}  // namespace arw

#endif
