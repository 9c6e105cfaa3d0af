#ifndef ARW_VERIFY_HPP
#define ARW_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "arw/config.hpp"
#include "arw/estimators.hpp"
#include "arw/greens.hpp"
#include "arw/region.hpp"
#include "arw/rng.hpp"
#include "arw/stabilize.hpp"
#include "arw/tape.hpp"

namespace arw {
namespace verify {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

inline CheckResult merge(const std::string& name, const std::vector<CheckResult>& parts) {
    CheckResult out{name, true, ""};
    for (const auto& p : parts) {
        if (!p.passed) {
            out.passed = false;
            if (!out.detail.empty()) out.detail += "; ";
            out.detail += p.name + ": " + p.detail;
        }
    }
    if (out.passed) out.detail = "ok";
    return out;
}

// ---------------------------------------------------------------------------
// Randomized instance generation for the exact property suites.
// ---------------------------------------------------------------------------

// Small region (at most 40 vertices) from both families. `nested_headroom`
// keeps one radius of slack so the same draw can be grown by one.
inline FiniteRegion random_small_region(rng::Stream& s, bool nested_headroom = false) {
    const int extra = nested_headroom ? 1 : 0;
    switch (s.next_below(5)) {
        case 0:
            return make_lattice_ball(1, 1 + static_cast<int>(s.next_below(20 - extra)));
        case 1:
            return make_lattice_ball(2, 1 + static_cast<int>(s.next_below(4 - extra)));
        case 2:
            return make_lattice_ball(3, 1 + static_cast<int>(s.next_below(2 - extra)));
        case 3:
            return make_tree_ball(3, 1 + static_cast<int>(s.next_below(4 - extra)));
        default:
            return make_tree_ball(4, 1 + static_cast<int>(s.next_below(3 - extra)));
    }
}

// Random configuration mixing empty, sleeping and small active counts.
inline Config random_config(const FiniteRegion& region, rng::Stream& s,
                            bool allow_sleeping = true) {
    Config c(static_cast<std::size_t>(region.n_vertices()), 0);
    for (auto& v : c) {
        switch (s.next_below(8)) {
            case 4:
                v = allow_sleeping ? kSleeping : 1;
                break;
            case 5:
            case 6:
                v = 1;
                break;
            case 7:
                v = 2;
                break;
            default:
                v = 0;
        }
    }
    return c;
}

inline double random_lambda(rng::Stream& s) {
    static const double choices[3] = {0.1, 1.0, 10.0};
    return choices[s.next_below(3)];
}

// Pointwise comparison in the order empty < sleeping < 1 < 2 < ...
inline bool config_leq(const Config& a, const Config& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (state_rank(a[i]) > state_rank(b[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Exact property suites.
// ---------------------------------------------------------------------------

// Toppling-order independence: identical reports under the deterministic
// queue and under two independently randomized orders, plus particle
// conservation and the stability postcondition.
inline CheckResult check_abelian(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 1);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        const double mu = s.next_unit();
        Config cfg = sample_poisson_config(region, mu, s.next_bits());
        for (auto& v : cfg)
            if (v == 1 && s.next_below(4) == 0) v = kSleeping;
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);

        const OdometerReport a = stabilize(region, cfg, tape);
        const OdometerReport b = stabilize(
            region, cfg, tape,
            {.order = ToppleOrder::Random, .order_seed = s.next_bits()});
        const OdometerReport c = stabilize(
            region, cfg, tape,
            {.order = ToppleOrder::Random, .order_seed = s.next_bits()});
        if (!(a == b && a == c))
            return {"abelian", false, "order-dependent report at instance " + std::to_string(i)};
        if (!is_stable(a.final))
            return {"abelian", false, "unstable final configuration at instance " + std::to_string(i)};
        if (particle_count(cfg) != particle_count(a.final) + a.absorbed)
            return {"abelian", false, "particle count not conserved at instance " + std::to_string(i)};

        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const WeakStabOutcome wa = weak_stabilize(x, region, cfg, tape);
        const WeakStabOutcome wb = weak_stabilize(
            x, region, cfg, tape,
            {.order = ToppleOrder::Random, .order_seed = s.next_bits()});
        if (!(wa.report == wb.report))
            return {"abelian", false, "weak stabilization order-dependent at instance " + std::to_string(i)};
        if (is_active(wa.report.final[static_cast<std::size_t>(x)]) &&
            wa.report.final[static_cast<std::size_t>(x)] > 1)
            return {"abelian", false, "weakly stable postcondition failed at instance " + std::to_string(i)};
        for (Vertex v = 0; v < region.n_vertices(); ++v)
            if (v != x && !is_stable_state(wa.report.final[static_cast<std::size_t>(v)]))
                return {"abelian", false, "weak stabilization left an unstable vertex at instance " + std::to_string(i)};
    }
    return {"abelian", true, std::to_string(instances) + " instances, exact equality"};
}

// Monotonicity in the region and the initial configuration: nested balls
// with pointwise-dominating configurations under a shared tape give
// pointwise-dominating odometers.
inline CheckResult check_nested_monotonicity(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 2);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion small = random_small_region(s, true);
        const FiniteRegion big = make_ball(small.family, small.family == Family::LatticeZd
                                                             ? small.degree / 2
                                                             : small.degree,
                                           small.radius + 1);
        const Config big_cfg = random_config(big, s);
        Config small_cfg(static_cast<std::size_t>(small.n_vertices()), 0);
        std::vector<Vertex> in_big(static_cast<std::size_t>(small.n_vertices()));
        for (Vertex v = 0; v < small.n_vertices(); ++v) {
            const Vertex w = big.index_of_key(small.site_key(v));
            in_big[static_cast<std::size_t>(v)] = w;
            // any state whose rank is at most the rank of the big config
            const int rank = state_rank(big_cfg[static_cast<std::size_t>(w)]);
            const int pick = static_cast<int>(s.next_below(static_cast<std::uint64_t>(rank + 1)));
            small_cfg[static_cast<std::size_t>(v)] =
                pick == 0 ? 0 : (pick == 1 ? kSleeping : pick - 1);
        }
        const InstructionTape tape(s.next_bits(), random_lambda(s), small.degree);
        const OdometerReport ra = stabilize(small, small_cfg, tape);
        const OdometerReport rb = stabilize(big, big_cfg, tape);
        for (Vertex v = 0; v < small.n_vertices(); ++v) {
            const Vertex w = in_big[static_cast<std::size_t>(v)];
            if (ra.m[static_cast<std::size_t>(v)] > rb.m[static_cast<std::size_t>(w)])
                return {"nested monotonicity", false,
                        "odometer decreased under growth at instance " + std::to_string(i)};
        }
    }
    return {"nested monotonicity", true, std::to_string(instances) + " instances"};
}

// Erasing sleep instructions at one vertex can only increase the odometer.
inline CheckResult check_enforced_monotonicity(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 3);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        const Config cfg = random_config(region, s);
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const OdometerReport plain = stabilize(region, cfg, tape);
        const OdometerReport enforced = enforced_stabilize(x, region, cfg, tape);
        for (std::size_t v = 0; v < plain.m.size(); ++v)
            if (plain.m[v] > enforced.m[v])
                return {"enforced monotonicity", false,
                        "odometer decreased under sleep erasure at instance " + std::to_string(i)};
    }
    return {"enforced monotonicity", true, std::to_string(instances) + " instances"};
}

// Least action: any legal partial toppling sequence (with the distinguished
// vertex toppled only above one active particle) uses at most the weak
// stabilization's odometer at every vertex.
inline CheckResult check_least_action(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 4);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        const Config cfg = random_config(region, s);
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));

        Config partial = cfg;
        OdometerReport partial_rep = make_report(region, cfg);
        const int max_steps = static_cast<int>(s.next_below(200));
        for (int step = 0; step < max_steps; ++step) {
            std::vector<Vertex> legal;
            for (Vertex v = 0; v < region.n_vertices(); ++v) {
                const std::int32_t st = partial[static_cast<std::size_t>(v)];
                if (is_active(st) && st >= 1 + (v == x ? 1 : 0)) legal.push_back(v);
            }
            if (legal.empty()) break;
            topple(region, tape, partial, partial_rep,
                   legal[s.next_below(legal.size())]);
        }

        const WeakStabOutcome weak = weak_stabilize(x, region, cfg, tape);
        for (std::size_t v = 0; v < partial_rep.m.size(); ++v)
            if (partial_rep.m[v] > weak.report.m[v])
                return {"least action", false,
                        "partial sequence exceeded the weak odometer at instance " +
                            std::to_string(i)};
    }
    return {"least action", true, std::to_string(instances) + " instances"};
}

// Weak stabilization never consumes sleep instructions at the distinguished
// vertex while it matters, so erasing them there changes nothing.
inline CheckResult check_weak_tape_invariance(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 5);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        const Config cfg = random_config(region, s);
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const WeakStabOutcome a = weak_stabilize(x, region, cfg, tape);
        const WeakStabOutcome b = weak_stabilize(x, region, cfg, tape.ignore_sleep_at(region, x));
        if (!(a.report == b.report))
            return {"weak tape invariance", false,
                    "weak stabilization changed under sleep erasure at instance " +
                        std::to_string(i)};
    }
    return {"weak tape invariance", true, std::to_string(instances) + " instances"};
}

// Adding one active particle at x and weakly stabilizing equals stabilizing
// the original configuration with sleep erased at x: same odometers, same
// configuration away from x, and exactly the extra particle left at x.
inline CheckResult check_particle_addition(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 6);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        Config cfg = random_config(region, s);
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const std::size_t xi = static_cast<std::size_t>(x);
        // the identity pairs k with k+1 active particles at x
        if (cfg[xi] == kSleeping) cfg[xi] = 0;

        Config plus = cfg;
        ++plus[xi];
        const WeakStabOutcome weak = weak_stabilize(x, region, plus, tape);
        const OdometerReport enforced = enforced_stabilize(x, region, cfg, tape);
        if (weak.report.m != enforced.m || weak.report.M != enforced.M ||
            weak.report.absorbed != enforced.absorbed)
            return {"particle addition", false,
                    "odometers differ at instance " + std::to_string(i)};
        for (Vertex v = 0; v < region.n_vertices(); ++v) {
            const std::size_t vi = static_cast<std::size_t>(v);
            const std::int32_t expect =
                (v == x) ? enforced.final[vi] + 1 : enforced.final[vi];
            if (weak.report.final[vi] != expect)
                return {"particle addition", false,
                        "final configurations differ at instance " + std::to_string(i)};
        }
    }
    return {"particle addition", true, std::to_string(instances) + " instances"};
}

// Total odometer and final configuration of the round-based procedure agree
// with plain stabilization, and T = 1 exactly when x ends without particles.
inline CheckResult check_via_weak_agreement(int instances, std::uint64_t seed) {
    rng::Stream s(seed, rng::kState, 7);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        Config cfg = random_config(region, s);
        const InstructionTape tape(s.next_bits(), random_lambda(s), region.degree);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        // a sleeper at x that is never woken survives the first round, which
        // is the one state the single-round claim excludes
        if (cfg[static_cast<std::size_t>(x)] == kSleeping)
            cfg[static_cast<std::size_t>(x)] = 0;
        const ViaWeakOutcome via = stabilize_via_weak(x, region, cfg, tape);
        const OdometerReport plain = stabilize(region, cfg, tape);
        if (!(via.report == plain))
            return {"round-based agreement", false,
                    "round-based totals differ from stabilize at instance " + std::to_string(i)};
        if (via.T < 1 || via.rounds.size() != static_cast<std::size_t>(via.T))
            return {"round-based agreement", false,
                    "round bookkeeping broken at instance " + std::to_string(i)};
        if (via.T == 1 && via.report.final[static_cast<std::size_t>(x)] != 0)
            return {"round-based agreement", false,
                    "single-round run left a particle at x at instance " + std::to_string(i)};
    }
    return {"round-based agreement", true, std::to_string(instances) + " instances"};
}

// ---------------------------------------------------------------------------
// Statistical helpers.
// ---------------------------------------------------------------------------

// Chi-square critical value via the Wilson-Hilferty cube approximation.
inline double chi_square_critical(int df, double z) {
    const double a = 2.0 / (9.0 * df);
    const double t = 1.0 - a + z * std::sqrt(a);
    return df * t * t * t;
}

// Goodness of fit of the (degree+1)-category instruction law at significance
// 0.001 over `samples` draws at one site.
inline CheckResult check_tape_chi_square(std::int64_t samples, double lambda, int degree,
                                         std::uint64_t seed) {
    const InstructionTape tape(seed, lambda, degree);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(degree) + 1, 0);
    const std::uint64_t site = 0x55aa55aa55aa55aaULL;
    for (std::int64_t j = 1; j <= samples; ++j) {
        const Instruction ins = tape.sample_key(site, static_cast<std::uint64_t>(j));
        if (ins.kind == InstructionKind::Sleep)
            ++counts[static_cast<std::size_t>(degree)];
        else
            ++counts[static_cast<std::size_t>(ins.jump_target)];
    }
    const double sleep_p = lambda / (1.0 + lambda);
    double chi2 = 0.0;
    for (int k = 0; k <= degree; ++k) {
        const double p = (k == degree) ? sleep_p : (1.0 - sleep_p) / degree;
        const double expected = p * static_cast<double>(samples);
        const double diff = static_cast<double>(counts[static_cast<std::size_t>(k)]) - expected;
        chi2 += diff * diff / expected;
    }
    const double crit = chi_square_critical(degree, 3.0902);  // p = 0.999
    std::ostringstream os;
    os << "chi2 = " << chi2 << ", critical(0.999) = " << crit;
    return {"instruction law chi-square", chi2 <= crit, os.str()};
}

// ---------------------------------------------------------------------------
// Acceptance criteria. `quick` shrinks instance and trial counts for fast
// smoke runs; the full settings are the contract.
// ---------------------------------------------------------------------------

inline CheckResult criterion_abelian(bool quick, std::uint64_t seed, int threads = 1) {
    (void)threads;
    CheckResult r = check_abelian(quick ? 100 : 1000, seed);
    r.name = "abelian order independence";
    return r;
}

inline CheckResult criterion_monotonicity(bool quick, std::uint64_t seed, int threads = 1) {
    (void)threads;
    const int n = quick ? 60 : 500;
    return merge("monotonicity and least action",
                 {check_nested_monotonicity(n, seed), check_enforced_monotonicity(n, seed),
                  check_least_action(n, seed)});
}

inline CheckResult criterion_weak_identities(bool quick, std::uint64_t seed, int threads = 1) {
    (void)threads;
    const int n = quick ? 60 : 500;
    return merge("weak stabilization identities",
                 {check_weak_tape_invariance(n, seed), check_particle_addition(n, seed),
                  check_via_weak_agreement(n, seed)});
}

inline CheckResult criterion_greens(bool quick, std::uint64_t seed, int threads = 1) {
    (void)threads;
    const int instances = quick ? 10 : 50;
    const std::int64_t trials = quick ? 500 : 20000;
    rng::Stream s(seed, rng::kState, 8);
    for (int i = 0; i < instances; ++i) {
        const FiniteRegion region = random_small_region(s);
        const Vertex x = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const Vertex y = static_cast<Vertex>(
            s.next_below(static_cast<std::uint64_t>(region.n_vertices())));
        const double exact = green_exact(region, x, y);
        const EstimateRecord mc = green_mc(region, x, y, trials, s.next_bits());
        const double tol = 3.0 * mc.stderr_ + 1e-12;
        if (std::abs(mc.mean - exact) > tol) {
            std::ostringstream os;
            os << "Monte Carlo Green's value off by " << std::abs(mc.mean - exact)
               << " (3 sigma = " << tol << ") at instance " << i;
            return {"Green's function oracles", false, os.str()};
        }
    }
    // hitting-probability identity: P_x(hit 0 before exit) G(0,0) = G(x,0)
    for (const auto& [d, L] : std::vector<std::pair<int, int>>{{2, 8}, {3, quick ? 4 : 8}}) {
        const FiniteRegion region = make_lattice_ball(d, L);
        GreenTable table(region);
        const std::vector<double> h = hitting_probability(region, region.origin());
        const double g00 = table.value(region.origin(), region.origin());
        for (Vertex v = 0; v < region.n_vertices(); ++v) {
            const double lhs = h[static_cast<std::size_t>(v)] * g00;
            const double rhs = table.value(v, region.origin());
            if (std::abs(lhs - rhs) > 1e-9) {
                std::ostringstream os;
                os << "hitting identity off by " << std::abs(lhs - rhs) << " on d=" << d
                   << " L=" << L;
                return {"Green's function oracles", false, os.str()};
            }
        }
    }
    return {"Green's function oracles", true, "Monte Carlo within 3 sigma; identity to 1e-9"};
}

inline const std::vector<double>& grid_lambdas() {
    static const std::vector<double> v{0.5, 1.0, 2.0};
    return v;
}
inline const std::vector<double>& grid_mus() {
    static const std::vector<double> v{0.3, 0.6, 0.9};
    return v;
}
inline std::vector<FiniteRegion> grid_regions() {
    std::vector<FiniteRegion> out;
    out.push_back(make_lattice_ball(2, 4));
    out.push_back(make_lattice_ball(3, 3));
    return out;
}

inline CheckResult criterion_excess_mean(bool quick, std::uint64_t seed, int threads = 1) {
    const std::int64_t trials = quick ? 1000 : 10000;
    const EstimatorOptions opts{.threads = threads};
    for (const FiniteRegion& region : grid_regions())
        for (double lambda : grid_lambdas())
            for (double mu : grid_mus()) {
                const ExcessMeanReport rep = excess_mean_check(
                    region, region.origin(), mu, lambda, trials, seed, opts);
                if (rep.violated) {
                    std::ostringstream os;
                    os << "mean excess " << rep.mean_A.mean << " above Green's bound "
                       << rep.green_value << " (z = " << rep.z_score << ") at lambda=" << lambda
                       << " mu=" << mu;
                    return {"excess jump mean bound", false, os.str()};
                }
            }
    return {"excess jump mean bound", true, "within bound + 3 sigma on the full grid"};
}

inline CheckResult criterion_sleep_upper_bound(bool quick, std::uint64_t seed, int threads = 1) {
    const std::int64_t trials = quick ? 1000 : 10000;
    const EstimatorOptions opts{.threads = threads};
    for (const FiniteRegion& region : grid_regions()) {
        const double G = green_exact(region, region.origin(), region.origin());
        for (double lambda : grid_lambdas())
            for (double mu : grid_mus()) {
                const EstimateRecord q =
                    estimate_Q(region, region.origin(), mu, lambda, trials, seed, opts);
                const double bound = g_lambda(G, lambda).g_value;
                if (q.mean > bound + 3.0 * q.stderr_) {
                    std::ostringstream os;
                    os << "Q = " << q.mean << " above bound " << bound
                       << " at lambda=" << lambda << " mu=" << mu;
                    return {"sleep probability upper bound", false, os.str()};
                }
            }
    }
    // single-site closed form: Q = (1 - e^{-mu}) lambda / (1 + lambda)
    const FiniteRegion single = make_lattice_ball(1, 1);
    const double mu = 0.5, lambda = 1.0;
    const std::int64_t trials1 = quick ? 10000 : 100000;
    const EstimateRecord q =
        estimate_Q(single, single.origin(), mu, lambda, trials1, seed, opts);
    const double expect = (1.0 - std::exp(-mu)) * lambda / (1.0 + lambda);
    if (std::abs(q.mean - expect) > 3.0 * q.stderr_) {
        std::ostringstream os;
        os << "single-site Q = " << q.mean << " vs closed form " << expect;
        return {"sleep probability upper bound", false, os.str()};
    }
    return {"sleep probability upper bound", true,
            "grid within bound + 3 sigma; single-site closed form matched"};
}

inline CheckResult criterion_tail_bound(bool quick, std::uint64_t seed, int threads = 1) {
    const FiniteRegion region = make_lattice_ball(2, 4);
    const std::int64_t trials = quick ? 5000 : 50000;
    const TailBoundReport rep = tail_bound_check(region, region.origin(), 0.5, 1.0, trials,
                                                 seed, 4, {.threads = threads});
    if (rep.ell1_joint_count != 0)
        return {"sleep tail bound", false,
                std::to_string(rep.ell1_joint_count) +
                    " trials ended sleeping with a single round"};
    for (const TailBoundBucket& b : rep.buckets)
        if (b.violated) {
            std::ostringstream os;
            os << "bucket ell=" << b.ell << " empirical " << b.lhs << " above bound " << b.rhs
               << " (z = " << b.z_score << ")";
            return {"sleep tail bound", false, os.str()};
        }
    return {"sleep tail bound", true, "buckets 2..4 within 3 sigma; round-1 bucket empty"};
}

inline CheckResult criterion_mass_balance(bool quick, std::uint64_t seed, int threads = 1) {
    const std::int64_t trials = quick ? 2000 : 20000;
    const EstimatorOptions opts{.threads = threads};
    {
        const FiniteRegion single = make_lattice_ball(1, 1);
        const double mu = 0.7, lambda = 1.0;
        const MassBalanceReport rep =
            mass_balance_residual(single, mu, lambda, trials, seed, opts);
        if (std::abs(rep.residual.mean) > 3.0 * rep.residual.stderr_ + 1e-12)
            return {"mass balance identity", false,
                    "single-site residual " + std::to_string(rep.residual.mean)};
        const double analytic = mu - (1.0 - std::exp(-mu)) * lambda / (1.0 + lambda);
        if (std::abs(rep.lhs.mean - analytic) > 3.0 * rep.lhs.stderr_)
            return {"mass balance identity", false,
                    "single-site jump mean " + std::to_string(rep.lhs.mean) +
                        " vs closed form " + std::to_string(analytic)};
    }
    const FiniteRegion region = make_lattice_ball(2, 6);
    const MassBalanceReport rep = mass_balance_residual(region, 0.3, 1.0, trials, seed, opts);
    if (std::abs(rep.residual.mean) > 3.0 * rep.residual.stderr_) {
        std::ostringstream os;
        os << "residual " << rep.residual.mean << " vs 3 sigma = "
           << 3.0 * rep.residual.stderr_;
        return {"mass balance identity", false, os.str()};
    }
    return {"mass balance identity", true, "residuals within 3 sigma"};
}

inline CheckResult criterion_sleep_lower_bound(bool quick, std::uint64_t seed, int threads = 1) {
    const std::int64_t trials = quick ? 1000 : 10000;
    const EstimatorOptions opts{.threads = threads};
    for (const FiniteRegion& region : grid_regions())
        for (double lambda : grid_lambdas())
            for (double mu : grid_mus()) {
                const InequalityReport rep = sleep_lower_bound_check(
                    region, region.origin(), mu, lambda, trials, seed, opts);
                if (rep.violated) {
                    std::ostringstream os;
                    os << "lower bound violated (z = " << rep.z_score << ") at lambda=" << lambda
                       << " mu=" << mu;
                    return {"sleep probability lower bound", false, os.str()};
                }
            }
    return {"sleep probability lower bound", true, "held on the full grid within 3 sigma"};
}

inline CheckResult criterion_bound_scaling(bool quick, std::uint64_t seed, int threads = 1) {
    (void)seed;
    (void)threads;
    double G;
    std::string provenance;
    if (quick) {
        G = lattice_green_origin(3, 32);
        provenance = "G from L=32 ball";
    } else {
        const LatticeGreenConvergence conv = converged_lattice_green_origin(3);
        G = conv.value;
        std::ostringstream os;
        os << "G = " << G << " converged at L = " << conv.L << " (";
        for (std::size_t i = 0; i < conv.history.size(); ++i) {
            if (i) os << ", ";
            os << "L" << conv.history[i].first << "=" << conv.history[i].second;
        }
        os << ")";
        provenance = os.str();
    }
    for (int k = -6; k <= 6; ++k) {
        const double lambda = std::pow(10.0, 0.5 * k);
        const BoundReport rep = g_lambda(G, lambda);
        if (!(rep.g_value < 1.0)) {
            std::ostringstream os;
            os << "g(" << lambda << ") = " << rep.g_value << " not below 1";
            return {"bound below one and scaling", false, os.str()};
        }
    }
    for (double lambda : {1e-1, 1e-2, 1e-3}) {
        const double ratio = g_lambda(G, lambda).g_value / std::sqrt(lambda);
        if (ratio > 4.0) {
            std::ostringstream os;
            os << "g(lambda)/sqrt(lambda) = " << ratio << " at lambda = " << lambda;
            return {"bound below one and scaling", false, os.str()};
        }
    }
    return {"bound below one and scaling", true, provenance};
}

inline CheckResult criterion_tree_fixation(bool quick, std::uint64_t seed, int threads = 1) {
    const std::int64_t trials = quick ? 400 : 4000;
    const std::vector<int> Ls{3, 5, 7};
    const EstimatorOptions opts{.threads = threads};
    const auto low =
        activity_profile(Family::RegularTree, 3, 1.0, 0.3, Ls, trials, seed, opts);
    const auto high =
        activity_profile(Family::RegularTree, 3, 1.0, 0.9, Ls, trials, seed + 1, opts);
    for (std::size_t i = 1; i < low.size(); ++i) {
        const auto slack = [](const EstimateRecord& a, const EstimateRecord& b) {
            return 3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
        };
        if (low[i].leaving_density.mean >
            low[i - 1].leaving_density.mean + slack(low[i].leaving_density,
                                                    low[i - 1].leaving_density))
            return {"tree fixation trend", false,
                    "leaving density increased between L=" + std::to_string(low[i - 1].L) +
                        " and L=" + std::to_string(low[i].L)};
        if (low[i].visited.mean >
            low[i - 1].visited.mean + slack(low[i].visited, low[i - 1].visited))
            return {"tree fixation trend", false,
                    "origin visit probability increased between L=" +
                        std::to_string(low[i - 1].L) + " and L=" + std::to_string(low[i].L)};
    }
    for (std::size_t i = 0; i < Ls.size(); ++i)
        if (!(high[i].leaving_density.mean > low[i].leaving_density.mean))
            return {"tree fixation trend", false,
                    "high-density curve not above low-density curve at L=" +
                        std::to_string(Ls[i])};
    return {"tree fixation trend", true,
            "leaving density and visit probability non-increasing; curves ordered"};
}

// The property suite behind the verify subcommand: the acceptance criteria
// that live at library level (output determinism is checked by the CLI,
// which owns file output), plus the instruction-law goodness of fit.
inline std::vector<CheckResult> run_all(bool quick, std::uint64_t seed, int threads = 1) {
    std::vector<CheckResult> out;
    out.push_back(criterion_abelian(quick, seed, threads));
    out.push_back(criterion_monotonicity(quick, seed, threads));
    out.push_back(criterion_weak_identities(quick, seed, threads));
    out.push_back(criterion_greens(quick, seed, threads));
    out.push_back(criterion_excess_mean(quick, seed, threads));
    out.push_back(criterion_sleep_upper_bound(quick, seed, threads));
    out.push_back(criterion_tail_bound(quick, seed, threads));
    out.push_back(criterion_mass_balance(quick, seed, threads));
    out.push_back(criterion_sleep_lower_bound(quick, seed, threads));
    out.push_back(criterion_bound_scaling(quick, seed, threads));
    out.push_back(criterion_tree_fixation(quick, seed, threads));
    out.push_back(check_tape_chi_square(quick ? 100000 : 1000000, 1.0, 4, seed));
    return out;
}

}  // namespace verify
}  // namespace arw

#endif
