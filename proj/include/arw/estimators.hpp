#ifndef ARW_ESTIMATORS_HPP
#define ARW_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "arw/config.hpp"
#include "arw/estimate.hpp"
#include "arw/greens.hpp"
#include "arw/region.hpp"
#include "arw/rng.hpp"
#include "arw/stabilize.hpp"
#include "arw/tape.hpp"

namespace arw {

// Seeds for one Monte Carlo trial. Config and tape streams are disjoint so
// the two sources of randomness can be varied independently.
inline std::uint64_t trial_config_seed(std::uint64_t master_seed, std::int64_t trial) {
    return rng::prf(master_seed, rng::kTrialSeed, static_cast<std::uint64_t>(trial), 1);
}
inline std::uint64_t trial_tape_seed(std::uint64_t master_seed, std::int64_t trial) {
    return rng::prf(master_seed, rng::kTrialSeed, static_cast<std::uint64_t>(trial), 2);
}

struct EstimatorOptions {
    int threads = 1;
    std::uint64_t budget = kDefaultBudget;
};

// Fraction of trials whose stabilized configuration has x sleeping:
// Q(x, K) under Poisson(mu) initial conditions.
inline EstimateRecord estimate_Q(const FiniteRegion& region, Vertex x, double mu,
                                 double lambda, std::int64_t trials, std::uint64_t seed,
                                 const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("estimate_Q: trials must be >= 1");
    const std::function<double(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
        return rep.final[static_cast<std::size_t>(x)] == kSleeping ? 1.0 : 0.0;
    };
    return summarize("Q", run_trials<double>(trials, opts.threads, one), seed);
}

struct OriginActivity {
    EstimateRecord jumps;         // mean M_{B_L}(0)
    EstimateRecord instructions;  // mean m_{B_L}(0)
    EstimateRecord visited;       // P(m_{B_L}(0) >= 1)
};

inline OriginActivity estimate_origin_activity(const FiniteRegion& region, double mu,
                                               double lambda, std::int64_t trials,
                                               std::uint64_t seed,
                                               const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("estimate_origin_activity: trials >= 1");
    struct Row {
        double jumps, instructions, visited;
    };
    const Vertex o = region.origin();
    const std::function<Row(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
        const std::uint64_t m0 = rep.m[static_cast<std::size_t>(o)];
        return Row{static_cast<double>(rep.M[static_cast<std::size_t>(o)]),
                   static_cast<double>(m0), m0 >= 1 ? 1.0 : 0.0};
    };
    const auto rows = run_trials<Row>(trials, opts.threads, one);
    std::vector<double> a(rows.size()), b(rows.size()), c(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a[i] = rows[i].jumps;
        b[i] = rows[i].instructions;
        c[i] = rows[i].visited;
    }
    return {summarize("M(0)", a, seed), summarize("m(0)", b, seed),
            summarize("P(m(0)>=1)", c, seed)};
}

// Upper bound on Q(x,K): 1 - (1 - G/(H+1)) (1+lambda)^{-H}.
inline double theorem_bound(double G_value, double lambda, int H) {
    if (H < 1) throw std::invalid_argument("theorem_bound: H must be a positive integer");
    if (G_value < 1.0) throw std::invalid_argument("theorem_bound: G_value must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("theorem_bound: lambda must be > 0");
    return 1.0 - (1.0 - G_value / (H + 1.0)) * std::pow(1.0 / (1.0 + lambda), H);
}

struct BoundReport {
    double lambda = 0.0;
    double G_value = 0.0;
    int H_star = 0;                            // ceil(sqrt(G / log(1+lambda)))
    double g_value = 1.0;                      // min over the scanned H
    std::vector<std::pair<int, double>> per_H; // (H, bound)
};

// g(lambda): the bound minimized over H in [1, max(64, 4 H*)]. The bound is
// eventually increasing in H once (1+lambda)^{-H} dominates, so the scan
// window comfortably covers the minimizer.
inline BoundReport g_lambda(double G_value, double lambda) {
    BoundReport rep;
    rep.lambda = lambda;
    rep.G_value = G_value;
    rep.H_star = static_cast<int>(std::ceil(std::sqrt(G_value / std::log1p(lambda))));
    const int H_max = std::max(64, 4 * rep.H_star);
    for (int H = 1; H <= H_max; ++H) {
        const double b = theorem_bound(G_value, lambda, H);
        rep.per_H.emplace_back(H, b);
        if (b < rep.g_value) rep.g_value = b;
    }
    return rep;
}

struct MassBalanceReport {
    EstimateRecord lhs;       // mean M_{B_L}(0)
    EstimateRecord rhs;       // mean of sum_y G(y,0) (mu - 1{y sleeping})
    EstimateRecord residual;  // per-trial lhs - rhs; stderr accounts for the
                              // common-random-number correlation
};

// Ghost-explorer mass balance: E[M_{B_L}(0)] = sum_y G_{B_L^c}(y,0)(mu - Q(y)).
// The right-hand side reuses the left-hand side's trials, so the residual's
// standard error is computed from per-trial residuals directly.
inline MassBalanceReport mass_balance_residual(const FiniteRegion& region, double mu,
                                               double lambda, std::int64_t trials,
                                               std::uint64_t seed,
                                               const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("mass_balance_residual: trials >= 1");
    GreenTable table(region);
    const std::vector<double> g0 = table.column(region.origin());
    double g_total = 0.0;
    for (double v : g0) g_total += v;

    struct Row {
        double lhs, rhs;
    };
    const std::function<Row(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
        double sleeping_weight = 0.0;
        for (Vertex v = 0; v < region.n_vertices(); ++v)
            if (rep.final[static_cast<std::size_t>(v)] == kSleeping)
                sleeping_weight += g0[static_cast<std::size_t>(v)];
        return Row{static_cast<double>(rep.M[static_cast<std::size_t>(region.origin())]),
                   mu * g_total - sleeping_weight};
    };
    const auto rows = run_trials<Row>(trials, opts.threads, one);
    std::vector<double> lhs(rows.size()), rhs(rows.size()), res(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        lhs[i] = rows[i].lhs;
        rhs[i] = rows[i].rhs;
        res[i] = rows[i].lhs - rows[i].rhs;
    }
    return {summarize("mass_balance_lhs", lhs, seed), summarize("mass_balance_rhs", rhs, seed),
            summarize("mass_balance_residual", res, seed)};
}

struct InequalityReport {
    EstimateRecord slack;  // per-trial (lhs - rhs); the inequality asserts mean >= 0
    double z_score = 0.0;  // slack mean / slack stderr
    bool violated = false; // mean < -3 stderr
};

// Q(x,K) >= P(m(x) >= 1) lambda/(1+lambda), both sides from the same trials.
inline InequalityReport sleep_lower_bound_check(const FiniteRegion& region, Vertex x,
                                                double mu, double lambda,
                                                std::int64_t trials, std::uint64_t seed,
                                                const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("sleep_lower_bound_check: trials >= 1");
    const double sleep_p = lambda / (1.0 + lambda);
    const std::function<double(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
        const double q = rep.final[static_cast<std::size_t>(x)] == kSleeping ? 1.0 : 0.0;
        const double visited = rep.m[static_cast<std::size_t>(x)] >= 1 ? 1.0 : 0.0;
        return q - visited * sleep_p;
    };
    InequalityReport rep;
    rep.slack = summarize("sleep_lower_bound_slack",
                          run_trials<double>(trials, opts.threads, one), seed);
    rep.z_score = rep.slack.stderr_ > 0 ? rep.slack.mean / rep.slack.stderr_ : 0.0;
    rep.violated = rep.slack.mean < -3.0 * rep.slack.stderr_;
    return rep;
}

struct ExcessMeanReport {
    EstimateRecord mean_A;
    double green_value = 0.0;  // exact G_{K^c}(x,x)
    double z_score = 0.0;      // (mean - G) / stderr
    bool violated = false;     // mean exceeds the bound by more than 3 stderr
};

// E[A_{(x,K)}] <= G_{K^c}(x,x), Monte Carlo against the exact Green's value.
inline ExcessMeanReport excess_mean_check(const FiniteRegion& region, Vertex x, double mu,
                                          double lambda, std::int64_t trials,
                                          std::uint64_t seed,
                                          const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("excess_mean_check: trials >= 1");
    const std::function<double(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        return static_cast<double>(excess_jumps(x, region, cfg, tape, {.budget = opts.budget}));
    };
    ExcessMeanReport rep;
    rep.mean_A = summarize("mean_A", run_trials<double>(trials, opts.threads, one), seed);
    rep.green_value = green_exact(region, x, x);
    rep.z_score = rep.mean_A.stderr_ > 0
                      ? (rep.mean_A.mean - rep.green_value) / rep.mean_A.stderr_
                      : (rep.mean_A.mean > rep.green_value ? 1e9 : 0.0);
    rep.violated = rep.mean_A.mean > rep.green_value + 3.0 * rep.mean_A.stderr_;
    return rep;
}

struct TailBoundBucket {
    int ell = 0;
    double lhs = 0.0;          // empirical P(final x sleeping, T = ell)
    double rhs = 0.0;          // (lambda/(1+lambda)) (1+lambda)^{-(ell-2)} P(A >= ell-2)
    EstimateRecord slack;      // per-trial rhs_t - lhs_t
    double z_score = 0.0;
    bool violated = false;
};

struct TailBoundReport {
    std::vector<TailBoundBucket> buckets;  // ell = 2 .. ell_max
    std::int64_t ell1_joint_count = 0;     // trials with T=1 and x sleeping; always 0
};

// Per-ell check of P(eta'(x) = rho, T = ell) against the geometric bound.
// T and A are recorded for every trial from the same runs.
inline TailBoundReport tail_bound_check(const FiniteRegion& region, Vertex x, double mu,
                                        double lambda, std::int64_t trials,
                                        std::uint64_t seed, int ell_max = 4,
                                        const EstimatorOptions& opts = {}) {
    if (trials < 1) throw std::invalid_argument("tail_bound_check: trials >= 1");
    struct Row {
        std::int64_t T;
        bool sleeping;
        std::int64_t A;
    };
    const std::size_t xi = static_cast<std::size_t>(x);
    const std::function<Row(std::int64_t)> one = [&](std::int64_t t) {
        const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
        const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
        const StabilizeOptions sopts{.budget = opts.budget};
        const ViaWeakOutcome via = stabilize_via_weak(x, region, cfg, tape, sopts);
        const OdometerReport enforced = enforced_stabilize(x, region, cfg, tape, sopts);
        const std::int64_t A = static_cast<std::int64_t>(enforced.M[xi]) -
                               static_cast<std::int64_t>(via.first_round_M[xi]);
        return Row{via.T, via.report.final[xi] == kSleeping, A};
    };
    const auto rows = run_trials<Row>(trials, opts.threads, one);

    TailBoundReport rep;
    for (const Row& r : rows)
        if (r.T == 1 && r.sleeping) ++rep.ell1_joint_count;
    const double sleep_p = lambda / (1.0 + lambda);
    for (int ell = 2; ell <= ell_max; ++ell) {
        TailBoundBucket bucket;
        bucket.ell = ell;
        const double c = sleep_p * std::pow(1.0 / (1.0 + lambda), ell - 2);
        std::vector<double> slack(rows.size());
        double lhs_sum = 0.0, rhs_sum = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double lhs_t =
                (rows[i].T == ell && rows[i].sleeping) ? 1.0 : 0.0;
            const double rhs_t = c * (rows[i].A >= ell - 2 ? 1.0 : 0.0);
            lhs_sum += lhs_t;
            rhs_sum += rhs_t;
            slack[i] = rhs_t - lhs_t;
        }
        bucket.lhs = lhs_sum / static_cast<double>(rows.size());
        bucket.rhs = rhs_sum / static_cast<double>(rows.size());
        bucket.slack = summarize("tail_bound_slack_l" + std::to_string(ell), slack, seed);
        bucket.z_score =
            bucket.slack.stderr_ > 0 ? bucket.slack.mean / bucket.slack.stderr_ : 0.0;
        bucket.violated = bucket.slack.mean < -3.0 * bucket.slack.stderr_;
        rep.buckets.push_back(std::move(bucket));
    }
    return rep;
}

struct ActivityProfileRow {
    int L = 0;
    EstimateRecord visited;           // P(m_{B_L}(0) >= 1)
    EstimateRecord leaving_density;   // absorbed / |B_L|
    EstimateRecord sleeping_density;  // sleeping count / |B_L|
};

inline std::vector<ActivityProfileRow> activity_profile(Family family, int d, double lambda,
                                                        double mu, const std::vector<int>& L_list,
                                                        std::int64_t trials, std::uint64_t seed,
                                                        const EstimatorOptions& opts = {}) {
    if (L_list.empty()) throw std::invalid_argument("activity_profile: L_list must be non-empty");
    if (!std::is_sorted(L_list.begin(), L_list.end()))
        throw std::invalid_argument("activity_profile: L_list must be increasing");
    std::vector<ActivityProfileRow> out;
    for (int L : L_list) {
        const FiniteRegion region = make_ball(family, d, L);
        const double volume = static_cast<double>(region.n_vertices());
        struct Row {
            double visited, leaving, sleeping;
        };
        const std::function<Row(std::int64_t)> one = [&](std::int64_t t) {
            const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
            const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
            const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
            double sleeping = 0.0;
            for (std::int32_t s : rep.final)
                if (s == kSleeping) sleeping += 1.0;
            return Row{rep.m[0] >= 1 ? 1.0 : 0.0,
                       static_cast<double>(rep.absorbed) / volume, sleeping / volume};
        };
        const auto rows = run_trials<Row>(trials, opts.threads, one);
        std::vector<double> a(rows.size()), b(rows.size()), c(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            a[i] = rows[i].visited;
            b[i] = rows[i].leaving;
            c[i] = rows[i].sleeping;
        }
        ActivityProfileRow row;
        row.L = L;
        row.visited = summarize("P(m(0)>=1)", a, seed);
        row.leaving_density = summarize("leaving_density", b, seed);
        row.sleeping_density = summarize("sleeping_density", c, seed);
        out.push_back(std::move(row));
    }
    return out;
}

struct MuBracket {
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    bool degenerate = false;
    std::string warning;
};

// Finite-L heuristic bracket for the critical density: bisection on mu
// against "mean leaving density >= threshold". Not the paper's criterion
// (which is asymptotic in the region); results are labeled accordingly.
inline MuBracket mu_c_bracket(Family family, int d, double lambda, int L,
                              std::int64_t trials, double threshold, std::uint64_t seed,
                              const EstimatorOptions& opts = {}) {
    const FiniteRegion region = make_ball(family, d, L);
    const double volume = static_cast<double>(region.n_vertices());
    const auto leaving = [&](double mu) {
        const std::function<double(std::int64_t)> one = [&](std::int64_t t) {
            const Config cfg = sample_poisson_config(region, mu, trial_config_seed(seed, t));
            const InstructionTape tape(trial_tape_seed(seed, t), lambda, region.degree);
            const OdometerReport rep = stabilize(region, cfg, tape, {.budget = opts.budget});
            return static_cast<double>(rep.absorbed) / volume;
        };
        return summarize("leaving", run_trials<double>(trials, opts.threads, one), seed).mean;
    };

    MuBracket out;
    double lo = 0.0, hi = 1.5;
    if (leaving(lo) >= threshold) {
        out.mu_lo = out.mu_hi = 0.0;
        out.degenerate = true;
        out.warning = "criterion met already at mu=0";
        return out;
    }
    if (leaving(hi) < threshold) {
        out.mu_lo = out.mu_hi = hi;
        out.degenerate = true;
        out.warning = "criterion never met on [0, 1.5]";
        return out;
    }
    for (int it = 0; it < 20; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (leaving(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    out.mu_lo = lo;
    out.mu_hi = hi;
    return out;
}

}  // namespace arw

#endif
