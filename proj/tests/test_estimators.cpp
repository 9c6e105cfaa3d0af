#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arw/estimators.hpp"
#include "arw/greens.hpp"
#include "arw/region.hpp"

using namespace arw;

namespace {
const std::uint64_t kSeed = 4242;
}

TEST_CASE("estimate_Q: empty system, closed form, high-sleep limit") {
    const FiniteRegion single = make_lattice_ball(1, 1);

    CHECK(estimate_Q(single, 0, 0.0, 1.0, 500, kSeed).mean == 0.0);

    // single site: jumps deplete the pile, a lone particle sleeps with
    // probability lambda/(1+lambda), so Q = (1 - e^{-mu}) lambda/(1+lambda)
    const double mu = 0.5, lambda = 1.0;
    const EstimateRecord q = estimate_Q(single, 0, mu, lambda, 20000, kSeed);
    const double expect = (1.0 - std::exp(-mu)) * lambda / (1.0 + lambda);
    CHECK(std::abs(q.mean - expect) < 3.0 * q.stderr_);

    // high-sleep regime: Q approaches 1 - e^{-mu} from below
    const double hi = 50.0;
    const EstimateRecord qs = estimate_Q(single, 0, mu, hi, 20000, kSeed + 1);
    CHECK(std::abs(qs.mean - (1.0 - std::exp(-mu)) * hi / (1.0 + hi)) < 3.0 * qs.stderr_);

    CHECK_THROWS(estimate_Q(single, 0, 0.5, 1.0, 0, kSeed));
}

TEST_CASE("estimators are reproducible and thread-count independent") {
    const FiniteRegion region = make_lattice_ball(2, 3);
    const EstimateRecord a = estimate_Q(region, 0, 0.5, 1.0, 2000, kSeed, {.threads = 1});
    const EstimateRecord b = estimate_Q(region, 0, 0.5, 1.0, 2000, kSeed, {.threads = 8});
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("origin activity: empty system and single-site visit probability") {
    const FiniteRegion single = make_lattice_ball(1, 1);
    const OriginActivity zero = estimate_origin_activity(single, 0.0, 1.0, 500, kSeed);
    CHECK(zero.jumps.mean == 0.0);
    CHECK(zero.instructions.mean == 0.0);
    CHECK(zero.visited.mean == 0.0);

    const double mu = 0.8;
    const OriginActivity act = estimate_origin_activity(single, mu, 1.0, 20000, kSeed);
    CHECK(std::abs(act.visited.mean - (1.0 - std::exp(-mu))) < 3.0 * act.visited.stderr_);
    CHECK(act.jumps.mean <= act.instructions.mean);
}

TEST_CASE("origin activity grows with the particle density") {
    const FiniteRegion region = make_lattice_ball(2, 3);
    const OriginActivity low = estimate_origin_activity(region, 0.3, 1.0, 5000, kSeed);
    const OriginActivity high = estimate_origin_activity(region, 0.9, 1.0, 5000, kSeed);
    const double slack = 3.0 * std::sqrt(low.visited.stderr_ * low.visited.stderr_ +
                                         high.visited.stderr_ * high.visited.stderr_);
    CHECK(high.visited.mean + slack >= low.visited.mean);
    CHECK(high.jumps.mean > low.jumps.mean);
}

TEST_CASE("closed-form bound: pinned values and limits") {
    CHECK(theorem_bound(1.0, 1.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(theorem_bound(2.0, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(theorem_bound(2.0, 7.3, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(theorem_bound(1.5, 1e12, 3) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(theorem_bound(1.0, 1.0, 0));
    CHECK_THROWS(theorem_bound(0.5, 1.0, 1));
    CHECK_THROWS(theorem_bound(1.0, 0.0, 1));

    // increasing in the Green's value at fixed H and lambda
    double prev = 0.0;
    for (double G : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        const double b = theorem_bound(G, 0.7, 2);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("minimized bound: hand-checked minimum and scan fields") {
    const BoundReport rep = g_lambda(1.0, 1.0);
    CHECK(rep.g_value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rep.per_H.front().first == 1);
    CHECK(rep.per_H[1].second == doctest::Approx(1.0 - (2.0 / 3.0) * 0.25).epsilon(1e-12));
    CHECK(rep.H_star == 2);  // ceil(sqrt(1 / log 2))

    const BoundReport z3 = g_lambda(1.516, std::exp(1.0) - 1.0);
    CHECK(z3.H_star == 2);  // ceil(sqrt(1.516))

    for (double G : {1.0, 1.5, 2.0, 3.0})
        for (double lambda : {1e-3, 1e-1, 1.0, 1e1, 1e3}) {
            const BoundReport r = g_lambda(G, lambda);
            CHECK(r.g_value < 1.0);
            CHECK(r.g_value > 0.0);
            CHECK(static_cast<int>(r.per_H.size()) == std::max(64, 4 * r.H_star));
        }

    // small-lambda scaling of the minimized bound
    for (double lambda : {1e-1, 1e-2, 1e-3})
        CHECK(g_lambda(1.516, lambda).g_value / std::sqrt(lambda) < 4.0);
}

TEST_CASE("mass balance holds on the single site and a small grid") {
    const FiniteRegion single = make_lattice_ball(1, 1);
    const double mu = 0.7, lambda = 1.0;
    const MassBalanceReport rep = mass_balance_residual(single, mu, lambda, 5000, kSeed);
    CHECK(std::abs(rep.residual.mean) < 3.0 * rep.residual.stderr_ + 1e-12);
    const double analytic = mu - (1.0 - std::exp(-mu)) * lambda / (1.0 + lambda);
    CHECK(std::abs(rep.lhs.mean - analytic) < 3.0 * rep.lhs.stderr_);

    const MassBalanceReport zero = mass_balance_residual(single, 0.0, 1.0, 200, kSeed);
    CHECK(zero.lhs.mean == 0.0);
    CHECK(zero.rhs.mean == 0.0);

    const FiniteRegion grid = make_lattice_ball(2, 3);
    const MassBalanceReport g = mass_balance_residual(grid, 0.4, 1.0, 5000, kSeed);
    CHECK(std::abs(g.residual.mean) < 3.0 * g.residual.stderr_);
}

TEST_CASE("sleep lower bound: single site is an equality in expectation") {
    const FiniteRegion single = make_lattice_ball(1, 1);
    const InequalityReport rep = sleep_lower_bound_check(single, 0, 0.6, 1.0, 20000, kSeed);
    CHECK(!rep.violated);
    CHECK(std::abs(rep.slack.mean) < 3.0 * rep.slack.stderr_ + 1e-12);

    const FiniteRegion grid = make_lattice_ball(2, 3);
    CHECK(!sleep_lower_bound_check(grid, 0, 0.5, 1.0, 5000, kSeed).violated);
}

TEST_CASE("excess jumps on the single site: one unit per occupied start") {
    // enforced stabilization jumps every particle out (k jumps); the weak
    // stabilization keeps the last one (k-1 jumps), so A = 1 iff k >= 1
    const FiniteRegion single = make_lattice_ball(1, 1);
    const double mu = 0.9;
    const ExcessMeanReport rep = excess_mean_check(single, 0, mu, 1.0, 20000, kSeed);
    CHECK(rep.green_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rep.mean_A.mean - (1.0 - std::exp(-mu))) < 3.0 * rep.mean_A.stderr_);
    CHECK(!rep.violated);
}

TEST_CASE("tail bound report: empty system and round-one bucket") {
    const FiniteRegion grid = make_lattice_ball(2, 3);
    const TailBoundReport zero = tail_bound_check(grid, 0, 0.0, 1.0, 100, kSeed);
    CHECK(zero.ell1_joint_count == 0);
    for (const auto& b : zero.buckets) {
        CHECK(b.lhs == 0.0);
        CHECK(!b.violated);
    }

    const TailBoundReport rep = tail_bound_check(grid, 0, 0.5, 1.0, 5000, kSeed);
    CHECK(rep.ell1_joint_count == 0);
    CHECK(rep.buckets.size() == 3);
    for (const auto& b : rep.buckets) CHECK(!b.violated);
}

TEST_CASE("activity profile: validation and empty system") {
    CHECK_THROWS(activity_profile(Family::LatticeZd, 2, 1.0, 0.5, {}, 10, kSeed));
    CHECK_THROWS(activity_profile(Family::LatticeZd, 2, 1.0, 0.5, {5, 3}, 10, kSeed));
    const auto rows =
        activity_profile(Family::LatticeZd, 2, 1.0, 0.0, {2, 3}, 100, kSeed);
    for (const auto& r : rows) {
        CHECK(r.visited.mean == 0.0);
        CHECK(r.leaving_density.mean == 0.0);
        CHECK(r.sleeping_density.mean == 0.0);
    }
}

TEST_CASE("density bracket: degenerate edges and a regular run") {
    // threshold zero is met already by the empty system
    const MuBracket zero =
        mu_c_bracket(Family::LatticeZd, 2, 1.0, 3, 50, 0.0, kSeed);
    CHECK(zero.degenerate);
    CHECK(zero.mu_lo == 0.0);

    // with a high sleep rate almost everything settles, so a near-one
    // leaving density is unreachable on the whole density range
    const MuBracket never =
        mu_c_bracket(Family::LatticeZd, 2, 50.0, 3, 50, 0.999, kSeed);
    CHECK(never.degenerate);
    CHECK(never.mu_hi == 1.5);
    CHECK(!never.warning.empty());

    const MuBracket b = mu_c_bracket(Family::LatticeZd, 2, 1.0, 4, 300, 0.05, kSeed);
    CHECK(!b.degenerate);
    CHECK(b.mu_lo > 0.0);
    CHECK(b.mu_hi > b.mu_lo);
    CHECK(b.mu_hi - b.mu_lo < 1e-4);  // 20 bisection halvings of [0, 1.5]
    CHECK(b.mu_hi < 1.5);
}

TEST_CASE("density bracket on the tree sits above a third of the sleep ratio") {
    // finite-volume probe of the non-amenable lower bound lambda/(1+lambda):
    // the leaving density threshold is calibrated to the tree's boundary
    // leakage so the bracket cannot collapse toward zero density
    const MuBracket b = mu_c_bracket(Family::RegularTree, 3, 1.0, 6, 300, 0.12, kSeed);
    CHECK(!b.degenerate);
    CHECK(b.mu_lo >= 0.35);
    CHECK(b.mu_hi <= 1.5);
}
