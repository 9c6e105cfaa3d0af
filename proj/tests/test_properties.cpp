#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arw/verify.hpp"

using namespace arw;

// Randomized exact-property suites at unit-test scale; the acceptance run
// repeats them at full instance counts.

TEST_CASE("toppling order does not change the outcome") {
    const auto r = verify::check_abelian(200, 101);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("odometers grow with the region and the configuration") {
    const auto r = verify::check_nested_monotonicity(150, 102);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("erasing sleep instructions never lowers the odometer") {
    const auto r = verify::check_enforced_monotonicity(150, 103);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("partial toppling sequences never exceed the weak odometer") {
    const auto r = verify::check_least_action(150, 104);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("weak stabilization ignores sleep erasure at the distinguished vertex") {
    const auto r = verify::check_weak_tape_invariance(150, 105);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("one extra particle at x reproduces the enforced stabilization") {
    const auto r = verify::check_particle_addition(150, 106);
    CHECK_MESSAGE(r.passed, r.detail);
}

TEST_CASE("round-based stabilization totals agree with plain stabilization") {
    const auto r = verify::check_via_weak_agreement(150, 107);
    CHECK_MESSAGE(r.passed, r.detail);
}
