#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arw/region.hpp"
#include "arw/tape.hpp"
#include "arw/verify.hpp"

using namespace arw;

TEST_CASE("unit-interval partition: sleep first, then equal jump slices") {
    // lambda = 1, d = 2: [0, 1/2) sleep, [1/2, 3/4) jump 0, [3/4, 1) jump 1
    CHECK(instruction_from_uniform(0.9, 1.0, 2) == Instruction{InstructionKind::Jump, 1});
    CHECK(instruction_from_uniform(0.6, 1.0, 2) == Instruction{InstructionKind::Jump, 0});
    CHECK(instruction_from_uniform(0.1, 1.0, 2).kind == InstructionKind::Sleep);
    CHECK(instruction_from_uniform(0.4999, 1.0, 2).kind == InstructionKind::Sleep);
    CHECK(instruction_from_uniform(0.5, 1.0, 2) == Instruction{InstructionKind::Jump, 0});
}

TEST_CASE("construction validates parameters") {
    CHECK_THROWS(InstructionTape(1, 0.0, 4));
    CHECK_THROWS(InstructionTape(1, -1.0, 4));
    CHECK_THROWS(InstructionTape(1, 1.0, 0));
}

TEST_CASE("sampling is pure") {
    const InstructionTape tape(123, 1.0, 4);
    for (std::uint64_t j = 1; j <= 50; ++j)
        CHECK(tape.sample_key(77, j) == tape.sample_key(77, j));
    const InstructionTape same(123, 1.0, 4);
    for (std::uint64_t j = 1; j <= 50; ++j)
        CHECK(tape.sample_key(77, j) == same.sample_key(77, j));
}

TEST_CASE("long-run sleep frequency matches lambda/(1+lambda)") {
    const InstructionTape tape(9, 1.0, 4);
    const int n = 100000;
    int sleeps = 0;
    for (int j = 1; j <= n; ++j)
        if (tape.sample_key(5, static_cast<std::uint64_t>(j)).kind == InstructionKind::Sleep)
            ++sleeps;
    const double freq = static_cast<double>(sleeps) / n;
    CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("instruction law passes a chi-square goodness of fit") {
    const auto r = verify::check_tape_chi_square(1000000, 1.0, 4, 2024);
    CHECK_MESSAGE(r.passed, r.detail);
    const auto r2 = verify::check_tape_chi_square(500000, 0.25, 3, 2025);
    CHECK_MESSAGE(r2.passed, r2.detail);
}

TEST_CASE("sleep erasure changes exactly the sleep instructions at x") {
    const InstructionTape tape(31, 1.0, 4);
    const std::uint64_t x = 1000, y = 2000;
    const InstructionTape erased = tape.ignore_sleep_at_key(x);
    for (std::uint64_t j = 1; j <= 2000; ++j) {
        CHECK(erased.sample_key(y, j) == tape.sample_key(y, j));
        const Instruction orig = tape.sample_key(x, j);
        const Instruction got = erased.sample_key(x, j);
        if (orig.kind == InstructionKind::Sleep)
            CHECK(got.kind == InstructionKind::Neutral);
        else
            CHECK(got == orig);
    }
}

TEST_CASE("sleep erasure is idempotent") {
    const InstructionTape tape(31, 2.0, 3);
    const InstructionTape once = tape.ignore_sleep_at_key(42);
    const InstructionTape twice = once.ignore_sleep_at_key(42);
    CHECK(once.erased() == twice.erased());
    for (std::uint64_t j = 1; j <= 200; ++j)
        CHECK(once.sample_key(42, j) == twice.sample_key(42, j));
}

TEST_CASE("erased tapes never produce sleep at the erased site") {
    const FiniteRegion region = make_lattice_ball(2, 3);
    const InstructionTape tape(7, 5.0, region.degree);
    const InstructionTape erased = tape.ignore_sleep_at(region, 3);
    for (std::uint64_t j = 1; j <= 1000; ++j)
        CHECK(erased.sample(region, 3, j).kind != InstructionKind::Sleep);
}
