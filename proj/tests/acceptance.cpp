// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Pass --quick for a reduced smoke run.

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "arw/cli.hpp"
#include "arw/verify.hpp"

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;

    const std::uint64_t seed = 20260823;
    const int threads = arw::cli::default_threads();
    using arw::verify::CheckResult;

    std::vector<std::pair<std::string, CheckResult>> results;
    const auto run = [&](const std::string& label, CheckResult r) {
        results.emplace_back(label, r);
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << label << " (" << r.name
                  << "): " << r.detail << std::endl;
    };

    run("criterion 1", arw::verify::criterion_abelian(quick, seed, threads));
    run("criterion 2", arw::verify::criterion_monotonicity(quick, seed, threads));
    run("criterion 3", arw::verify::criterion_weak_identities(quick, seed, threads));
    run("criterion 4", arw::verify::criterion_greens(quick, seed, threads));
    run("criterion 5", arw::verify::criterion_excess_mean(quick, seed, threads));
    run("criterion 6", arw::verify::criterion_sleep_upper_bound(quick, seed, threads));
    run("criterion 7", arw::verify::criterion_tail_bound(quick, seed, threads));
    run("criterion 8", arw::verify::criterion_mass_balance(quick, seed, threads));
    run("criterion 9", arw::verify::criterion_sleep_lower_bound(quick, seed, threads));
    run("criterion 10", arw::verify::criterion_bound_scaling(quick, seed, threads));
    run("criterion 11", arw::verify::criterion_tree_fixation(quick, seed, threads));
    run("criterion 12", arw::cli::check_output_determinism(seed, quick));

    int failures = 0;
    for (const auto& [label, r] : results)
        if (!r.passed) ++failures;
    if (failures) {
        std::cout << failures << " criterion failure(s)" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
