#ifndef ARW_ESTIMATE_HPP
#define ARW_ESTIMATE_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace arw {

struct EstimateRecord {
    std::string estimand;
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(trials)
    std::int64_t trials = 0;
    std::uint64_t master_seed = 0;
};

// Mean and standard error of a sample, accumulated in index order so the
// result is independent of how trials were scheduled.
inline EstimateRecord summarize(const std::string& estimand, const std::vector<double>& xs,
                                std::uint64_t master_seed) {
    EstimateRecord r;
    r.estimand = estimand;
    r.trials = static_cast<std::int64_t>(xs.size());
    r.master_seed = master_seed;
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        r.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return r;
}

// Runs `fn(trial)` for trial = 0..n-1 on `threads` workers. Results land in
// a vector indexed by trial, so any reduction over them is deterministic
// regardless of thread count.
template <typename T>
std::vector<T> run_trials(std::int64_t n, int threads, const std::function<T(std::int64_t)>& fn) {
    if (n < 0) throw std::invalid_argument("run_trials: negative trial count");
    std::vector<T> results(static_cast<std::size_t>(n));
    if (threads <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = fn(i);
        return results;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (;;) {
                    const std::int64_t i = next.fetch_add(1);
                    if (i >= n) break;
                    results[static_cast<std::size_t>(i)] = fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace arw

#endif
