#ifndef ARW_GREENS_HPP
#define ARW_GREENS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "arw/estimate.hpp"
#include "arw/region.hpp"
#include "arw/rng.hpp"

namespace arw {

// Green's function G_Z(x,y) of the simple random walk on a finite region:
// expected visits to y from x before hitting the absorbing set Z. The
// exterior sink is always absorbing; `absorbing` adds interior vertices.
// Columns are obtained from the linear system (I - P) g = e_y restricted to
// the non-absorbing interior (dense LU for small systems, conjugate
// gradient otherwise; I - P is symmetric positive definite on regular
// graphs).
class GreenTable {
  public:
    explicit GreenTable(const FiniteRegion& region, std::vector<Vertex> absorbing = {})
        : region_(&region) {
        const std::size_t n = static_cast<std::size_t>(region.n_vertices());
        absorbed_.assign(n, 0);
        for (Vertex v : absorbing) {
            if (v == kSink) continue;
            absorbed_[static_cast<std::size_t>(v)] = 1;
        }
        active_index_.assign(n, -1);
        for (Vertex v = 0; v < region.n_vertices(); ++v)
            if (!absorbed_[static_cast<std::size_t>(v)]) {
                active_index_[static_cast<std::size_t>(v)] =
                    static_cast<Vertex>(active_.size());
                active_.push_back(v);
            }
        check_absorption_reachable();
        build_system();
    }

    const FiniteRegion& region() const { return *region_; }

    bool is_absorbing(Vertex v) const {
        return v == kSink || absorbed_[static_cast<std::size_t>(v)];
    }

    // G_Z(x, y); zero whenever x or y is absorbing.
    double value(Vertex x, Vertex y) const {
        if (is_absorbing(x) || is_absorbing(y)) return 0.0;
        return column(y)[static_cast<std::size_t>(x)];
    }

    // G_Z(., y) as a dense vector over all interior vertices.
    const std::vector<double>& column(Vertex y) const {
        auto it = cache_.find(y);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(y, solve_column(y)).first->second;
    }

  private:
    void check_absorption_reachable() const {
        // Every non-absorbing vertex must reach an absorbing vertex or the sink.
        std::vector<char> ok(static_cast<std::size_t>(region_->n_vertices()), 0);
        std::deque<Vertex> queue;
        for (Vertex v : active_) {
            for (int i = 0; i < region_->degree; ++i) {
                const Vertex w = region_->neighbor(v, i);
                if (w == kSink || absorbed_[static_cast<std::size_t>(w)]) {
                    ok[static_cast<std::size_t>(v)] = 1;
                    queue.push_back(v);
                    break;
                }
            }
        }
        while (!queue.empty()) {
            const Vertex v = queue.front();
            queue.pop_front();
            for (int i = 0; i < region_->degree; ++i) {
                const Vertex w = region_->neighbor(v, i);
                if (w != kSink && !absorbed_[static_cast<std::size_t>(w)] &&
                    !ok[static_cast<std::size_t>(w)]) {
                    ok[static_cast<std::size_t>(w)] = 1;
                    queue.push_back(w);
                }
            }
        }
        for (Vertex v : active_)
            if (!ok[static_cast<std::size_t>(v)])
                throw std::invalid_argument(
                    "GreenTable: some vertex cannot reach an absorbing set");
    }

    void build_system() {
        const int na = static_cast<int>(active_.size());
        const double p = 1.0 / region_->degree;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(na) * (region_->degree + 1));
        for (int i = 0; i < na; ++i) {
            trips.emplace_back(i, i, 1.0);
            const Vertex v = active_[static_cast<std::size_t>(i)];
            for (int k = 0; k < region_->degree; ++k) {
                const Vertex w = region_->neighbor(v, k);
                if (w == kSink || absorbed_[static_cast<std::size_t>(w)]) continue;
                trips.emplace_back(i, active_index_[static_cast<std::size_t>(w)], -p);
            }
        }
        A_.resize(na, na);
        A_.setFromTriplets(trips.begin(), trips.end());
        if (na <= 4000) {
            lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(
                Eigen::MatrixXd(A_));
        }
    }

    std::vector<double> solve_column(Vertex y) const {
        const int na = static_cast<int>(active_.size());
        Eigen::VectorXd b = Eigen::VectorXd::Zero(na);
        b[active_index_[static_cast<std::size_t>(y)]] = 1.0;
        Eigen::VectorXd g;
        if (lu_) {
            g = lu_->solve(b);
        } else {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(1e-13);
            cg.setMaxIterations(40L * na);
            cg.compute(A_);
            g = cg.solve(b);
        }
        const double residual = (A_ * g - b).norm();
        if (residual > 1e-10 * std::max(1.0, g.norm()))
            throw std::runtime_error("GreenTable: linear solve residual too large");
        std::vector<double> full(static_cast<std::size_t>(region_->n_vertices()), 0.0);
        for (int i = 0; i < na; ++i)
            full[static_cast<std::size_t>(active_[static_cast<std::size_t>(i)])] = g[i];
        return full;
    }

    const FiniteRegion* region_;
    std::vector<char> absorbed_;
    std::vector<Vertex> active_;
    std::vector<Vertex> active_index_;
    Eigen::SparseMatrix<double> A_;
    std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    mutable std::map<Vertex, std::vector<double>> cache_;
};

inline double green_exact(const FiniteRegion& region, const std::vector<Vertex>& absorbing,
                          Vertex x, Vertex y) {
    GreenTable table(region, absorbing);
    if (table.is_absorbing(x) || table.is_absorbing(y))
        throw std::invalid_argument("green_exact: x and y must not be absorbing");
    return table.value(x, y);
}

inline double green_exact(const FiniteRegion& region, Vertex x, Vertex y) {
    return green_exact(region, {}, x, y);
}

// P_x(tau_target < tau_{Z cup exterior}) for every interior x, by its own
// linear solve (kept independent of GreenTable so identity checks compare
// two routes).
inline std::vector<double> hitting_probability(const FiniteRegion& region, Vertex target,
                                               const std::vector<Vertex>& absorbing = {}) {
    const std::size_t n = static_cast<std::size_t>(region.n_vertices());
    std::vector<char> absorbed(n, 0);
    for (Vertex v : absorbing)
        if (v != kSink) absorbed[static_cast<std::size_t>(v)] = 1;
    if (absorbed[static_cast<std::size_t>(target)])
        throw std::invalid_argument("hitting_probability: target is absorbing");

    std::vector<Vertex> active;
    std::vector<Vertex> index(n, -1);
    for (Vertex v = 0; v < region.n_vertices(); ++v)
        if (v != target && !absorbed[static_cast<std::size_t>(v)]) {
            index[static_cast<std::size_t>(v)] = static_cast<Vertex>(active.size());
            active.push_back(v);
        }
    const int na = static_cast<int>(active.size());
    const double p = 1.0 / region.degree;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(na, na);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(na);
    std::vector<Eigen::Triplet<double>> trips;
    const bool dense = na <= 4000;
    Eigen::SparseMatrix<double> S;
    if (!dense) trips.reserve(static_cast<std::size_t>(na) * (region.degree + 1));
    for (int i = 0; i < na; ++i) {
        if (!dense) trips.emplace_back(i, i, 1.0);
        const Vertex v = active[static_cast<std::size_t>(i)];
        for (int k = 0; k < region.degree; ++k) {
            const Vertex w = region.neighbor(v, k);
            if (w == target) {
                b[i] += p;
            } else if (w != kSink && !absorbed[static_cast<std::size_t>(w)]) {
                if (dense)
                    A(i, index[static_cast<std::size_t>(w)]) -= p;
                else
                    trips.emplace_back(i, index[static_cast<std::size_t>(w)], -p);
            }
        }
    }
    Eigen::VectorXd h;
    if (dense) {
        h = A.partialPivLu().solve(b);
    } else {
        S.resize(na, na);
        S.setFromTriplets(trips.begin(), trips.end());
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-13);
        cg.setMaxIterations(40L * na);
        cg.compute(S);
        h = cg.solve(b);
    }
    std::vector<double> out(n, 0.0);
    out[static_cast<std::size_t>(target)] = 1.0;
    for (int i = 0; i < na; ++i)
        out[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])] = h[i];
    return out;
}

// Monte Carlo estimate of G_exterior(x, y): empirical mean visit count of
// walks from x absorbed when they leave the region.
inline EstimateRecord green_mc(const FiniteRegion& region, Vertex x, Vertex y,
                               std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("green_mc: trials must be >= 1");
    std::vector<double> visits(static_cast<std::size_t>(trials));
    for (std::int64_t t = 0; t < trials; ++t) {
        rng::Stream s(rng::trial_seed(seed, static_cast<std::uint64_t>(t)), rng::kWalk, 0);
        Vertex v = x;
        double count = 0;
        while (v != kSink) {
            if (v == y) count += 1.0;
            v = region.neighbor(v, static_cast<int>(s.next_below(
                                       static_cast<std::uint64_t>(region.degree))));
        }
        visits[static_cast<std::size_t>(t)] = count;
    }
    return summarize("green_mc", visits, seed);
}

// Sum over the ring of exact Green's values toward the origin.
inline double ring_green_sum(const FiniteRegion& region, double r1, double r2) {
    GreenTable table(region);
    const auto& col = table.column(region.origin());
    double sum = 0.0;
    for (Vertex v : region.ring(r1, r2)) sum += col[static_cast<std::size_t>(v)];
    return sum;
}

// 1 / G_exterior(0,0): probability of exiting the region before returning
// to the origin.
inline double escape_probability(const FiniteRegion& region) {
    return 1.0 / green_exact(region, region.origin(), region.origin());
}

struct XiEstimate {
    EstimateRecord record;
    // Fraction of walks that re-entered B_{r2} after first reaching the
    // halfway shell toward the horizon; a proxy for mass lost to truncation.
    double truncation_fraction = 0.0;
};

// Monte Carlo estimate of the expected time the walk on infinite Z^d spends
// in the ring B_{r2} \ B_{r1}, truncated when the walk exits B_horizon.
inline XiEstimate xi_estimate(int d, double r1, double r2, std::int64_t trials,
                              double horizon_radius, std::uint64_t seed) {
    if (d <= 2) throw std::invalid_argument("xi_estimate: requires d >= 3 (transience)");
    if (!(horizon_radius > r2)) throw std::invalid_argument("xi_estimate: horizon must exceed r2");
    if (trials < 1) throw std::invalid_argument("xi_estimate: trials must be >= 1");
    const double halfway = (r2 + horizon_radius) / 2.0;
    std::vector<double> time_in_ring(static_cast<std::size_t>(trials));
    std::int64_t truncated = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        rng::Stream s(rng::trial_seed(seed, static_cast<std::uint64_t>(t)), rng::kWalk, 0);
        std::vector<std::int64_t> pos(static_cast<std::size_t>(d), 0);
        std::int64_t l1 = 0;
        double count = 0;
        bool reached_halfway = false;
        bool reentered = false;
        for (;;) {
            const double dist = static_cast<double>(l1);
            if (dist >= horizon_radius) break;
            if (dist >= r1 && dist < r2) {
                count += 1.0;
                if (reached_halfway) reentered = true;
            }
            if (dist >= halfway) reached_halfway = true;
            const std::uint64_t u = s.next_below(2ULL * static_cast<std::uint64_t>(d));
            const std::size_t axis = static_cast<std::size_t>(u >> 1);
            const std::int64_t step = (u & 1) ? -1 : +1;
            const std::int64_t old_abs = std::abs(pos[axis]);
            pos[axis] += step;
            l1 += std::abs(pos[axis]) - old_abs;
        }
        if (reentered) ++truncated;
        time_in_ring[static_cast<std::size_t>(t)] = count;
    }
    XiEstimate out;
    out.record = summarize("xi_estimate", time_in_ring, seed);
    out.truncation_fraction =
        static_cast<double>(truncated) / static_cast<double>(trials);
    return out;
}

// ---------------------------------------------------------------------------
// Origin Green's value on large Z^d balls via the coordinate-symmetry
// quotient (sorted absolute coordinates), which shrinks the system by a
// factor ~ 2^d d! and makes radii in the hundreds tractable.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t pack_sorted(const std::vector<int>& c) {
    std::uint64_t k = 0;
    for (int x : c) k = (k << 10) | static_cast<std::uint64_t>(x);
    return k;
}

inline double quotient_ball_green_origin(int d, int L) {
    if (d < 1 || d > 6) throw std::invalid_argument("quotient green: 1 <= d <= 6");
    if (L < 1 || L > 1023) throw std::invalid_argument("quotient green: 1 <= L <= 1023");
    // Enumerate sorted tuples a1 >= a2 >= ... >= ad >= 0 with sum <= L-1.
    std::unordered_map<std::uint64_t, std::int32_t> index;
    std::vector<std::vector<int>> states;
    {
        std::vector<int> c(static_cast<std::size_t>(d), 0);
        const std::function<void(int, int, int)> rec = [&](int pos, int maxv, int left) {
            if (pos == d) {
                index[pack_sorted(c)] = static_cast<std::int32_t>(states.size());
                states.push_back(c);
                return;
            }
            const int hi = std::min(maxv, left);
            for (int v = 0; v <= hi; ++v) {
                c[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, v, left - v);
            }
        };
        rec(0, L - 1, L - 1);
    }
    const std::int64_t n = static_cast<std::int64_t>(states.size());

    // sqrt of orbit sizes; symmetrizes the quotient transition matrix.
    std::vector<float> sq(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& c = states[static_cast<std::size_t>(i)];
        double perms = 1.0;
        for (int k = 2; k <= d; ++k) perms *= k;
        int run = 1;
        for (int k = 1; k < d; ++k) {
            if (c[static_cast<std::size_t>(k)] == c[static_cast<std::size_t>(k - 1)]) {
                ++run;
                perms /= run;
            } else {
                run = 1;
            }
        }
        double signs = 1.0;
        for (int v : c)
            if (v != 0) signs *= 2.0;
        sq[static_cast<std::size_t>(i)] = static_cast<float>(std::sqrt(perms * signs));
    }

    // CSR of S = D^{1/2} P D^{-1/2} (symmetric).
    std::vector<std::int64_t> rowptr(static_cast<std::size_t>(n) + 1, 0);
    std::vector<std::int32_t> cols;
    std::vector<float> vals;
    cols.reserve(static_cast<std::size_t>(n) * 2 * d);
    vals.reserve(static_cast<std::size_t>(n) * 2 * d);
    const float inv_deg = 1.0f / static_cast<float>(2 * d);
    std::vector<int> t(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& c = states[static_cast<std::size_t>(i)];
        for (int axis = 0; axis < d; ++axis) {
            for (int step : {+1, -1}) {
                t = c;
                t[static_cast<std::size_t>(axis)] += step;
                if (t[static_cast<std::size_t>(axis)] < 0)
                    t[static_cast<std::size_t>(axis)] = -t[static_cast<std::size_t>(axis)];
                std::sort(t.begin(), t.end(), std::greater<int>());
                int sum = 0;
                for (int v : t) sum += v;
                if (sum > L - 1) continue;
                const std::int32_t j = index.at(pack_sorted(t));
                cols.push_back(j);
                vals.push_back(inv_deg * sq[static_cast<std::size_t>(i)] /
                               sq[static_cast<std::size_t>(j)]);
            }
        }
        rowptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(cols.size());
    }

    // CG on (I - S) w = D^{1/2} e_0, hand-rolled to keep the matrix in
    // single precision (the system for L = 512 has ~4e6 unknowns).
    const std::int32_t i0 = index.at(0);
    std::vector<double> w(static_cast<std::size_t>(n), 0.0), r(static_cast<std::size_t>(n)),
        p(static_cast<std::size_t>(n)), Ap(static_cast<std::size_t>(n));
    const auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::int64_t i = 0; i < n; ++i) {
            double s = x[static_cast<std::size_t>(i)];
            for (std::int64_t k = rowptr[static_cast<std::size_t>(i)];
                 k < rowptr[static_cast<std::size_t>(i) + 1]; ++k)
                s -= static_cast<double>(vals[static_cast<std::size_t>(k)]) *
                     x[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
            y[static_cast<std::size_t>(i)] = s;
        }
    };
    // Initial guess with the free-Green 1/r decay measured nowhere; a crude
    // 1/r profile clipped at the origin shortens CG noticeably.
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& c = states[static_cast<std::size_t>(i)];
        double r2 = 0.0;
        for (int v : c) r2 += static_cast<double>(v) * v;
        const double rE = std::sqrt(r2);
        const double u0 = (rE < 0.5) ? 1.5 : std::max(0.0, 0.48 / rE - 0.72 / L);
        w[static_cast<std::size_t>(i)] = u0 * sq[static_cast<std::size_t>(i)];
    }
    matvec(w, Ap);
    for (std::int64_t i = 0; i < n; ++i)
        r[static_cast<std::size_t>(i)] = -Ap[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(i0)] += sq[static_cast<std::size_t>(i0)];
    p = r;
    double rs = 0.0;
    for (double v : r) rs += v * v;
    const double target = 1e-8 * sq[static_cast<std::size_t>(i0)];
    for (int it = 0; it < 100000 && std::sqrt(rs) > target; ++it) {
        matvec(p, Ap);
        double pAp = 0.0;
        for (std::int64_t i = 0; i < n; ++i)
            pAp += p[static_cast<std::size_t>(i)] * Ap[static_cast<std::size_t>(i)];
        const double alpha = rs / pAp;
        for (std::int64_t i = 0; i < n; ++i) {
            w[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        double rs2 = 0.0;
        for (double v : r) rs2 += v * v;
        const double beta = rs2 / rs;
        rs = rs2;
        for (std::int64_t i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] =
                r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
    }
    return w[static_cast<std::size_t>(i0)] / sq[static_cast<std::size_t>(i0)];
}

}  // namespace detail

// G_{B_L^c}(0,0) on the Z^d ball of radius L.
inline double lattice_green_origin(int d, int L) {
    return detail::quotient_ball_green_origin(d, L);
}

struct LatticeGreenConvergence {
    double value = 0.0;
    int L = 0;
    std::vector<std::pair<int, double>> history;  // (L, G_L(0,0))
};

// Infinite-lattice G(0,0) approximated by growing balls: doubles L until the
// relative change across a doubling drops below `tol`.
inline LatticeGreenConvergence converged_lattice_green_origin(int d, double tol = 1e-3,
                                                              int L_start = 32,
                                                              int L_max = 1023) {
    if (d <= 2)
        throw std::invalid_argument("converged_lattice_green_origin: requires d >= 3");
    LatticeGreenConvergence out;
    double prev = detail::quotient_ball_green_origin(d, L_start);
    out.history.emplace_back(L_start, prev);
    for (int L = 2 * L_start; L <= L_max; L *= 2) {
        const double cur = detail::quotient_ball_green_origin(d, L);
        out.history.emplace_back(L, cur);
        if (std::abs(cur - prev) < tol * std::abs(cur)) {
            out.value = cur;
            out.L = L;
            return out;
        }
        prev = cur;
    }
    throw std::runtime_error(
        "converged_lattice_green_origin: did not converge within the radius cap");
}

}  // namespace arw

#endif
