#ifndef ARW_REGION_HPP
#define ARW_REGION_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arw/rng.hpp"

namespace arw {

using Vertex = std::int32_t;
inline constexpr Vertex kSink = -1;

enum class Family { LatticeZd, RegularTree };

inline std::string family_name(Family f) {
    return f == Family::LatticeZd ? "lattice" : "tree";
}

// Ball of radius L (graph distance < L) around the origin of Z^d or of the
// infinite d-regular tree. The exterior is collapsed into a single absorbing
// sink. Interior vertices carry dense indices assigned in breadth-first
// order from the origin, so index 0 is always the origin.
//
// Neighbor enumeration order is a frozen contract (instruction tapes encode
// jumps as neighbor indices):
//   lattice: +e1, -e1, +e2, -e2, ..., +ed, -ed
//   tree:    parent first, then children in canonical order; the root has
//            d children and no parent slot.
//
// Each vertex also carries a region-independent site key (derived from its
// lattice coordinates, or from its path from the tree root), so the same
// physical site reads the same instruction stream in nested regions.
class FiniteRegion {
  public:
    Family family;
    int degree = 0;
    int radius = 0;

    Vertex n_vertices() const { return static_cast<Vertex>(dist_.size()); }
    Vertex origin() const { return 0; }

    int distance(Vertex v) const { return dist_[static_cast<std::size_t>(v)]; }

    std::uint64_t site_key(Vertex v) const {
        return site_key_[static_cast<std::size_t>(v)];
    }

    // Interior index for a site key, or kSink if the site is not interior.
    Vertex index_of_key(std::uint64_t key) const {
        auto it = key_to_index_.find(key);
        return it == key_to_index_.end() ? kSink : it->second;
    }

    // The i-th neighbor of v (0 <= i < degree); kSink for exterior targets.
    Vertex neighbor(Vertex v, int i) const {
        return nbr_[static_cast<std::size_t>(v) * degree + i];
    }

    std::vector<Vertex> neighbors(Vertex v) const {
        if (v == kSink) throw std::invalid_argument("neighbors: sink has no neighbors");
        std::vector<Vertex> out(static_cast<std::size_t>(degree));
        for (int i = 0; i < degree; ++i) out[static_cast<std::size_t>(i)] = neighbor(v, i);
        return out;
    }

    // Lattice coordinates of v (lattice regions only).
    const std::vector<int>& coords(Vertex v) const {
        return coords_[static_cast<std::size_t>(v)];
    }

    // { v interior : r1 <= distance(0, v) < r2 }.
    std::vector<Vertex> ring(double r1, double r2) const {
        if (r1 < 0 || r2 < r1) throw std::invalid_argument("ring: need 0 <= r1 <= r2");
        std::vector<Vertex> out;
        for (Vertex v = 0; v < n_vertices(); ++v) {
            const double d = static_cast<double>(distance(v));
            if (d >= r1 && d < r2) out.push_back(v);
        }
        return out;
    }

    friend FiniteRegion make_lattice_ball(int d, int L);
    friend FiniteRegion make_tree_ball(int d, int L);

  private:
    std::vector<Vertex> nbr_;                 // n * degree, row-major
    std::vector<int> dist_;                   // graph distance from origin
    std::vector<std::uint64_t> site_key_;
    std::vector<std::vector<int>> coords_;    // lattice only
    std::unordered_map<std::uint64_t, Vertex> key_to_index_;
};

namespace detail {

inline std::uint64_t lattice_site_key(const std::vector<int>& c) {
    std::uint64_t k = 0x6c61747469636530ULL;
    for (int x : c) k = rng::mix(k ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(x)) + rng::kGolden));
    return k;
}

}  // namespace detail

inline FiniteRegion make_lattice_ball(int d, int L) {
    if (d < 1) throw std::invalid_argument("make_lattice_ball: d must be >= 1");
    if (L < 1) throw std::invalid_argument("make_lattice_ball: L must be >= 1");
    FiniteRegion r;
    r.family = Family::LatticeZd;
    r.degree = 2 * d;
    r.radius = L;

    std::map<std::vector<int>, Vertex> seen;  // exact lookup during construction
    std::deque<Vertex> frontier;

    std::vector<int> origin(static_cast<std::size_t>(d), 0);
    seen[origin] = 0;
    r.coords_.push_back(origin);
    r.dist_.push_back(0);
    frontier.push_back(0);

    while (!frontier.empty()) {
        const Vertex v = frontier.front();
        frontier.pop_front();
        const std::vector<int> c = r.coords_[static_cast<std::size_t>(v)];
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                std::vector<int> nc = c;
                nc[static_cast<std::size_t>(i)] += s;
                const int nd = r.dist_[static_cast<std::size_t>(v)] + 1;
                if (nd >= L) continue;  // exterior, handled below as sink
                auto it = seen.find(nc);
                if (it == seen.end()) {
                    const Vertex nv = static_cast<Vertex>(r.coords_.size());
                    seen[nc] = nv;
                    r.coords_.push_back(std::move(nc));
                    r.dist_.push_back(nd);
                    frontier.push_back(nv);
                }
            }
        }
    }

    const Vertex n = static_cast<Vertex>(r.coords_.size());
    r.nbr_.assign(static_cast<std::size_t>(n) * r.degree, kSink);
    r.site_key_.resize(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) {
        const auto& c = r.coords_[static_cast<std::size_t>(v)];
        r.site_key_[static_cast<std::size_t>(v)] = detail::lattice_site_key(c);
        r.key_to_index_[r.site_key_[static_cast<std::size_t>(v)]] = v;
        int slot = 0;
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                std::vector<int> nc = c;
                nc[static_cast<std::size_t>(i)] += s;
                auto it = seen.find(nc);
                r.nbr_[static_cast<std::size_t>(v) * r.degree + slot] =
                    (it == seen.end()) ? kSink : it->second;
                ++slot;
            }
        }
    }
    return r;
}

inline FiniteRegion make_tree_ball(int d, int L) {
    if (d < 3) throw std::invalid_argument("make_tree_ball: d must be >= 3");
    if (L < 1) throw std::invalid_argument("make_tree_ball: L must be >= 1");
    FiniteRegion r;
    r.family = Family::RegularTree;
    r.degree = d;
    r.radius = L;

    // Root first, then breadth-first by shell. Site key of child i is a mix
    // of the parent's key with i, which encodes the path from the root.
    r.dist_.push_back(0);
    r.site_key_.push_back(0x7472656520726f74ULL);
    std::vector<Vertex> parent{kSink};

    std::deque<Vertex> frontier{0};
    while (!frontier.empty()) {
        const Vertex v = frontier.front();
        frontier.pop_front();
        const int depth = r.dist_[static_cast<std::size_t>(v)];
        if (depth + 1 >= L) continue;
        const int n_children = (v == 0) ? d : d - 1;
        for (int i = 0; i < n_children; ++i) {
            const Vertex c = static_cast<Vertex>(r.dist_.size());
            r.dist_.push_back(depth + 1);
            r.site_key_.push_back(rng::mix(r.site_key_[static_cast<std::size_t>(v)] ^
                                           (static_cast<std::uint64_t>(i) + rng::kGolden)));
            parent.push_back(v);
            frontier.push_back(c);
        }
    }

    const Vertex n = static_cast<Vertex>(r.dist_.size());
    r.nbr_.assign(static_cast<std::size_t>(n) * d, kSink);
    std::vector<int> child_slot(static_cast<std::size_t>(n), 0);
    for (Vertex v = 0; v < n; ++v) {
        r.key_to_index_[r.site_key_[static_cast<std::size_t>(v)]] = v;
        if (v == 0) {
            child_slot[0] = 0;  // root: slots 0..d-1 are children
        } else {
            r.nbr_[static_cast<std::size_t>(v) * d + 0] = parent[static_cast<std::size_t>(v)];
            child_slot[static_cast<std::size_t>(v)] = 1;  // slot 0 is the parent
            const Vertex p = parent[static_cast<std::size_t>(v)];
            r.nbr_[static_cast<std::size_t>(p) * d + child_slot[static_cast<std::size_t>(p)]++] = v;
        }
    }
    // Remaining kSink slots are the exterior children of the last shell.
    return r;
}

inline FiniteRegion make_ball(Family f, int d, int L) {
    return f == Family::LatticeZd ? make_lattice_ball(d, L) : make_tree_ball(d, L);
}

}  // namespace arw

#endif
