#pragma once

#include "voxbox/field.hpp"
#include "voxbox/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace voxbox {

// Axis-aligned box on a voxel grid, stored by its two opposing convex
// corners: c1 the coordinatewise minimum, c2 the maximum.  BB(c1,c2)
// reconstructs the box.
struct Box {
    VoxelCoord c1, c2;

    Box() = default;
    Box(VoxelCoord a, VoxelCoord b) : c1(std::move(a)), c2(std::move(b)) {
        if (c1.c.size() != c2.c.size()) throw std::invalid_argument("corner arity mismatch");
        for (std::size_t j = 0; j < c1.c.size(); ++j)
            if (c1.c[j] > c2.c[j]) throw std::invalid_argument("box requires c1 <= c2");
    }

    unsigned k() const { return static_cast<unsigned>(c1.c.size()); }

    bool contains(const VoxelCoord& p) const {
        for (std::size_t j = 0; j < c1.c.size(); ++j)
            if (p.c[j] < c1.c[j] || p.c[j] > c2.c[j]) return false;
        return true;
    }

    std::uint64_t volume() const {
        std::uint64_t v = 1;
        for (std::size_t j = 0; j < c1.c.size(); ++j)
            v *= static_cast<std::uint64_t>(c2.c[j] - c1.c[j] + 1);
        return v;
    }

    // Number of axes with nontrivial extent, |J(R)|.
    unsigned dim() const {
        unsigned d = 0;
        for (std::size_t j = 0; j < c1.c.size(); ++j)
            if (c1.c[j] < c2.c[j]) ++d;
        return d;
    }

    bool operator==(const Box& o) const { return c1 == o.c1 && c2 == o.c2; }
    bool operator<(const Box& o) const {
        if (!(c1 == o.c1)) return c1 < o.c1;
        return c2 < o.c2;
    }
};

inline bool boxes_intersect(const Box& a, const Box& b) {
    for (std::size_t j = 0; j < a.c1.c.size(); ++j)
        if (a.c2.c[j] < b.c1.c[j] || b.c2.c[j] < a.c1.c[j]) return false;
    return true;
}

inline Box bounding_box(std::span<const VoxelCoord> points) {
    if (points.empty()) throw std::invalid_argument("bounding box of an empty set");
    VoxelCoord lo = points[0], hi = points[0];
    for (const VoxelCoord& p : points)
        for (std::size_t j = 0; j < p.c.size(); ++j) {
            lo.c[j] = std::min(lo.c[j], p.c[j]);
            hi.c[j] = std::max(hi.c[j], p.c[j]);
        }
    return Box(std::move(lo), std::move(hi));
}

// The <= 2^k distinct geometric corners (duplicates collapse on degenerate
// axes).
inline std::vector<VoxelCoord> box_corners(const Box& box) {
    std::set<VoxelCoord> out;
    const std::size_t k = box.c1.c.size();
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        VoxelCoord p;
        p.c.resize(k);
        for (std::size_t j = 0; j < k; ++j)
            p.c[j] = (mask >> j & 1u) ? box.c2.c[j] : box.c1.c[j];
        out.insert(std::move(p));
    }
    return {out.begin(), out.end()};
}

inline std::vector<VoxelCoord> box_points(const Box& box) {
    std::vector<VoxelCoord> out;
    VoxelCoord cur = box.c1;
    const std::size_t k = cur.c.size();
    while (true) {
        out.push_back(cur);
        std::size_t j = k;
        while (j-- > 0) {
            if (cur.c[j] < box.c2.c[j]) {
                ++cur.c[j];
                for (std::size_t l = j + 1; l < k; ++l) cur.c[l] = box.c1.c[l];
                break;
            }
            if (j == 0) return out;
        }
    }
}

// The subcollection of boxes none of whose corners lies in a different box.
// Under the 4-point-or-empty boundary-intersection structure this is the
// minimum-cardinality cover of the union.  Identical duplicates are merged
// first so a box is never discarded against its own copy.
inline std::vector<Box> maximal_corner_subcover(std::span<const Box> boxes) {
    std::vector<Box> uniq(boxes.begin(), boxes.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<Box> kept;
    for (const Box& b : uniq) {
        bool corner_covered = false;
        for (const VoxelCoord& c : box_corners(b)) {
            for (const Box& other : uniq) {
                if (other == b) continue;
                if (other.contains(c)) {
                    corner_covered = true;
                    break;
                }
            }
            if (corner_covered) break;
        }
        if (!corner_covered) kept.push_back(b);
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Rational-corner boxes and their integer embeddings.

struct RatBox {
    std::vector<Rat> lo, hi;
    unsigned k() const { return static_cast<unsigned>(lo.size()); }
    bool contains(std::span<const Rat> p) const {
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (p[j] < lo[j] || p[j] > hi[j]) return false;
        return true;
    }
};

// Monotone map of interval endpoints onto their ranks.  Breakpoints are the
// sorted distinct endpoint values; breakpoint j maps to integer j.  The
// linear interpolation between breakpoints is implicit: downstream only the
// endpoint images are needed.
struct IntervalEmbedding {
    std::vector<Rat> breakpoints;

    Index rank(const Rat& v) const {
        auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), v);
        if (it == breakpoints.end() || *it != v)
            throw std::invalid_argument("value is not an interval endpoint");
        return static_cast<Index>(it - breakpoints.begin()) + 1;
    }
};

// Embed N rational intervals into [1,2N]: sort the distinct endpoints and
// replace each endpoint by its rank.  Order of all endpoints is preserved;
// duplicate endpoints collapse to one breakpoint, and a degenerate interval
// contributes a single breakpoint.
inline std::pair<IntervalEmbedding, std::vector<std::pair<Index, Index>>> embed_intervals(
    std::span<const std::pair<Rat, Rat>> intervals) {
    if (intervals.empty()) throw std::invalid_argument("embed_intervals: no intervals");
    IntervalEmbedding emb;
    for (const auto& [a, b] : intervals) {
        if (a > b) throw std::invalid_argument("interval requires a <= b");
        emb.breakpoints.push_back(a);
        emb.breakpoints.push_back(b);
    }
    std::sort(emb.breakpoints.begin(), emb.breakpoints.end());
    emb.breakpoints.erase(std::unique(emb.breakpoints.begin(), emb.breakpoints.end()),
                          emb.breakpoints.end());
    std::vector<std::pair<Index, Index>> images;
    images.reserve(intervals.size());
    for (const auto& [a, b] : intervals) images.emplace_back(emb.rank(a), emb.rank(b));
    return {std::move(emb), std::move(images)};
}

// A range space: the voxel grid [q]^k together with a collection of boxes.
struct RangeSpace {
    unsigned k = 2;
    Index q = 0;
    std::vector<Box> boxes;

    void save(std::ostream& os) const {
        os << "RS " << k << ' ' << q << ' ' << boxes.size() << '\n';
        for (const Box& b : boxes) {
            for (std::size_t j = 0; j < b.c1.c.size(); ++j) os << (j ? " " : "") << b.c1.c[j];
            for (std::size_t j = 0; j < b.c2.c.size(); ++j) os << ' ' << b.c2.c[j];
            os << '\n';
        }
    }

    void save_file(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        save(os);
    }

    static RangeSpace load(std::istream& is) {
        std::string magic;
        RangeSpace rs;
        std::size_t m = 0;
        if (!(is >> magic >> rs.k >> rs.q >> m) || magic != "RS" || rs.k == 0)
            throw std::runtime_error("malformed RangeSpace header");
        for (std::size_t i = 0; i < m; ++i) {
            VoxelCoord a, b;
            a.c.resize(rs.k);
            b.c.resize(rs.k);
            for (auto& x : a.c)
                if (!(is >> x)) throw std::runtime_error("malformed RangeSpace box line");
            for (auto& x : b.c)
                if (!(is >> x)) throw std::runtime_error("malformed RangeSpace box line");
            rs.boxes.emplace_back(std::move(a), std::move(b));
        }
        return rs;
    }

    static RangeSpace load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open: " + path);
        return load(is);
    }
};

// Per-dimension interval embedding of N rational-corner boxes.  All image
// corners are integers in [1,2N]^k; pairwise per-axis endpoint orderings are
// preserved by monotonicity.
struct BoxEmbedding {
    RangeSpace space;                         // grid fixed to [2N]^k
    std::vector<IntervalEmbedding> per_axis;  // one embedding per dimension
};

inline BoxEmbedding embed_boxes(std::span<const RatBox> boxes) {
    if (boxes.empty()) throw std::invalid_argument("embed_boxes: no boxes");
    const unsigned k = boxes[0].k();
    for (const RatBox& b : boxes)
        if (b.k() != k) throw std::invalid_argument("embed_boxes: mixed dimensions");
    BoxEmbedding out;
    out.space.k = k;
    out.space.q = 2 * static_cast<Index>(boxes.size());
    std::vector<std::vector<std::pair<Index, Index>>> images(k);
    for (unsigned j = 0; j < k; ++j) {
        std::vector<std::pair<Rat, Rat>> intervals;
        intervals.reserve(boxes.size());
        for (const RatBox& b : boxes) intervals.emplace_back(b.lo[j], b.hi[j]);
        auto [emb, img] = embed_intervals(intervals);
        out.per_axis.push_back(std::move(emb));
        images[j] = std::move(img);
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        VoxelCoord a, b;
        a.c.resize(k);
        b.c.resize(k);
        for (unsigned j = 0; j < k; ++j) {
            a.c[j] = images[j][i].first;
            b.c[j] = images[j][i].second;
        }
        out.space.boxes.emplace_back(std::move(a), std::move(b));
    }
    return out;
}

}  // namespace voxbox
