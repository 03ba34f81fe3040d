#pragma once

#include "voxbox/boxgeom.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <vector>

namespace voxbox {

// Ordered store of integer intervals keyed by endpoints; the intervals kept
// during the sweep are pairwise disjoint.  Insert/delete/query are
// logarithmic (plus output size for queries).
class IntervalTree {
  public:
    struct Entry {
        Index lo, hi;
        Index payload;  // birth row of the strip
    };

    void insert(Index lo, Index hi, Index payload = 0) {
        if (lo > hi) throw std::invalid_argument("malformed interval");
        items_[{lo, hi}] = payload;
    }

    // Exact-match delete; no-op (returns false) when the interval is absent.
    bool erase(Index lo, Index hi) {
        if (lo > hi) throw std::invalid_argument("malformed interval");
        return items_.erase({lo, hi}) > 0;
    }

    bool contains(Index lo, Index hi) const { return items_.count({lo, hi}) > 0; }

    std::optional<Index> payload(Index lo, Index hi) const {
        auto it = items_.find({lo, hi});
        if (it == items_.end()) return std::nullopt;
        return it->second;
    }

    // All stored intervals contained in [lo,hi] (containment-mode query).
    std::vector<Entry> query_contained(Index lo, Index hi) const {
        if (lo > hi) throw std::invalid_argument("malformed interval");
        std::vector<Entry> out;
        for (auto it = items_.lower_bound({lo, std::numeric_limits<Index>::min()});
             it != items_.end() && it->first.first <= hi; ++it) {
            if (it->first.second <= hi)
                out.push_back({it->first.first, it->first.second, it->second});
        }
        return out;
    }

    std::vector<Entry> all() const {
        std::vector<Entry> out;
        for (const auto& [k, v] : items_) out.push_back({k.first, k.second, v});
        return out;
    }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

  private:
    std::map<std::pair<Index, Index>, Index> items_;
};

struct NeighborGaps {
    std::optional<std::pair<Index, Index>> left, right;
};

// Maximal uncovered interval immediately left/right of I, bounded by the
// nearest interval edge from `sorted` (sorted by lower endpoint; may overlap)
// or by the grid boundary [1,q].  A flush neighbour or grid edge yields an
// empty (absent) side.
inline NeighborGaps adjacent_neighbors(std::pair<Index, Index> I,
                                       std::span<const std::pair<Index, Index>> sorted,
                                       Index q) {
    NeighborGaps out;
    // nearest covered cell left of I: binary search over lower endpoints,
    // prefix maxima of upper endpoints
    Index left_edge = 0;  // grid boundary sentinel
    {
        Index best = 0;
        for (const auto& [lo, hi] : sorted) {
            if (lo >= I.first) break;  // sorted by lo
            best = std::max(best, std::min(hi, I.first - 1));
        }
        left_edge = best;
    }
    if (left_edge + 1 <= I.first - 1) out.left = {left_edge + 1, I.first - 1};
    Index right_edge = q + 1;
    {
        Index best = q + 1;
        for (const auto& [lo, hi] : sorted) {
            if (hi <= I.second) continue;
            if (lo > I.second) best = std::min(best, lo);
            else best = I.second + 1;  // overlaps past the right end: no gap
        }
        right_edge = best;
    }
    if (I.second + 1 <= right_edge - 1) out.right = {I.second + 1, right_edge - 1};
    return out;
}

namespace detail {

// Maximal complement runs of [1,q] minus the union of `intervals`.
inline std::vector<std::pair<Index, Index>> complement_runs(
    std::vector<std::pair<Index, Index>> intervals, Index q) {
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<Index, Index>> runs;
    Index cursor = 1;
    for (const auto& [lo, hi] : intervals) {
        if (lo > cursor) runs.emplace_back(cursor, lo - 1);
        cursor = std::max(cursor, hi + 1);
        if (cursor > q) break;
    }
    if (cursor <= q) runs.emplace_back(cursor, q);
    return runs;
}

}  // namespace detail

// Bottom-to-top sweep covering the complement C = [q]^2 \ union(boxes) with
// at most 4N pairwise-disjoint boxes contained in C.  Strips (created
// intervals) live in an interval tree keyed by their x-interval with the
// birth row as payload:
//   - a bottom event at row y destroys the strips absorbed by the new box
//     edge (they close with top edge y-1) and creates the adjacent gaps with
//     birth row y;
//   - a top event at row y closes the strips merged away by the vanishing
//     box with top edge y and creates the merged gap with birth row y+1.
// Bottom events precede top events at equal height; ties break by box id.
// Strips whose x-interval is unchanged by an event are left untouched.
inline std::vector<Box> cover_complement(const RangeSpace& space) {
    if (space.k != 2) throw std::invalid_argument("cover_complement works on [q]^2");
    const Index q = space.q;
    if (q < 1) throw std::invalid_argument("empty grid");
    for (const Box& b : space.boxes)
        if (b.c1.c[0] < 1 || b.c1.c[1] < 1 || b.c2.c[0] > q || b.c2.c[1] > q)
            throw std::invalid_argument("box outside the grid");

    struct Event {
        Index y;
        bool top;  // bottom events sort first at equal height
        std::size_t id;
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < space.boxes.size(); ++i) {
        events.push_back({space.boxes[i].c1.c[1], false, i});
        events.push_back({space.boxes[i].c2.c[1], true, i});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.y, a.top, a.id) < std::tie(b.y, b.top, b.id);
    });

    auto xiv = [&](std::size_t id) {
        return std::pair<Index, Index>{space.boxes[id].c1.c[0], space.boxes[id].c2.c[0]};
    };

    std::multiset<std::pair<Index, Index>> live;  // x-intervals of live boxes
    IntervalTree strips;
    strips.insert(1, q, 1);  // the whole bottom row starts as one created strip
    std::vector<Box> cover;

    auto emit = [&](Index xlo, Index xhi, Index birth, Index ytop) {
        if (birth > ytop) return;  // strip born and destroyed at the same event row
        VoxelCoord a, b;
        a.c = {xlo, birth};
        b.c = {xhi, ytop};
        cover.emplace_back(std::move(a), std::move(b));
    };

    // Replace the strips inside `span` by the complement runs of the live
    // union restricted to it.  Unchanged runs keep their birth row.
    auto update_span = [&](std::pair<Index, Index> span, Index close_top, Index birth) {
        if (span.first > span.second) return;
        std::vector<std::pair<Index, Index>> in_span;
        for (const auto& iv : live) {
            Index lo = std::max(iv.first, span.first), hi = std::min(iv.second, span.second);
            if (lo <= hi) in_span.emplace_back(lo - span.first + 1, hi - span.first + 1);
        }
        auto runs_rel = detail::complement_runs(std::move(in_span), span.second - span.first + 1);
        std::set<std::pair<Index, Index>> runs;
        for (auto [lo, hi] : runs_rel) runs.insert({lo + span.first - 1, hi + span.first - 1});
        for (const auto& e : strips.query_contained(span.first, span.second)) {
            if (runs.count({e.lo, e.hi})) continue;  // survives unchanged
            strips.erase(e.lo, e.hi);
            emit(e.lo, e.hi, e.payload, close_top);
        }
        for (const auto& [lo, hi] : runs)
            if (!strips.contains(lo, hi)) strips.insert(lo, hi, birth);
    };

    std::vector<std::pair<Index, Index>> sorted_live;
    auto span_around = [&](std::pair<Index, Index> iv) {
        sorted_live.assign(live.begin(), live.end());
        std::sort(sorted_live.begin(), sorted_live.end());
        NeighborGaps gaps = adjacent_neighbors(iv, sorted_live, q);
        Index lo = gaps.left ? gaps.left->first : iv.first;
        Index hi = gaps.right ? gaps.right->second : iv.second;
        return std::pair<Index, Index>{lo, hi};
    };

    for (const Event& ev : events) {
        auto iv = xiv(ev.id);
        if (!ev.top) {
            live.insert(iv);
            // strips swallowed by the new box close one row below it
            update_span(span_around(iv), ev.y - 1, ev.y);
        } else {
            live.erase(live.find(iv));
            // strips adjacent to the vanished box stay complement through
            // row y; the merged gap exists from the next row up
            update_span(span_around(iv), ev.y, ev.y + 1);
        }
    }
    for (const auto& e : strips.all()) {
        strips.erase(e.lo, e.hi);
        emit(e.lo, e.hi, e.payload, q);
    }
    if (!strips.empty())  // every created strip must pair with a destruction
        throw std::logic_error("sweep left undestroyed strips behind");

    // Stitch vertically adjacent strips over the same x-interval.
    std::map<std::pair<Index, Index>, std::vector<std::pair<Index, Index>>> columns;
    for (const Box& b : cover)
        columns[{b.c1.c[0], b.c2.c[0]}].emplace_back(b.c1.c[1], b.c2.c[1]);
    std::vector<Box> merged;
    for (auto& [xs, ys] : columns) {
        std::sort(ys.begin(), ys.end());
        std::size_t i = 0;
        while (i < ys.size()) {
            Index ylo = ys[i].first, yhi = ys[i].second;
            while (i + 1 < ys.size() && ys[i + 1].first == yhi + 1) {
                yhi = ys[i + 1].second;
                ++i;
            }
            VoxelCoord a, b;
            a.c = {xs.first, ylo};
            b.c = {xs.second, yhi};
            merged.emplace_back(std::move(a), std::move(b));
            ++i;
        }
    }
    std::sort(merged.begin(), merged.end());
    return merged;
}

}  // namespace voxbox
