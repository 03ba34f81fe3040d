#pragma once

#include "voxbox/boxgeom.hpp"
#include "voxbox/cluster.hpp"
#include "voxbox/codec.hpp"
#include "voxbox/field.hpp"
#include "voxbox/poly.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace voxbox {

struct SolverFailure : std::runtime_error {
    Box box;
    SolverFailure(Box b, const std::string& msg) : std::runtime_error(msg), box(std::move(b)) {}
};

struct CompressionStats {
    std::uint64_t entries = 0;
    std::uint64_t bit_length = 0;
    std::uint64_t field_bits = 0;
    Rat ratio;
    Rat eps_star;
    double seconds = 0;
};

struct CompressionResult {
    BoxCoverSummaries payload;
    Codeword codeword;
    Rat ratio;
    CompressionStats stats;
};

struct Reconstruction {
    VoxelField field_hat;
};

namespace detail {

inline CompressionResult finish_result(BoxCoverSummaries payload, const VoxelField& field) {
    CompressionResult res{std::move(payload), {}, Rat(0), {}};
    res.codeword = serialize(res.payload);
    res.stats.entries = res.payload.entries.size();
    res.stats.bit_length = res.codeword.bit_length;
    res.stats.field_bits = field.size_bits();
    res.stats.eps_star = res.payload.eps_star;
    res.ratio = Rat(Int(res.stats.field_bits), Int(res.stats.bit_length));
    res.stats.ratio = res.ratio;
    return res;
}

inline std::vector<Index> box_flat_indices(const VoxelField& field, const Box& box) {
    std::vector<Index> out;
    for (const VoxelCoord& v : box_points(box)) out.push_back(field.coord_to_flat(v));
    return out;
}

}  // namespace detail

// Deterministic single-pass heuristic: scan voxels in flat order; at each
// uncovered voxel grow a box axis by axis while the whole box stays a
// feasible cluster at threshold 2*eps*.  Boxes may overlap voxels covered
// earlier; every box carries its mid-range summary.
inline CompressionResult compress_greedy(const VoxelField& field, const PiecewisePolynomial& f,
                                         const Rat& eps, unsigned threads = 1) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0,1)");
    if (field.n() == 0) throw std::invalid_argument("cannot compress an empty field");
    auto t0 = std::chrono::steady_clock::now();
    EnergyCache cache = EnergyCache::build(field, f, threads);
    EpsilonStar estar = cache.select_epsilon_star(eps);
    const Rat bound = 2 * estar.value;

    std::vector<char> covered(static_cast<std::size_t>(field.n()), 0);
    BoxCoverSummaries payload;
    payload.eps_star = estar.value;
    payload.eps = eps;
    payload.f = f;

    for (Index i = 1; i <= field.n(); ++i) {
        if (covered[static_cast<std::size_t>(i - 1)]) continue;
        VoxelCoord seed = field.flat_to_coord(i);
        Box box(seed, seed);
        Rat lo = cache.value(i), hi = lo;
        for (unsigned axis = 0; axis < field.k(); ++axis) {
            while (box.c2.c[axis] < field.dims()[axis]) {
                Box slab = box;  // the candidate layer at c2[axis] + 1
                slab.c1.c[axis] = slab.c2.c[axis] = box.c2.c[axis] + 1;
                Rat nlo = lo, nhi = hi;
                for (Index j : detail::box_flat_indices(field, slab)) {
                    const Rat& v = cache.value(j);
                    if (v < nlo) nlo = v;
                    if (v > nhi) nhi = v;
                }
                if (nhi - nlo > bound) break;
                box.c2.c[axis] += 1;
                lo = nlo;
                hi = nhi;
            }
        }
        for (Index j : detail::box_flat_indices(field, box))
            covered[static_cast<std::size_t>(j - 1)] = 1;
        payload.entries.push_back(BoxSummary{box, (lo + hi) / 2});
    }
    payload.entries = detail::canonical_entries(std::move(payload.entries));
    CompressionResult res = detail::finish_result(std::move(payload), field);
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace detail {

// Exact cover machinery for one energy component (transitive closure of the
// pairwise d_f <= 2*eps* relation): feasible boxes never span components, so
// the global minimum decomposes into per-component minima.
class ComponentSolver {
  public:
    ComponentSolver(const VoxelField& field, const EnergyCache& cache, Rat bound,
                    std::vector<Index> voxels)
        : field_(field), cache_(cache), bound_(std::move(bound)), voxels_(std::move(voxels)) {
        members_.insert(voxels_.begin(), voxels_.end());
    }

    // All candidate boxes worth considering for a minimum cover: maximal
    // feasible boxes with every voxel inside the component.
    void build_candidates() {
        Rat lo = cache_.value(voxels_[0]), hi = lo;
        for (Index i : voxels_) {
            const Rat& v = cache_.value(i);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        const bool uniform = (hi - lo <= bound_);  // every sub-box feasible

        std::vector<VoxelCoord> pts;
        pts.reserve(voxels_.size());
        for (Index i : voxels_) pts.push_back(field_.flat_to_coord(i));
        Box bb = bounding_box(pts);

        if (uniform && bb.volume() == voxels_.size()) {
            candidates_ = {bb};  // the component is itself a box
        } else if (uniform && field_.k() == 1) {
            candidates_ = maximal_runs_1d();
        } else if (uniform && field_.k() == 2) {
            candidates_ = maximal_rects_2d(bb);
        } else {
            candidates_ = brute_candidates(bb);
        }
        std::sort(candidates_.begin(), candidates_.end());
    }

    void solve() {
        build_candidates();
        cand_cells_.resize(candidates_.size());
        for (std::size_t ci = 0; ci < candidates_.size(); ++ci)
            cand_cells_[ci] = box_flat_indices(field_, candidates_[ci]);
        covering_.clear();
        for (std::size_t ci = 0; ci < candidates_.size(); ++ci)
            for (Index i : cand_cells_[ci]) covering_[i].push_back(ci);
        std::vector<std::size_t> chosen;
        std::set<Index> uncovered(voxels_.begin(), voxels_.end());
        dfs(chosen, uncovered);
    }

    const std::vector<Box>& candidates() const { return candidates_; }
    const std::vector<std::vector<std::size_t>>& covers() const { return covers_; }

  private:
    bool feasible_box(const Box& box) const {
        std::optional<Rat> lo, hi;
        for (const VoxelCoord& v : box_points(box)) {
            Index i = field_.coord_to_flat(v);
            if (!members_.count(i)) return false;
            const Rat& val = cache_.value(i);
            if (!lo || val < *lo) lo = val;
            if (!hi || val > *hi) hi = val;
            if (*hi - *lo > bound_) return false;
        }
        return true;
    }

    std::vector<Box> maximal_runs_1d() const {
        std::vector<Box> out;
        std::vector<Index> sorted(voxels_.begin(), voxels_.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
            VoxelCoord a, b;
            a.c = {sorted[i]};
            b.c = {sorted[j]};
            out.emplace_back(std::move(a), std::move(b));
            i = j + 1;
        }
        return out;
    }

    // All maximal axis-aligned rectangles inside the component's cell set
    // (feasibility already uniform).  Row-pair sweep: for rows r1..r2 the
    // maximal x-runs of the intersected row masks give the rectangles; keep
    // those that cannot extend up or down.
    std::vector<Box> maximal_rects_2d(const Box& bb) {
        auto in = [&](Index x, Index y) {
            VoxelCoord v;
            v.c = {x, y};
            return members_.count(field_.coord_to_flat(v)) > 0;
        };
        std::set<Box> out;
        for (Index y1 = bb.c1.c[1]; y1 <= bb.c2.c[1]; ++y1) {
            std::vector<char> mask;  // columns of bb present in all rows y1..y2
            mask.assign(static_cast<std::size_t>(bb.c2.c[0] - bb.c1.c[0] + 1), 1);
            for (Index y2 = y1; y2 <= bb.c2.c[1]; ++y2) {
                bool any = false;
                for (Index x = bb.c1.c[0]; x <= bb.c2.c[0]; ++x) {
                    auto& m = mask[static_cast<std::size_t>(x - bb.c1.c[0])];
                    m = m && in(x, y2);
                    any = any || m;
                }
                if (!any) break;
                Index x = bb.c1.c[0];
                while (x <= bb.c2.c[0]) {
                    if (!mask[static_cast<std::size_t>(x - bb.c1.c[0])]) {
                        ++x;
                        continue;
                    }
                    Index xr = x;
                    while (xr + 1 <= bb.c2.c[0] && mask[static_cast<std::size_t>(xr + 1 - bb.c1.c[0])])
                        ++xr;
                    auto full_row = [&](Index y) {
                        if (y < bb.c1.c[1] || y > bb.c2.c[1]) return false;
                        for (Index xx = x; xx <= xr; ++xx)
                            if (!in(xx, y)) return false;
                        return true;
                    };
                    if (!full_row(y1 - 1) && !full_row(y2 + 1)) {
                        VoxelCoord a, b;
                        a.c = {x, y1};
                        b.c = {xr, y2};
                        out.insert(Box(std::move(a), std::move(b)));
                    }
                    x = xr + 1;
                }
            }
        }
        return {out.begin(), out.end()};
    }

    std::vector<Box> brute_candidates(const Box& bb) {
        if (voxels_.size() > 64)
            throw std::invalid_argument(
                "budget exceeded: mixed-energy component too large for exact search");
        std::vector<Box> feas;
        std::vector<VoxelCoord> corners = box_points(bb);
        for (const VoxelCoord& a : corners)
            for (const VoxelCoord& b : corners) {
                bool le = true;
                for (std::size_t j = 0; j < a.c.size(); ++j)
                    if (a.c[j] > b.c[j]) le = false;
                if (!le) continue;
                Box box(a, b);
                if (feasible_box(box)) feas.push_back(box);
            }
        std::vector<Box> maximal;
        for (const Box& b : feas) {
            bool dominated = false;
            for (const Box& o : feas) {
                if (o == b) continue;
                bool contains_all = true;
                for (std::size_t j = 0; j < b.c1.c.size(); ++j)
                    if (o.c1.c[j] > b.c1.c[j] || o.c2.c[j] < b.c2.c[j]) {
                        contains_all = false;
                        break;
                    }
                if (contains_all) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) maximal.push_back(b);
        }
        return maximal;
    }

    void dfs(std::vector<std::size_t>& chosen, std::set<Index>& uncovered) {
        if (uncovered.empty()) {
            if (chosen.size() < best_) {
                best_ = chosen.size();
                covers_.clear();
            }
            if (chosen.size() == best_ && covers_.size() < kTieCap) {
                std::vector<std::size_t> sorted(chosen);
                std::sort(sorted.begin(), sorted.end());
                if (!seen_covers_.count(sorted)) {
                    seen_covers_.insert(sorted);
                    covers_.push_back(sorted);
                }
            }
            return;
        }
        if (chosen.size() + 1 > best_) return;
        // branch on the uncovered voxel with the fewest covering candidates
        Index pivot = *uncovered.begin();
        std::size_t fewest = SIZE_MAX;
        for (Index i : uncovered) {
            std::size_t c = covering_.at(i).size();
            if (c < fewest) {
                fewest = c;
                pivot = i;
                if (c <= 1) break;
            }
        }
        for (std::size_t ci : covering_.at(pivot)) {
            std::vector<Index> newly;
            for (Index i : cand_cells_[ci])
                if (uncovered.erase(i)) newly.push_back(i);
            chosen.push_back(ci);
            dfs(chosen, uncovered);
            chosen.pop_back();
            for (Index i : newly) uncovered.insert(i);
        }
    }

    static constexpr std::size_t kTieCap = 4096;
    const VoxelField& field_;
    const EnergyCache& cache_;
    Rat bound_;
    std::vector<Index> voxels_;
    std::set<Index> members_;
    std::vector<Box> candidates_;
    std::vector<std::vector<Index>> cand_cells_;
    std::map<Index, std::vector<std::size_t>> covering_;
    std::vector<std::vector<std::size_t>> covers_;
    std::set<std::vector<std::size_t>> seen_covers_;
    std::size_t best_ = SIZE_MAX;
};

}  // namespace detail

// Exhaustive minimum-cardinality feasible cover; maximal CR follows because
// every entry costs the same bit budget under the codec's uniform padding.
// Ties at minimum size are broken by summary width (the serialized-length
// term that can still vary) and then by entry order.
inline CompressionResult compress_exact(const VoxelField& field, const PiecewisePolynomial& f,
                                        const Rat& eps, std::uint64_t budget) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0,1)");
    if (field.n() == 0) throw std::invalid_argument("cannot compress an empty field");
    if (static_cast<std::uint64_t>(field.n()) > budget)
        throw std::invalid_argument("budget exceeded: exact search is exponential");
    auto t0 = std::chrono::steady_clock::now();
    EnergyCache cache = EnergyCache::build(field, f);
    EpsilonStar estar = cache.select_epsilon_star(eps);
    const Rat bound = 2 * estar.value;

    std::vector<Index> parent(static_cast<std::size_t>(field.n()) + 1);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<Index>(i);
    std::function<Index(Index)> find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::vector<std::pair<Rat, Index>> by_value;
    for (Index i = 1; i <= field.n(); ++i) by_value.emplace_back(cache.value(i), i);
    std::sort(by_value.begin(), by_value.end());
    for (std::size_t a = 0; a + 1 < by_value.size(); ++a)
        for (std::size_t b = a + 1; b < by_value.size(); ++b) {
            if (by_value[b].first - by_value[a].first > bound) break;
            parent[static_cast<std::size_t>(find(by_value[a].second))] =
                find(by_value[b].second);
        }
    std::map<Index, std::vector<Index>> components;
    for (Index i = 1; i <= field.n(); ++i) components[find(i)].push_back(i);

    BoxCoverSummaries payload;
    payload.eps_star = estar.value;
    payload.eps = eps;
    payload.f = f;

    for (auto& [root, voxels] : components) {
        detail::ComponentSolver solver(field, cache, bound, voxels);
        solver.solve();
        if (solver.covers().empty())
            throw std::logic_error("component admits no cover");  // unreachable
        auto summarize_cover = [&](const std::vector<std::size_t>& cover) {
            std::vector<BoxSummary> entries;
            for (std::size_t ci : cover) {
                std::vector<Index> ms = detail::box_flat_indices(field, solver.candidates()[ci]);
                Rat lo = cache.value(ms[0]), hi = lo;
                for (Index m : ms) {
                    const Rat& v = cache.value(m);
                    if (v < lo) lo = v;
                    if (v > hi) hi = v;
                }
                entries.push_back(BoxSummary{solver.candidates()[ci], (lo + hi) / 2});
            }
            return detail::canonical_entries(std::move(entries));
        };
        auto width_key = [](const std::vector<BoxSummary>& entries) {
            std::uint64_t w = 0;
            for (const BoxSummary& e : entries)
                w = std::max(w, magnitude_bits(abs(numerator(e.summary))) +
                                    magnitude_bits(denominator(e.summary)));
            return w;
        };
        std::optional<std::vector<BoxSummary>> best_entries;
        std::uint64_t best_width = 0;
        for (const auto& cover : solver.covers()) {
            auto entries = summarize_cover(cover);
            std::uint64_t w = width_key(entries);
            bool better = !best_entries || w < best_width;
            bool tie_better = best_entries && w == best_width && [&] {
                auto key = [](const std::vector<BoxSummary>& es) {
                    std::vector<Box> bs;
                    for (const auto& e : es) bs.push_back(e.box);
                    return bs;
                };
                return key(entries) < key(*best_entries);
            }();
            if (better || tie_better) {
                best_entries = std::move(entries);
                best_width = w;
            }
        }
        payload.entries.insert(payload.entries.end(), best_entries->begin(), best_entries->end());
    }
    payload.entries = detail::canonical_entries(std::move(payload.entries));
    CompressionResult res = detail::finish_result(std::move(payload), field);
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace detail {

// Representative search for a decoded box: a rational point x with
// (f(x) - target)^2 <= delta^2.  Constant pieces are matched directly; other
// pieces are probed at region anchors and along axis/diagonal rays until a
// sign-bracketing pair within one piece is found, then refined by exact
// rational bisection with an iteration cap of 64 + size(delta).
class RepresentativeSolver {
  public:
    RepresentativeSolver(const PiecewisePolynomial& f, Rat delta)
        : f_(f), delta_(std::move(delta)) {}

    std::optional<std::vector<Rat>> find(const Rat& target) const {
        for (const PolyPiece& p : f_.pieces()) {
            if (!is_constant(p)) continue;
            Rat c = p.terms.empty() ? Rat(0) : p.terms[0].coeff;
            if (rat_abs(c - target) > delta_) continue;
            auto pt = region_point(p);
            if (pt && check(*pt, target)) return pt;
        }
        std::map<int, std::pair<std::optional<std::vector<Rat>>, std::optional<std::vector<Rat>>>>
            brackets;  // piece -> (below, above)
        for (const auto& s : sample_points()) {
            Rat g;
            try {
                g = f_.eval(s) - target;
            } catch (const UndefinedRegionError&) {
                continue;
            }
            if (rat_abs(g) <= delta_) return s;
            int pi = piece_of(s);
            auto& br = brackets[pi];
            if (g < 0 && !br.first) br.first = s;
            if (g > 0 && !br.second) br.second = s;
            if (br.first && br.second) return bisect(*br.first, *br.second, target);
        }
        return std::nullopt;
    }

    bool check(std::span<const Rat> x, const Rat& target) const {
        Rat g = f_.eval(x) - target;
        return g * g <= delta_ * delta_;
    }

  private:
    bool is_constant(const PolyPiece& p) const {
        for (const PolyTerm& t : p.terms)
            for (unsigned e : t.exponents)
                if (e) return false;
        return true;
    }

    int piece_of(std::span<const Rat> x) const {
        const auto& ps = f_.pieces();
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (ps[i].is_else || ps[i].region.contains(x)) return static_cast<int>(i);
        return -1;
    }

    bool piece_match(const PolyPiece& target, std::span<const Rat> x) const {
        for (const PolyPiece& q : f_.pieces()) {
            if (&q == &target) return q.is_else || q.region.contains(x);
            if (!q.is_else && q.region.contains(x)) return false;
        }
        return false;
    }

    std::optional<std::vector<Rat>> region_point(const PolyPiece& p) const {
        const unsigned d = f_.dim();
        if (p.is_else) {
            Rat big = 1;
            for (const PolyPiece& q : f_.pieces()) {
                if (q.region.kind == RegionPredicate::Kind::box)
                    for (const Rat& h : q.region.hi) big = std::max(big, rat_abs(h));
                if (q.region.kind == RegionPredicate::Kind::value_set)
                    for (const Rat& v : q.region.values) big = std::max(big, rat_abs(v));
            }
            std::vector<Rat> pt(d, big + 1);
            if (piece_match(p, pt)) return pt;
            return std::nullopt;
        }
        switch (p.region.kind) {
            case RegionPredicate::Kind::always: return std::vector<Rat>(d, Rat(0));
            case RegionPredicate::Kind::box: {
                std::vector<Rat> pt(d);
                for (unsigned j = 0; j < d; ++j) pt[j] = (p.region.lo[j] + p.region.hi[j]) / 2;
                return pt;
            }
            case RegionPredicate::Kind::value_set: {
                std::vector<Rat> pt(d, Rat(0));
                pt[p.region.coord] = p.region.values.front();
                if (piece_match(p, pt)) return pt;
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    std::vector<std::vector<Rat>> sample_points() const {
        const unsigned d = f_.dim();
        std::vector<std::vector<Rat>> out;
        // region anchors first: corners and centers of box pieces, the
        // designated values of value-set pieces
        for (const PolyPiece& p : f_.pieces()) {
            if (p.region.kind == RegionPredicate::Kind::box && d <= 10) {
                for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
                    std::vector<Rat> pt(d);
                    for (unsigned j = 0; j < d; ++j)
                        pt[j] = (mask >> j & 1u) ? p.region.hi[j] : p.region.lo[j];
                    out.push_back(std::move(pt));
                }
                std::vector<Rat> center(d);
                for (unsigned j = 0; j < d; ++j) center[j] = (p.region.lo[j] + p.region.hi[j]) / 2;
                out.push_back(std::move(center));
            }
            if (p.region.kind == RegionPredicate::Kind::value_set) {
                for (const Rat& v : p.region.values) {
                    std::vector<Rat> pt(d, Rat(0));
                    pt[p.region.coord] = v;
                    out.push_back(std::move(pt));
                }
            }
        }
        out.emplace_back(d, Rat(0));
        for (int exp = 0; exp <= 40; ++exp) {
            Rat mag = Rat(Int(1) << exp);
            for (unsigned j = 0; j < d; ++j) {
                std::vector<Rat> p(d, Rat(0));
                p[j] = mag;
                out.push_back(p);
                p[j] = -mag;
                out.push_back(std::move(p));
            }
            out.emplace_back(d, mag);
            out.emplace_back(d, -mag);
        }
        return out;
    }

    std::optional<std::vector<Rat>> bisect(const std::vector<Rat>& lo_pt,
                                           const std::vector<Rat>& hi_pt,
                                           const Rat& target) const {
        const unsigned d = f_.dim();
        const std::uint64_t max_iter = 64 + encoded_bits(delta_);
        Rat a = 0, b = 1;
        Rat ga = f_.eval(lo_pt) - target;
        auto at = [&](const Rat& t) {
            std::vector<Rat> p(d);
            for (unsigned j = 0; j < d; ++j) p[j] = lo_pt[j] + t * (hi_pt[j] - lo_pt[j]);
            return p;
        };
        for (std::uint64_t it = 0; it < max_iter; ++it) {
            Rat mid = (a + b) / 2;
            std::vector<Rat> p = at(mid);
            Rat g = f_.eval(p) - target;
            if (g * g <= delta_ * delta_) return p;
            if ((g < 0) == (ga < 0)) {
                a = mid;
                ga = g;
            } else {
                b = mid;
            }
        }
        return std::nullopt;
    }

    const PiecewisePolynomial& f_;
    Rat delta_;
};

}  // namespace detail

// Decompression: for each box find a representative x with
// (f(x) - summary)^2 <= (eps - eps*)^2, then assign it to every voxel of the
// box, later entries overwriting earlier ones in canonical order.  The
// triangle inequality then bounds every per-voxel energy gap by eps.
inline Reconstruction decompress(const Codeword& code) {
    BoxCoverSummaries payload = deserialize(code);
    auto dims_opt = detail::inferred_dims(payload);
    if (!dims_opt) throw std::invalid_argument("cannot reconstruct from an empty cover");
    const std::vector<Index> dims = *dims_opt;
    const unsigned d = payload.f.dim();
    Rat delta = payload.eps - payload.eps_star;

    detail::RepresentativeSolver solver(payload.f, delta);
    std::map<Rat, std::vector<Rat>> memo;
    std::vector<std::vector<Rat>> reps;
    for (const BoxSummary& e : payload.entries) {
        auto it = memo.find(e.summary);
        if (it == memo.end()) {
            auto rep = solver.find(e.summary);
            if (!rep || !solver.check(*rep, e.summary))
                throw SolverFailure(e.box, "no representative found for summary " +
                                               rat_to_string(e.summary));
            it = memo.emplace(e.summary, std::move(*rep)).first;
        }
        reps.push_back(it->second);
    }

    std::vector<Rat> lo(d), hi(d);
    bool first = true;
    for (const auto& r : reps)
        for (unsigned j = 0; j < d; ++j) {
            if (first || r[j] < lo[j]) lo[j] = r[j];
            if (first || r[j] > hi[j]) hi[j] = r[j];
            if (j + 1 == d) first = false;
        }
    VoxelField hat(dims, d, lo, hi);
    for (std::size_t ei = 0; ei < payload.entries.size(); ++ei)
        for (const VoxelCoord& v : box_points(payload.entries[ei].box))
            hat.set_vec(hat.coord_to_flat(v), reps[ei]);
    return Reconstruction{std::move(hat)};
}

// Flat indices violating |f(X_i) - f(X_hat_i)| <= eps; empty iff the pair is
// index consistent at eps.
inline std::vector<Index> verify_index_consistency(const VoxelField& field,
                                                   const Reconstruction& recon,
                                                   const PiecewisePolynomial& f, const Rat& eps) {
    if (field.dims() != recon.field_hat.dims() || field.d() != recon.field_hat.d())
        throw std::invalid_argument("reconstruction shape does not match the field");
    std::vector<Index> bad;
    for (Index i = 1; i <= field.n(); ++i) {
        Rat gap = rat_abs(f.eval(field.vec(i)) - f.eval(recon.field_hat.vec(i)));
        if (gap > eps) bad.push_back(i);
    }
    return bad;
}

}  // namespace voxbox
