#pragma once

#include "voxbox/boxgeom.hpp"
#include "voxbox/cluster.hpp"
#include "voxbox/codec.hpp"
#include "voxbox/field.hpp"
#include "voxbox/poly.hpp"
#include "voxbox/sweepline.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace voxbox {

// ---------------------------------------------------------------------------
// 0-1 matrices and the rectilinear-image hardness instance.

struct BinaryMatrix {
    Index m = 0;                 // m x m grid
    std::vector<std::uint8_t> cells;  // row-major, 1 = on

    std::uint8_t at(Index row, Index col) const {
        return cells[static_cast<std::size_t>((row - 1) * m + (col - 1))];
    }
    Index nnz() const {
        Index c = 0;
        for (auto v : cells) c += v ? 1 : 0;
        return c;
    }
};

// The 5x5 polyomino-with-hole demonstration matrix (rows bottom to top).
inline BinaryMatrix fig3_matrix() {
    BinaryMatrix M;
    M.m = 5;
    const std::uint8_t rows[5][5] = {
        {0, 0, 1, 1, 0},
        {1, 1, 1, 1, 1},
        {1, 0, 1, 0, 0},
        {1, 1, 1, 1, 1},
        {0, 0, 1, 1, 0},
    };
    for (auto& row : rows)
        for (auto v : row) M.cells.push_back(v);
    return M;
}

struct NpInstance {
    VoxelField field;
    PiecewisePolynomial f;
    Rat eps;
    std::uint64_t K = 0;  // decision threshold on the codeword bit length
};

// Decision-equivalent instance: the matrix becomes a (2,1) field whose
// energies are 1 on the ones and a distinct negative integer -eta(i) on each
// zero, with eta the row-major enumeration eta((j,k)) = m*j + k.  The vectors
// themselves are +eta on ones and -eta on zeros so that the field stays
// injective while f realizes exactly those energies.  K is the
// codeword-length threshold equivalent to a rectangle cover of the ones of
// size K'.
inline NpInstance build_np_instance(const BinaryMatrix& M, std::uint64_t k_prime) {
    if (M.m < 1) throw std::invalid_argument("matrix must be nonempty");
    const Index m = M.m;
    const Index n = m * m;
    if (k_prime > static_cast<std::uint64_t>(n))
        throw std::invalid_argument("K' must not exceed the number of pixels");
    const Index eta_max = m * m + m;

    std::vector<Rat> lo{Rat(-eta_max)}, hi{Rat(eta_max)};
    VoxelField field({m, m}, 1, lo, hi);
    for (Index row = 1; row <= m; ++row)
        for (Index col = 1; col <= m; ++col) {
            Index eta = m * row + col;
            VoxelCoord v;
            v.c = {row, col};
            Rat val = M.at(row, col) ? Rat(eta) : Rat(-eta);
            field.set_vec(field.coord_to_flat(v), std::vector<Rat>{val});
        }

    std::string ub = std::to_string(eta_max);
    PiecewisePolynomial f = PiecewisePolynomial::parse(
        "piece box[1][" + ub + "]:1;piece box[-" + ub + "][-1]:x1", 1);

    Rat eps(1, 10);
    EnergyCache cache = EnergyCache::build(field, f);
    EpsilonStar estar = cache.select_epsilon_star(eps);

    // the widths every minimum cover realizes: summary 1 on the one-region
    // boxes, -eta(i) on the zero singletons
    std::uint64_t v = 0;
    if (M.nnz() > 0) v = std::max(v, magnitude_bits(Int(1)) + magnitude_bits(Int(1)));
    for (Index row = 1; row <= m; ++row)
        for (Index col = 1; col <= m; ++col)
            if (!M.at(row, col))
                v = std::max(v, magnitude_bits(Int(m * row + col)) + magnitude_bits(Int(1)));
    std::uint64_t sn = size_n_bits(2, magnitude_bits(Int(m)));
    std::uint64_t entry = entry_cost_bits(sn, v);
    std::uint64_t header = 5 * wire::kDelimBits + encoded_bits(estar.value) + encoded_bits(eps) +
                           f.size_bits();
    std::uint64_t K =
        (k_prime + static_cast<std::uint64_t>(n - M.nnz())) * entry + header;
    return NpInstance{std::move(field), std::move(f), std::move(eps), K};
}

// ---------------------------------------------------------------------------
// Special-3SC set systems.

struct Special3SC {
    Index n = 0, m = 0;
    struct Triple {
        Index i, j, k;  // 1-based a-indices, i < j < k
    };
    std::vector<Triple> triples;  // one per t in [m]

    // Element ids: a_q -> q-1 for q in [n]; the B chain w_1,x_1,y_1,z_1,
    // w_2,... gets ids n, n+1, ... in chain order.
    Index elements() const { return n + 4 * m; }
    Index a_id(Index q) const { return q - 1; }
    Index w_id(Index t) const { return n + 4 * (t - 1); }
    Index x_id(Index t) const { return n + 4 * (t - 1) + 1; }
    Index y_id(Index t) const { return n + 4 * (t - 1) + 2; }
    Index z_id(Index t) const { return n + 4 * (t - 1) + 3; }

    std::string element_name(Index id) const {
        if (id < n) return "a" + std::to_string(id + 1);
        Index p = id - n;
        const char* kinds = "wxyz";
        return std::string(1, kinds[p % 4]) + std::to_string(p / 4 + 1);
    }

    // The 5m sets in template order, as element-id lists.
    std::vector<std::vector<Index>> sets() const {
        std::vector<std::vector<Index>> out;
        for (Index t = 1; t <= m; ++t) {
            const Triple& tr = triples[static_cast<std::size_t>(t - 1)];
            out.push_back({a_id(tr.i), w_id(t)});
            out.push_back({w_id(t), x_id(t)});
            out.push_back({a_id(tr.j), x_id(t), y_id(t)});
            out.push_back({y_id(t), z_id(t)});
            out.push_back({a_id(tr.k), z_id(t)});
        }
        return out;
    }

    ValidationReport validate() const {
        ValidationReport rep;
        if (2 * n != 3 * m) rep.issues.push_back("2n = 3m violated");
        if (static_cast<Index>(triples.size()) != m) rep.issues.push_back("need one triple per t");
        std::vector<int> uses(static_cast<std::size_t>(n) + 1, 0);
        for (const Triple& tr : triples) {
            if (!(1 <= tr.i && tr.i < tr.j && tr.j < tr.k && tr.k <= n))
                rep.issues.push_back("triple violates 1 <= i < j < k <= n");
            else {
                ++uses[static_cast<std::size_t>(tr.i)];
                ++uses[static_cast<std::size_t>(tr.j)];
                ++uses[static_cast<std::size_t>(tr.k)];
            }
        }
        for (Index q = 1; q <= n; ++q)
            if (uses[static_cast<std::size_t>(q)] != 2)
                rep.issues.push_back("a" + std::to_string(q) + " must belong to exactly two sets");
        return rep;
    }

    void save(std::ostream& os) const {
        os << "S3SC " << n << ' ' << m << '\n';
        for (const auto& s : sets()) {
            for (std::size_t j = 0; j < s.size(); ++j) os << (j ? " " : "") << element_name(s[j]);
            os << '\n';
        }
    }

    static Special3SC load(std::istream& is);
};

inline Special3SC Special3SC::load(std::istream& is) {
    std::string magic;
    Special3SC inst;
    if (!(is >> magic >> inst.n >> inst.m) || magic != "S3SC")
        throw std::runtime_error("malformed .s3sc header");
    auto want = [&](const std::string& tok, char kind, Index t) {
        if (tok != std::string(1, kind) + std::to_string(t))
            throw std::runtime_error("template violation: expected " + std::string(1, kind) +
                                     std::to_string(t) + ", got " + tok);
    };
    auto a_index = [&](const std::string& tok) {
        if (tok.size() < 2 || tok[0] != 'a') throw std::runtime_error("expected a-element: " + tok);
        Index q = std::stoll(tok.substr(1));
        if (q < 1 || q > inst.n) throw std::runtime_error("a-element out of range: " + tok);
        return q;
    };
    std::string t1, t2, t3;
    for (Index t = 1; t <= inst.m; ++t) {
        Triple tr{};
        if (!(is >> t1 >> t2)) throw std::runtime_error("truncated .s3sc");
        tr.i = a_index(t1);
        want(t2, 'w', t);
        if (!(is >> t1 >> t2)) throw std::runtime_error("truncated .s3sc");
        want(t1, 'w', t);
        want(t2, 'x', t);
        if (!(is >> t1 >> t2 >> t3)) throw std::runtime_error("truncated .s3sc");
        tr.j = a_index(t1);
        want(t2, 'x', t);
        want(t3, 'y', t);
        if (!(is >> t1 >> t2)) throw std::runtime_error("truncated .s3sc");
        want(t1, 'y', t);
        want(t2, 'z', t);
        if (!(is >> t1 >> t2)) throw std::runtime_error("truncated .s3sc");
        tr.k = a_index(t1);
        want(t2, 'z', t);
        inst.triples.push_back(tr);
    }
    ValidationReport rep = inst.validate();
    if (!rep.ok()) throw std::runtime_error("invalid Special-3SC instance: " + rep.issues[0]);
    return inst;
}

// Seeded sampler: m even, n = 3m/2; each a-index is dealt into exactly two
// triples with the three slots of a triple distinct.
inline Special3SC gen_special3sc(Index m, std::uint64_t seed) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be even and >= 2");
    Special3SC inst;
    inst.m = m;
    inst.n = 3 * m / 2;
    std::mt19937_64 rng(seed);
    std::vector<Index> deck;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        deck.clear();
        for (Index q = 1; q <= inst.n; ++q) {
            deck.push_back(q);
            deck.push_back(q);
        }
        std::shuffle(deck.begin(), deck.end(), rng);
        inst.triples.clear();
        bool ok = true;
        for (Index t = 0; t < m && ok; ++t) {
            Index a = deck[static_cast<std::size_t>(3 * t)];
            Index b = deck[static_cast<std::size_t>(3 * t + 1)];
            Index c = deck[static_cast<std::size_t>(3 * t + 2)];
            if (a == b || b == c || a == c) {
                ok = false;
                break;
            }
            Special3SC::Triple tr{std::min({a, b, c}), 0, std::max({a, b, c})};
            tr.j = a + b + c - tr.i - tr.k;
            inst.triples.push_back(tr);
        }
        if (ok && inst.validate().ok()) return inst;
    }
    throw std::runtime_error("sampler failed to produce a valid instance");
}

// ---------------------------------------------------------------------------
// The plane embedding Phi: points for U, one rational box per set.

struct PhiEmbedding {
    std::vector<std::vector<Rat>> points;  // indexed by element id
    std::vector<RatBox> boxes;             // indexed by set id (template order)
};

// Coordinates realizing the required orderings: the a-row on y = 1 at x = 2q,
// the B chain at integer heights 2,3,...; each appearance of an a hosts its
// sets' B points in a private lane at x = 2q -/+ 1/2.  Hooks (the boxes that
// contain an a) cross the horizontal connector boxes of their B points and
// the sibling hook of the other appearance; every non-disjoint pair of boxes
// meets at exactly four boundary points.
inline PhiEmbedding phi_embed(const Special3SC& inst) {
    ValidationReport rep = inst.validate();
    if (!rep.ok()) throw std::invalid_argument("template violation: " + rep.issues[0]);

    PhiEmbedding out;
    out.points.resize(static_cast<std::size_t>(inst.elements()));
    out.boxes.resize(static_cast<std::size_t>(5 * inst.m));

    // appearance (0 = first, 1 = second) of each a-index, in set order
    std::map<Index, std::vector<std::pair<Index, int>>> appearances;  // a -> [(t, slot)]
    for (Index t = 1; t <= inst.m; ++t) {
        const auto& tr = inst.triples[static_cast<std::size_t>(t - 1)];
        appearances[tr.i].push_back({t, 0});
        appearances[tr.j].push_back({t, 1});
        appearances[tr.k].push_back({t, 2});
    }

    auto height = [&](Index chain_pos) { return Rat(2 + chain_pos); };  // 0-based position
    auto lane = [&](Index q, int app) {
        return Rat(2 * q) + (app == 0 ? Rat(-1, 2) : Rat(1, 2));
    };
    auto hook_x = [&](Index q, int app) {
        if (app == 0) return std::pair<Rat, Rat>{Rat(2 * q) - Rat(5, 8), Rat(2 * q) + Rat(5, 8)};
        return std::pair<Rat, Rat>{Rat(2 * q) - Rat(1, 16), Rat(2 * q) + Rat(9, 16)};
    };
    auto hook_bottom = [&](int app) { return app == 0 ? Rat(3, 4) : Rat(5, 8); };

    for (Index q = 1; q <= inst.n; ++q)
        out.points[static_cast<std::size_t>(inst.a_id(q))] = {Rat(2 * q), Rat(1)};

    struct Spot {
        Index q;
        int app;
    };
    std::map<Index, Spot> spot_of_b;  // element id of a B element -> hosting lane
    for (Index q = 1; q <= inst.n; ++q) {
        const auto& apps = appearances[q];
        for (int a = 0; a < 2; ++a) {
            auto [t, slot] = apps[static_cast<std::size_t>(a)];
            if (slot == 0) spot_of_b[inst.w_id(t)] = {q, a};
            if (slot == 1) {
                spot_of_b[inst.x_id(t)] = {q, a};
                spot_of_b[inst.y_id(t)] = {q, a};
            }
            if (slot == 2) spot_of_b[inst.z_id(t)] = {q, a};
        }
    }
    for (auto& [id, spot] : spot_of_b)
        out.points[static_cast<std::size_t>(id)] = {lane(spot.q, spot.app),
                                                    height(id - inst.n)};

    auto hook_box = [&](Index q, int app, const Rat& top) {
        auto [xlo, xhi] = hook_x(q, app);
        return RatBox{{xlo, hook_bottom(app)}, {xhi, top}};
    };
    auto long_box = [&](Index left_elem, Index right_elem) {
        const Spot sl = spot_of_b.at(left_elem);
        const Spot sr = spot_of_b.at(right_elem);
        Rat xlo = hook_x(sl.q, sl.app).first - Rat(1, 32);
        Rat xhi = hook_x(sr.q, sr.app).second + Rat(1, 32);
        if (xlo > xhi) std::swap(xlo, xhi);
        Rat ylo = height(left_elem - inst.n) - Rat(1, 4);
        Rat yhi = height(right_elem - inst.n) + Rat(1, 4);
        return RatBox{{xlo, ylo}, {xhi, yhi}};
    };

    for (Index t = 1; t <= inst.m; ++t) {
        std::size_t base = static_cast<std::size_t>(5 * (t - 1));
        const Spot si = spot_of_b.at(inst.w_id(t));
        const Spot sj = spot_of_b.at(inst.x_id(t));
        const Spot sk = spot_of_b.at(inst.z_id(t));
        // hooks rise just above the top of the connector they cross
        out.boxes[base + 0] = hook_box(si.q, si.app, height(inst.x_id(t) - inst.n) + Rat(3, 8));
        out.boxes[base + 1] = long_box(inst.w_id(t), inst.x_id(t));
        out.boxes[base + 2] = hook_box(sj.q, sj.app, height(inst.z_id(t) - inst.n) + Rat(3, 8));
        out.boxes[base + 3] = long_box(inst.y_id(t), inst.z_id(t));
        out.boxes[base + 4] = hook_box(sk.q, sk.app, height(inst.z_id(t) - inst.n) + Rat(3, 8));
    }
    return out;
}

// Pairwise boundary-intersection classification for rational rectangles:
// either no common point, one strictly inside the other, or a proper cross
// meeting at exactly four boundary points.
enum class PairKind { disjoint, nested, cross4, violation };

inline PairKind classify_pair(const RatBox& A, const RatBox& B) {
    auto strictly_disjoint = [](const Rat& alo, const Rat& ahi, const Rat& blo, const Rat& bhi) {
        return ahi < blo || bhi < alo;
    };
    auto strictly_inside = [](const Rat& alo, const Rat& ahi, const Rat& blo, const Rat& bhi) {
        return blo < alo && ahi < bhi;  // [alo,ahi] inside (blo,bhi)
    };
    if (strictly_disjoint(A.lo[0], A.hi[0], B.lo[0], B.hi[0]) ||
        strictly_disjoint(A.lo[1], A.hi[1], B.lo[1], B.hi[1]))
        return PairKind::disjoint;
    bool a_in_b_x = strictly_inside(A.lo[0], A.hi[0], B.lo[0], B.hi[0]);
    bool b_in_a_x = strictly_inside(B.lo[0], B.hi[0], A.lo[0], A.hi[0]);
    bool a_in_b_y = strictly_inside(A.lo[1], A.hi[1], B.lo[1], B.hi[1]);
    bool b_in_a_y = strictly_inside(B.lo[1], B.hi[1], A.lo[1], A.hi[1]);
    if (a_in_b_x && a_in_b_y) return PairKind::nested;
    if (b_in_a_x && b_in_a_y) return PairKind::nested;
    if ((a_in_b_x && b_in_a_y) || (b_in_a_x && a_in_b_y)) return PairKind::cross4;
    return PairKind::violation;
}

// Checks every post-condition of the embedding: exact point/box incidence,
// the a-row and B-chain orderings, the per-a set ordering, and the
// 4-point-or-empty boundary rule.
inline ValidationReport validate_phi_embedding(const Special3SC& inst, const PhiEmbedding& emb) {
    ValidationReport rep;
    auto sets = inst.sets();
    for (std::size_t s = 0; s < sets.size(); ++s) {
        std::set<Index> want(sets[s].begin(), sets[s].end());
        for (Index e = 0; e < inst.elements(); ++e) {
            bool inside = emb.boxes[s].contains(emb.points[static_cast<std::size_t>(e)]);
            if (inside && !want.count(e))
                rep.issues.push_back("box " + std::to_string(s) + " contains stray point " +
                                     inst.element_name(e));
            if (!inside && want.count(e))
                rep.issues.push_back("box " + std::to_string(s) + " misses its point " +
                                     inst.element_name(e));
        }
    }
    for (Index q = 1; q <= inst.n; ++q) {
        const auto& p = emb.points[static_cast<std::size_t>(inst.a_id(q))];
        if (p[1] != 1) rep.issues.push_back("a-row must sit at height 1");
        if (q > 1 && !(emb.points[static_cast<std::size_t>(inst.a_id(q - 1))][0] < p[0]))
            rep.issues.push_back("a-row must be strictly ordered in x");
    }
    for (Index p = 1; p < 4 * inst.m; ++p)
        if (!(emb.points[static_cast<std::size_t>(inst.n + p - 1)][1] <
              emb.points[static_cast<std::size_t>(inst.n + p)][1]))
            rep.issues.push_back("B chain must be strictly ordered in y");
    // per-a ordering of the two sets' non-a elements
    std::map<Index, std::vector<std::size_t>> sets_of_a;
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (Index e : sets[s])
            if (e < inst.n) sets_of_a[e].push_back(s);
    for (auto& [a, ss] : sets_of_a) {
        if (ss.size() != 2) continue;  // already reported by validate()
        Rat max_first(-1), min_second(-1);
        bool first_set = true;
        for (Index e : sets[ss[0]])
            if (e >= inst.n) {
                const Rat& y = emb.points[static_cast<std::size_t>(e)][1];
                if (first_set || y > max_first) max_first = y;
                first_set = false;
            }
        bool second_set = true;
        for (Index e : sets[ss[1]])
            if (e >= inst.n) {
                const Rat& y = emb.points[static_cast<std::size_t>(e)][1];
                if (second_set || y < min_second) min_second = y;
                second_set = false;
            }
        if (!(max_first < min_second))
            rep.issues.push_back("set ordering around " + inst.element_name(a) + " violated");
    }
    for (std::size_t s = 0; s + 1 < emb.boxes.size(); ++s)
        for (std::size_t u = s + 1; u < emb.boxes.size(); ++u) {
            PairKind kind = classify_pair(emb.boxes[s], emb.boxes[u]);
            if (kind == PairKind::violation || kind == PairKind::nested)
                rep.issues.push_back("boxes " + std::to_string(s) + " and " + std::to_string(u) +
                                     " violate the 4-point boundary rule");
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Voxel-grid instances: embedded boxes plus the sweep-line complement cover.

struct VGridInstance {
    Index q = 0;                       // grid [q]^2
    std::vector<Box> boxes;            // R'' followed by H(R'')
    std::vector<std::uint8_t> is_complement;  // provenance tag per box

    std::size_t r_count() const {
        std::size_t c = 0;
        for (auto t : is_complement) c += t ? 0 : 1;
        return c;
    }
    std::size_t h_count() const { return boxes.size() - r_count(); }
};

inline VGridInstance build_vgrid_instance(const PhiEmbedding& emb) {
    BoxEmbedding be = embed_boxes(emb.boxes);
    VGridInstance inst;
    inst.q = be.space.q;  // [2N]^2 with N = |R|
    RangeSpace rs;
    rs.k = 2;
    rs.q = inst.q;
    rs.boxes = be.space.boxes;
    std::vector<Box> H = cover_complement(rs);
    inst.boxes = be.space.boxes;
    inst.is_complement.assign(inst.boxes.size(), 0);
    for (const Box& h : H) {
        inst.boxes.push_back(h);
        inst.is_complement.push_back(1);
    }
    return inst;
}

// Approximation-factor map of the grid-embedding step: an approximation
// within 1 + alpha(eps) of the grid cover optimum recovers a 1 + eps
// approximation of the plane instance (the compression step's factor map is
// the identity).
inline Rat ptas_alpha(const Rat& eps) { return eps / 13; }

// The solution-recovery map g: drop the complement-tagged boxes, keeping the
// original set ids of the rest.
inline std::vector<std::size_t> extract_solution(const VGridInstance& inst,
                                                 std::span<const std::size_t> cover) {
    std::vector<std::size_t> out;
    for (std::size_t idx : cover) {
        if (idx >= inst.boxes.size()) throw std::out_of_range("cover index out of range");
        if (!inst.is_complement[idx]) out.push_back(idx);
    }
    return out;
}

// True iff |cover| >= |R''|/3 + |H*|, with H* = H(R'') its own minimal
// subcover.  The cover must be feasible for [q]^2.
inline bool check_lower_bound(const VGridInstance& inst, std::span<const std::size_t> cover) {
    std::vector<char> hit(static_cast<std::size_t>(inst.q * inst.q), 0);
    for (std::size_t idx : cover) {
        if (idx >= inst.boxes.size()) throw std::out_of_range("cover index out of range");
        for (const VoxelCoord& v : box_points(inst.boxes[idx]))
            hit[static_cast<std::size_t>((v.c[0] - 1) * inst.q + (v.c[1] - 1))] = 1;
    }
    for (char h : hit)
        if (!h) throw std::invalid_argument("infeasible cover: grid voxel left uncovered");
    // |cover| >= r/3 + h  <=>  3|cover| >= r + 3h, exactly
    return 3 * cover.size() >= inst.r_count() + 3 * inst.h_count();
}

struct ApxInstance {
    VoxelField field;
    PiecewisePolynomial f;
    Rat eps;
};

// The (2,2) compression instance of a voxel-grid cover problem: the field is
// the identity embedding of [q]^2 and f takes value 0 on the union of
// mutually intersecting boxes and a distinct positive integer on each
// remaining (pairwise disjoint) box.  Region gaps of at least 1 against
// eps = 1/10 pin the optimal cover.
inline ApxInstance build_apx_instance(const VGridInstance& inst) {
    const Index q = inst.q;
    VoxelField field({q, q}, 2, {Rat(1), Rat(1)}, {Rat(q), Rat(q)});
    for (Index a = 1; a <= q; ++a)
        for (Index b = 1; b <= q; ++b) {
            VoxelCoord v;
            v.c = {a, b};
            field.set_vec(field.coord_to_flat(v), std::vector<Rat>{Rat(a), Rat(b)});
        }

    std::vector<std::size_t> solo;
    for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
        bool intersecting = false;
        for (std::size_t j = 0; j < inst.boxes.size(); ++j)
            if (i != j && boxes_intersect(inst.boxes[i], inst.boxes[j])) {
                intersecting = true;
                break;
            }
        if (!intersecting) solo.push_back(i);
    }
    std::string src;
    int next_val = 1;
    for (std::size_t idx : solo) {
        const Box& b = inst.boxes[idx];
        if (!src.empty()) src += ';';
        src += "piece box[" + std::to_string(b.c1.c[0]) + ',' + std::to_string(b.c1.c[1]) + "][" +
               std::to_string(b.c2.c[0]) + ',' + std::to_string(b.c2.c[1]) +
               "]:" + std::to_string(next_val++);
    }
    if (src.empty()) src = "0";
    else src += ";piece else:0";
    return ApxInstance{std::move(field), PiecewisePolynomial::parse(src, 2), Rat(1, 10)};
}

}  // namespace voxbox
