#include "voxbox/engine.hpp"

#include "oracles.hpp"
#include "test_support.hpp"
#include "voxbox/reductions.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace voxbox;

static VoxelCoord vc(std::initializer_list<Index> c) {
    VoxelCoord v;
    v.c = c;
    return v;
}

static VoxelField field_1d(std::vector<Rat> vals) {
    VoxelField f({static_cast<Index>(vals.size())}, 1, {Rat(-1000)}, {Rat(1000)});
    for (Index i = 1; i <= f.n(); ++i) f.set_vec(i, std::vector<Rat>{vals[i - 1]});
    return f;
}

TEST_CASE("greedy on a constant-energy field emits one box") {
    VoxelField f({3, 4}, 1, {Rat(0)}, {Rat(100)});
    for (Index i = 1; i <= f.n(); ++i) f.set_vec(i, std::vector<Rat>{Rat(i)});
    // f(x) = 0*x1 would lose injectivity of energies; use a piece constant
    auto poly = PiecewisePolynomial::parse("piece box[0][100]:5;piece else:0", 1);
    auto res = compress_greedy(f, poly, Rat(1, 10));
    CHECK(res.stats.entries == 1);
    CHECK(res.payload.entries[0].box == Box(vc({1, 1}), vc({3, 4})));
    CHECK(res.payload.entries[0].summary == Rat(5));
}

TEST_CASE("greedy isolates the zeros of a hardness instance") {
    BinaryMatrix M = fig3_matrix();
    NpInstance np = build_np_instance(M, 1);
    auto res = compress_greedy(np.field, np.f, np.eps);
    // every zero voxel is its own box; the ones need at least the
    // brute-force minimum rectangle cover
    std::size_t singles = 0, onesboxes = 0;
    EnergyCache cache = EnergyCache::build(np.field, np.f);
    for (const auto& e : res.payload.entries) {
        Index i = np.field.coord_to_flat(e.box.c1);
        if (cache.value(i) == Rat(1)) ++onesboxes;
        else {
            ++singles;
            CHECK(e.box.volume() == 1);
        }
    }
    CHECK(singles == static_cast<std::size_t>(np.field.n() - M.nnz()));
    std::vector<char> ones(M.cells.begin(), M.cells.end());
    CHECK(onesboxes >= oracle::min_rect_cover(ones, M.m, M.m));
    // every emitted box is feasible at 2*eps (and a fortiori at 2*eps*)
    for (const auto& e : res.payload.entries) {
        std::vector<Index> mem;
        for (const VoxelCoord& v : box_points(e.box)) mem.push_back(np.field.coord_to_flat(v));
        CHECK(cache.cluster_feasible(mem, 2 * np.eps));
    }
}

TEST_CASE("greedy on an energy staircase emits width <= 2 boxes") {
    // steps of exactly 2*eps*: with eps = 3/40, distances {1/10, 2/10, ...}
    // give D(X,f,2eps) = 1/10, so 2*eps* = 1/10 and triples are infeasible
    std::vector<Rat> vals;
    for (int i = 0; i < 9; ++i) vals.emplace_back(Rat(i, 10));
    VoxelField f = field_1d(vals);
    auto poly = PiecewisePolynomial::parse("x1", 1);
    auto res = compress_greedy(f, poly, Rat(3, 40));
    CHECK(res.stats.eps_star == Rat(1, 20));
    for (const auto& e : res.payload.entries) CHECK(e.box.volume() <= 2);
}

TEST_CASE("exact compression matches hand-counted optima") {
    SECTION("2x2 constant field") {
        VoxelField f({2, 2}, 1, {Rat(0)}, {Rat(10)});
        for (Index i = 1; i <= 4; ++i) f.set_vec(i, std::vector<Rat>{Rat(i)});
        auto poly = PiecewisePolynomial::parse("piece box[0][10]:1;piece else:0", 1);
        auto res = compress_exact(f, poly, Rat(1, 10), 16);
        CHECK(res.stats.entries == 1);
    }
    SECTION("strip with one outlier needs two boxes") {
        VoxelField f = field_1d({Rat(1), Rat(101, 100), Rat(102, 100), Rat(50)});
        auto poly = PiecewisePolynomial::parse("x1", 1);
        auto res = compress_exact(f, poly, Rat(1, 10), 16);
        CHECK(res.stats.entries == 2);
    }
    SECTION("2x2 with one outlier: the L-shaped rest still takes two boxes") {
        VoxelField f({2, 2}, 1, {Rat(-100)}, {Rat(100)});
        f.set_vec(1, std::vector<Rat>{Rat(1)});
        f.set_vec(2, std::vector<Rat>{Rat(101, 100)});
        f.set_vec(3, std::vector<Rat>{Rat(102, 100)});
        f.set_vec(4, std::vector<Rat>{Rat(50)});
        auto poly = PiecewisePolynomial::parse("x1", 1);
        auto res = compress_exact(f, poly, Rat(1, 10), 16);
        CHECK(res.stats.entries == 3);  // no box covers three cells of a 2x2
    }
    SECTION("budget guard") {
        VoxelField f({2, 2}, 1, {Rat(0)}, {Rat(10)});
        for (Index i = 1; i <= 4; ++i) f.set_vec(i, std::vector<Rat>{Rat(i)});
        auto poly = PiecewisePolynomial::parse("x1", 1);
        CHECK_THROWS_AS(compress_exact(f, poly, Rat(1, 10), 3), std::invalid_argument);
    }
}

TEST_CASE("exact never beats the oracle and greedy never beats exact", "[property]") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 25; ++trial) {
        VoxelField f({3, 3}, 1, {Rat(-100)}, {Rat(100)});
        std::set<std::vector<Rat>> used;
        for (Index i = 1; i <= 9; ++i) {
            std::vector<Rat> v;
            do {
                v = {Rat(static_cast<std::int64_t>(rng() % 60), 10)};
            } while (!used.insert(v).second);
            f.set_vec(i, v);
        }
        auto poly = PiecewisePolynomial::parse("x1", 1);
        Rat eps(1 + static_cast<std::int64_t>(rng() % 30), 100);
        auto exact = compress_exact(f, poly, eps, 16);
        auto greedy = compress_greedy(f, poly, eps);
        EnergyCache cache = EnergyCache::build(f, poly);
        EpsilonStar es = cache.select_epsilon_star(eps);
        std::size_t best = oracle::min_feasible_cover_enum(f, cache, 2 * es.value);
        CHECK(exact.stats.entries == best);
        CHECK(exact.stats.entries <= greedy.stats.entries);
    }
}

TEST_CASE("epsilon monotonicity of the exact cover size", "[property]") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        VoxelField f({2, 3}, 1, {Rat(-100)}, {Rat(100)});
        std::set<std::vector<Rat>> used;
        for (Index i = 1; i <= 6; ++i) {
            std::vector<Rat> v;
            do {
                v = {Rat(static_cast<std::int64_t>(rng() % 40), 10)};
            } while (!used.insert(v).second);
            f.set_vec(i, v);
        }
        auto poly = PiecewisePolynomial::parse("x1", 1);
        std::size_t prev = SIZE_MAX;
        for (int e = 1; e <= 9; e += 2) {
            auto res = compress_exact(f, poly, Rat(e, 10), 16);
            CHECK(res.stats.entries <= prev);
            prev = res.stats.entries;
        }
    }
}

TEST_CASE("decompression") {
    SECTION("constant pieces reconstruct exactly") {
        VoxelField f({2, 2}, 1, {Rat(0)}, {Rat(10)});
        for (Index i = 1; i <= 4; ++i) f.set_vec(i, std::vector<Rat>{Rat(i)});
        auto poly = PiecewisePolynomial::parse("piece box[0][10]:7;piece else:0", 1);
        auto res = compress_greedy(f, poly, Rat(1, 10));
        auto rec = decompress(res.codeword);
        CHECK(verify_index_consistency(f, rec, poly, Rat(1, 10)).empty());
        // representative sits on the constant piece
        CHECK(poly.eval(rec.field_hat.vec(1)) == Rat(7));
    }
    SECTION("bisection solves f(x)=x^2 near 4") {
        BoxCoverSummaries p;
        p.entries.push_back(BoxSummary{Box(vc({1}), vc({1})), Rat(4)});
        p.eps_star = Rat(1, 10);
        p.eps = Rat(2, 10);  // delta = 1/10
        p.f = PiecewisePolynomial::parse("x1*x1", 1);
        auto rec = decompress(serialize(p));
        Rat v = rec.field_hat.vec(1)[0];
        CHECK(v * v >= Rat(39, 10));
        CHECK(v * v <= Rat(41, 10));
    }
    SECTION("unreachable summaries fail honestly") {
        BoxCoverSummaries p;
        p.entries.push_back(BoxSummary{Box(vc({1}), vc({1})), Rat(10)});
        p.eps_star = Rat(1, 100);
        p.eps = Rat(2, 100);
        p.f = PiecewisePolynomial::parse("piece box[0][1]:0;piece else:0", 1);
        CHECK_THROWS_AS(decompress(serialize(p)), SolverFailure);
    }
}

TEST_CASE("verify_index_consistency") {
    VoxelField f({2}, 1, {Rat(0)}, {Rat(10)});
    f.set_vec(1, std::vector<Rat>{Rat(1)});
    f.set_vec(2, std::vector<Rat>{Rat(2)});
    auto poly = PiecewisePolynomial::parse("x1", 1);

    Reconstruction same{f};
    CHECK(verify_index_consistency(f, same, poly, Rat(1, 10)).empty());

    VoxelField g = f;
    g.set_vec(2, std::vector<Rat>{Rat(2) + Rat(2, 10)});
    Reconstruction moved{g};
    CHECK(verify_index_consistency(f, moved, poly, Rat(1, 10)) == std::vector<Index>{2});

    VoxelField wrong({3}, 1, {Rat(0)}, {Rat(10)});
    Reconstruction bad{wrong};
    CHECK_THROWS_AS(verify_index_consistency(f, bad, poly, Rat(1, 10)),
                    std::invalid_argument);
}

TEST_CASE("pipeline is index consistent end to end", "[property]") {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        gen::Instance inst = gen::random_instance(rng, 60);
        auto res = compress_greedy(inst.field, inst.f, inst.eps);
        // emitted covers honor the summary bound voxel by voxel
        CHECK(summary_violations(res.payload, inst.field).empty());
        save_vbx(res.codeword, "test_engine_tmp.vbx");
        Codeword wireback = load_vbx("test_engine_tmp.vbx");
        auto rec = decompress(wireback);
        auto bad = verify_index_consistency(inst.field, rec, inst.f, inst.eps);
        CHECK(bad.empty());
    }
    std::remove("test_engine_tmp.vbx");
}

TEST_CASE("thread count does not change the result") {
    std::mt19937_64 rng(606);
    gen::Instance inst = gen::random_instance(rng, 80);
    auto a = compress_greedy(inst.field, inst.f, inst.eps, 1);
    auto b = compress_greedy(inst.field, inst.f, inst.eps, 4);
    CHECK(a.codeword == b.codeword);
}
