#include "voxbox/sweepline.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace voxbox;

static VoxelCoord vc(std::initializer_list<Index> c) {
    VoxelCoord v;
    v.c = c;
    return v;
}

static Box mk(Index x1, Index y1, Index x2, Index y2) {
    return Box(vc({x1, y1}), vc({x2, y2}));
}

TEST_CASE("interval tree operations") {
    IntervalTree t;
    t.insert(1, 4);
    auto q = t.query_contained(0, 5);
    REQUIRE(q.size() == 1);
    CHECK(q[0].lo == 1);
    CHECK(q[0].hi == 4);

    IntervalTree t2;
    t2.insert(1, 2);
    t2.insert(4, 6);
    auto q2 = t2.query_contained(1, 3);
    REQUIRE(q2.size() == 1);
    CHECK(q2[0].lo == 1);
    CHECK(q2[0].hi == 2);

    // deleting an absent interval is a no-op
    std::size_t before = t2.size();
    CHECK_FALSE(t2.erase(7, 9));
    CHECK(t2.size() == before);
    CHECK(t2.erase(4, 6));
    CHECK(t2.size() == before - 1);

    CHECK_THROWS_AS(t.insert(4, 1), std::invalid_argument);
}

TEST_CASE("adjacent neighbors") {
    using IV = std::pair<Index, Index>;
    SECTION("gaps bounded by the grid") {
        std::vector<IV> xs{{3, 4}};
        auto gaps = adjacent_neighbors({3, 4}, xs, 6);
        REQUIRE(gaps.left.has_value());
        REQUIRE(gaps.right.has_value());
        CHECK(*gaps.left == IV{1, 2});
        CHECK(*gaps.right == IV{5, 6});
    }
    SECTION("flush against the grid edge") {
        std::vector<IV> xs{{1, 2}};
        auto gaps = adjacent_neighbors({1, 2}, xs, 6);
        CHECK_FALSE(gaps.left.has_value());
        REQUIRE(gaps.right.has_value());
        CHECK(*gaps.right == IV{3, 6});
    }
    SECTION("abutting neighbour leaves no gap") {
        std::vector<IV> xs{{2, 3}, {4, 5}};
        auto gaps = adjacent_neighbors({2, 3}, xs, 6);
        REQUIRE(gaps.left.has_value());
        CHECK(*gaps.left == IV{1, 1});
        CHECK_FALSE(gaps.right.has_value());
    }
}

TEST_CASE("cover_complement examples") {
    SECTION("single centered box yields four strips") {
        RangeSpace rs;
        rs.k = 2;
        rs.q = 4;
        rs.boxes = {mk(2, 2, 3, 3)};
        auto H = cover_complement(rs);
        REQUIRE(H.size() == 4);
        std::set<Box> got(H.begin(), H.end());
        std::set<Box> want{mk(1, 1, 4, 1), mk(1, 2, 1, 3), mk(4, 2, 4, 3), mk(1, 4, 4, 4)};
        CHECK(got == want);
    }
    SECTION("a tiling leaves nothing to cover") {
        RangeSpace rs;
        rs.k = 2;
        rs.q = 3;
        rs.boxes = {mk(1, 1, 3, 1), mk(1, 2, 3, 3)};
        CHECK(cover_complement(rs).empty());
    }
    SECTION("no boxes: the whole grid is one box") {
        RangeSpace rs;
        rs.k = 2;
        rs.q = 3;
        auto H = cover_complement(rs);
        REQUIRE(H.size() == 1);
        CHECK(H[0] == mk(1, 1, 3, 3));
    }
    SECTION("out-of-grid boxes are rejected") {
        RangeSpace rs;
        rs.k = 2;
        rs.q = 3;
        rs.boxes = {mk(1, 1, 4, 2)};
        CHECK_THROWS_AS(cover_complement(rs), std::invalid_argument);
    }
    SECTION("only two-dimensional grids are supported") {
        RangeSpace rs;
        rs.k = 3;
        rs.q = 3;
        CHECK_THROWS_AS(cover_complement(rs), std::invalid_argument);
    }
}

TEST_CASE("sweep against the pixel oracle", "[property]") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        Index q = 2 + static_cast<Index>(rng() % 31);
        int n = 1 + static_cast<int>(rng() % 12);
        RangeSpace rs;
        rs.k = 2;
        rs.q = q;
        for (int i = 0; i < n; ++i) {
            Index x1 = 1 + static_cast<Index>(rng() % q), x2 = 1 + static_cast<Index>(rng() % q);
            Index y1 = 1 + static_cast<Index>(rng() % q), y2 = 1 + static_cast<Index>(rng() % q);
            if (x1 > x2) std::swap(x1, x2);
            if (y1 > y2) std::swap(y1, y2);
            rs.boxes.push_back(mk(x1, y1, x2, y2));
        }
        auto H = cover_complement(rs);

        // soundness + completeness, pixel by pixel
        auto complement = oracle::rasterize_complement(rs.boxes, q);
        std::vector<char> got(complement.size(), 0);
        for (const Box& b : H)
            for (const VoxelCoord& v : box_points(b)) {
                std::size_t at = static_cast<std::size_t>((v.c[0] - 1) * q + (v.c[1] - 1));
                REQUIRE(complement[at]);  // inside C
                REQUIRE_FALSE(got[at]);   // pairwise disjoint
                got[at] = 1;
            }
        for (std::size_t i = 0; i < complement.size(); ++i)
            if (complement[i]) REQUIRE(got[i]);

        REQUIRE(H.size() <= static_cast<std::size_t>(4 * n));
    }
}
