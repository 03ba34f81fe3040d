#include "voxbox/boxgeom.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace voxbox;

static VoxelCoord vc(std::initializer_list<Index> c) {
    VoxelCoord v;
    v.c = c;
    return v;
}

static Box mk(std::initializer_list<Index> a, std::initializer_list<Index> b) {
    return Box(vc(a), vc(b));
}

TEST_CASE("bounding boxes") {
    std::vector<VoxelCoord> single{vc({1, 1})};
    CHECK(bounding_box(single) == mk({1, 1}, {1, 1}));

    std::vector<VoxelCoord> two{vc({1, 3}), vc({2, 1})};
    CHECK(bounding_box(two) == mk({1, 1}, {2, 3}));

    std::vector<VoxelCoord> square{vc({1, 1}), vc({2, 2}), vc({1, 2}), vc({2, 1})};
    Box bb = bounding_box(square);
    CHECK(bb == mk({1, 1}, {2, 2}));
    CHECK(box_points(bb).size() == square.size());  // the set is its own bounding box

    CHECK_THROWS_AS(bounding_box(std::span<const VoxelCoord>{}), std::invalid_argument);
}

TEST_CASE("corner census matches the witness definition", "[property]") {
    // every box has exactly 2^dim convex corners, and BB(c1,c2) recovers it
    for (Index x1 = 1; x1 <= 3; ++x1)
        for (Index x2 = x1; x2 <= 3; ++x2)
            for (Index y1 = 1; y1 <= 3; ++y1)
                for (Index y2 = y1; y2 <= 3; ++y2) {
                    Box b = mk({x1, y1}, {x2, y2});
                    auto witness = oracle::convex_corners_witness(b);
                    CHECK(witness.size() == (1u << b.dim()));
                    auto geo = box_corners(b);
                    CHECK(std::set<VoxelCoord>(witness.begin(), witness.end()) ==
                          std::set<VoxelCoord>(geo.begin(), geo.end()));
                    std::vector<VoxelCoord> two{b.c1, b.c2};
                    CHECK(bounding_box(two) == b);
                }
}

TEST_CASE("interval embedding") {
    using P = std::pair<Rat, Rat>;
    std::vector<P> two{{Rat(1, 2), Rat(27, 10)}, {Rat(11, 10), Rat(39, 10)}};
    auto [emb, img] = embed_intervals(two);
    CHECK(img == std::vector<std::pair<Index, Index>>{{1, 3}, {2, 4}});

    std::vector<P> one{{Rat(5), Rat(9)}};
    auto [emb1, img1] = embed_intervals(one);
    CHECK(img1 == std::vector<std::pair<Index, Index>>{{1, 2}});

    std::vector<P> shared{{Rat(0), Rat(1)}, {Rat(1), Rat(2)}};
    auto [emb2, img2] = embed_intervals(shared);
    CHECK(img2 == std::vector<std::pair<Index, Index>>{{1, 2}, {2, 3}});

    // a degenerate interval contributes a single breakpoint
    std::vector<P> degen{{Rat(3), Rat(3)}, {Rat(5), Rat(7)}};
    auto [emb3, img3] = embed_intervals(degen);
    CHECK(img3 == std::vector<std::pair<Index, Index>>{{1, 1}, {2, 3}});
}

TEST_CASE("box collection embedding") {
    SECTION("disjoint squares stay disjoint") {
        std::vector<RatBox> boxes{{{Rat(0), Rat(0)}, {Rat(1), Rat(1)}},
                                  {{Rat(5), Rat(5)}, {Rat(6), Rat(6)}}};
        auto be = embed_boxes(boxes);
        CHECK(be.space.q == 4);
        CHECK_FALSE(boxes_intersect(be.space.boxes[0], be.space.boxes[1]));
        for (const Box& b : be.space.boxes)
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(b.c1.c[j] >= 1);
                CHECK(b.c2.c[j] <= 4);
            }
    }
    SECTION("4-point boundary crossings survive") {
        // A wide and short, B narrow and tall
        std::vector<RatBox> boxes{{{Rat(0), Rat(1)}, {Rat(10), Rat(2)}},
                                  {{Rat(4), Rat(0)}, {Rat(5), Rat(3)}}};
        auto be = embed_boxes(boxes);
        const Box& A = be.space.boxes[0];
        const Box& B = be.space.boxes[1];
        CHECK(boxes_intersect(A, B));
        // neither contains the other: the per-axis strict orders survive
        CHECK(A.c1.c[0] < B.c1.c[0]);
        CHECK(B.c2.c[0] < A.c2.c[0]);
        CHECK(B.c1.c[1] < A.c1.c[1]);
        CHECK(A.c2.c[1] < B.c2.c[1]);
    }
    SECTION("containment is preserved") {
        std::vector<RatBox> boxes{{{Rat(0), Rat(0)}, {Rat(10), Rat(10)}},
                                  {{Rat(2), Rat(2)}, {Rat(3), Rat(3)}}};
        auto be = embed_boxes(boxes);
        const Box& outer = be.space.boxes[0];
        const Box& inner = be.space.boxes[1];
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(outer.c1.c[j] < inner.c1.c[j]);
            CHECK(inner.c2.c[j] < outer.c2.c[j]);
        }
    }
}

TEST_CASE("embedding preserves per-axis endpoint order", "[property]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        unsigned k = 1 + rng() % 3;
        int n = 1 + static_cast<int>(rng() % 8);
        std::vector<RatBox> boxes;
        for (int i = 0; i < n; ++i) {
            RatBox b;
            for (unsigned j = 0; j < k; ++j) {
                Rat a(static_cast<std::int64_t>(rng() % 200) - 100, 1 + rng() % 7);
                Rat c(static_cast<std::int64_t>(rng() % 200) - 100, 1 + rng() % 7);
                if (a > c) std::swap(a, c);
                b.lo.push_back(a);
                b.hi.push_back(c);
            }
            boxes.push_back(std::move(b));
        }
        auto be = embed_boxes(boxes);
        for (unsigned j = 0; j < k; ++j) {
            auto ends = [&](std::size_t i) {
                return std::pair{std::pair{boxes[i].lo[j], be.space.boxes[i].c1.c[j]},
                                 std::pair{boxes[i].hi[j], be.space.boxes[i].c2.c[j]}};
            };
            for (std::size_t a = 0; a < boxes.size(); ++a)
                for (std::size_t b = 0; b < boxes.size(); ++b) {
                    auto [a1, a2] = ends(a);
                    auto [b1, b2] = ends(b);
                    for (auto& lhs : {a1, a2})
                        for (auto& rhs : {b1, b2}) {
                            if (lhs.first < rhs.first) CHECK(lhs.second < rhs.second);
                            if (lhs.first == rhs.first) CHECK(lhs.second == rhs.second);
                        }
                    CHECK(be.space.boxes[a].c2.c[j] <= 2 * static_cast<Index>(boxes.size()));
                    CHECK(be.space.boxes[a].c1.c[j] >= 1);
                }
        }
    }
}

TEST_CASE("maximal corner subcover") {
    SECTION("disjoint boxes are kept") {
        std::vector<Box> boxes{mk({1, 1}, {2, 2}), mk({4, 4}, {5, 5})};
        CHECK(maximal_corner_subcover(boxes).size() == 2);
    }
    SECTION("a strictly nested box is dropped") {
        std::vector<Box> boxes{mk({1, 1}, {5, 5}), mk({2, 2}, {3, 3})};
        auto kept = maximal_corner_subcover(boxes);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0] == mk({1, 1}, {5, 5}));
    }
    SECTION("crossing boxes are both kept") {
        std::vector<Box> boxes{mk({1, 3}, {9, 4}), mk({4, 1}, {5, 7})};
        CHECK(maximal_corner_subcover(boxes).size() == 2);
    }
    SECTION("output covers the union and matches the brute-force optimum") {
        std::vector<Box> boxes{mk({1, 3}, {9, 4}), mk({4, 1}, {5, 7}), mk({2, 3}, {3, 4})};
        auto kept = maximal_corner_subcover(boxes);
        // pixel check: kept boxes cover exactly the union
        std::set<VoxelCoord> want, got;
        for (const Box& b : boxes)
            for (const VoxelCoord& v : box_points(b)) want.insert(v);
        for (const Box& b : kept)
            for (const VoxelCoord& v : box_points(b)) got.insert(v);
        CHECK(want == got);
        // brute force: no smaller rectangle cover of the union exists
        Index rows = 9, cols = 7;
        std::vector<char> cells(static_cast<std::size_t>(rows * cols), 0);
        for (const VoxelCoord& v : want)
            cells[static_cast<std::size_t>((v.c[0] - 1) * cols + (v.c[1] - 1))] = 1;
        CHECK(oracle::min_rect_cover(cells, rows, cols) == kept.size());
    }
}

TEST_CASE("range space text roundtrip") {
    RangeSpace rs;
    rs.k = 2;
    rs.q = 8;
    rs.boxes = {mk({1, 1}, {3, 3}), mk({2, 5}, {8, 8})};
    std::stringstream ss;
    rs.save(ss);
    RangeSpace back = RangeSpace::load(ss);
    CHECK(back.k == rs.k);
    CHECK(back.q == rs.q);
    CHECK(back.boxes == rs.boxes);
}
