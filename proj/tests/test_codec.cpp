#include "voxbox/codec.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <map>
#include <random>

using namespace voxbox;

static VoxelCoord vc(std::initializer_list<Index> c) {
    VoxelCoord v;
    v.c = c;
    return v;
}

static std::string bit_string(const Codeword& cw) {
    std::string s;
    for (std::uint64_t i = 0; i < cw.bit_length; ++i)
        s += (cw.bytes[i / 8] >> (7 - i % 8) & 1u) ? '1' : '0';
    return s;
}

static BoxCoverSummaries tiny_payload() {
    BoxCoverSummaries p;
    p.entries.push_back(BoxSummary{Box(vc({1}), vc({1})), Rat(1)});
    p.eps_star = Rat(0);
    p.eps = Rat(1, 2);
    p.f = PiecewisePolynomial::parse("x1", 1);
    return p;
}

TEST_CASE("encode_box returns the two opposing corners") {
    Box pointbox(vc({1, 1}), vc({1, 1}));
    auto [a, b] = encode_box(pointbox);
    CHECK(a == vc({1, 1}));
    CHECK(b == vc({1, 1}));
    Box wide(vc({1, 2}), vc({3, 4}));
    auto [c, d] = encode_box(wide);
    CHECK(c == vc({1, 2}));
    CHECK(d == vc({3, 4}));
    // BB(encode_box(b)) = b
    std::vector<VoxelCoord> corners{c, d};
    CHECK(bounding_box(corners) == wide);
}

TEST_CASE("number records on the wire") {
    // number 1 = +1/1: sign 00, digit 01, separator 10, digit 01, term 11
    wire::BitWriter w;
    wire::put_number(w, Rat(1), 1, 1);
    Codeword cw = std::move(w).finish();
    CHECK(bit_string(cw) == "0001100111");
    CHECK(cw.bit_length == encoded_bits(Rat(1)));

    // -3/2: sign 01, digits 01 01, sep, digits 01 00, term
    wire::BitWriter w2;
    wire::put_number(w2, Rat(-3, 2), 2, 2);
    Codeword cw2 = std::move(w2).finish();
    CHECK(bit_string(cw2) == "01" "0101" "10" "0100" "11");
    CHECK(cw2.bit_length == encoded_bits(Rat(-3, 2)));

    wire::BitReader r(cw2);
    CHECK(wire::get_number(r).value == Rat(-3, 2));
}

TEST_CASE("codeword structure of a one-entry payload") {
    auto p = tiny_payload();
    Codeword cw = serialize(p);
    std::string bits = bit_string(cw);
    // outer open, then the entry tuple
    CHECK(bits.substr(0, 2) == "01");
    CHECK(bits.substr(2, 2) == "01");   // entry open
    CHECK(bits.substr(4, 2) == "01");   // Encode(R) open
    CHECK(bits.substr(6, 2) == "01");   // corner tuple open
    // f text is byte-aligned at the tail before the final close
    CHECK(bits.substr(bits.size() - 2) == "10");
    std::string ftail = bits.substr(bits.size() - 2 - 8 * p.f.length(), 8 * p.f.length());
    std::string expect;
    for (char ch : p.f.source())
        for (int i = 7; i >= 0; --i) expect += (ch >> i & 1) ? '1' : '0';
    CHECK(ftail == expect);
}

TEST_CASE("size formula is exact") {
    auto p = tiny_payload();
    CHECK(serialize(p).bit_length == size_formula(p));

    // empty cover: 5r + size(eps*) + size(eps) + size(f)
    BoxCoverSummaries empty;
    empty.eps_star = Rat(1, 100);
    empty.eps = Rat(1, 10);
    empty.f = PiecewisePolynomial::parse("x1", 1);
    CHECK(serialize(empty).bit_length ==
          10 + encoded_bits(empty.eps_star) + encoded_bits(empty.eps) + empty.f.size_bits());

    // covers of the same [4] grid with the same summary value share the
    // padded widths, so entry count is the only varying term
    auto strip_cover = [&](std::vector<std::pair<Index, Index>> spans) {
        BoxCoverSummaries p = empty;
        for (auto [a, b] : spans)
            p.entries.push_back(BoxSummary{Box(vc({a}), vc({b})), Rat(1)});
        return p;
    };
    BoxCoverSummaries one = strip_cover({{1, 4}});
    BoxCoverSummaries two = strip_cover({{1, 2}, {3, 4}});
    BoxCoverSummaries three = strip_cover({{1, 2}, {3, 3}, {4, 4}});
    BoxCoverSummaries four = strip_cover({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    auto w = detail::payload_widths(two);
    std::uint64_t per_entry =
        entry_cost_bits(size_n_bits(w.k, w.coord_digits), w.sum_num_digits + w.sum_den_digits);
    CHECK(serialize(three).bit_length == serialize(two).bit_length + per_entry);

    // doubling the entries doubles only the |S| term
    std::uint64_t header = serialize(empty).bit_length;
    CHECK(serialize(two).bit_length - header == 2 * (serialize(one).bit_length - header));
    CHECK(serialize(four).bit_length - header == 2 * (serialize(two).bit_length - header));
}

TEST_CASE("objectives that do not name every variable still roundtrip") {
    BoxCoverSummaries p;
    p.entries.push_back(BoxSummary{Box(vc({1, 1}), vc({2, 2})), Rat(1, 3)});
    p.eps_star = Rat(1, 8);
    p.eps = Rat(1, 2);
    // D = 2 is pinned by the region arity, not by the expressions
    p.f = PiecewisePolynomial::parse("piece box[0,0][1,1]:x1;piece else:0", 2);
    BoxCoverSummaries q = deserialize(serialize(p));
    CHECK(q == p);
    CHECK(q.f.dim() == 2);
}

TEST_CASE("roundtrip and the closed form on random payloads", "[property]") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        BoxCoverSummaries p = gen::random_payload(rng);
        Codeword cw = serialize(p);
        CHECK(cw.bit_length == size_formula(p));
        BoxCoverSummaries q = deserialize(cw);
        REQUIRE(q == p);
    }
}

TEST_CASE("distinct payloads produce distinct codewords", "[property]") {
    std::mt19937_64 rng(202);
    std::map<std::string, BoxCoverSummaries> seen;
    for (int trial = 0; trial < 200; ++trial) {
        BoxCoverSummaries p = gen::random_payload(rng);
        std::string bits = bit_string(serialize(p));
        auto [it, fresh] = seen.emplace(bits, p);
        if (!fresh) CHECK(it->second == p);
    }
}

TEST_CASE("malformed streams are rejected") {
    auto p = tiny_payload();
    Codeword cw = serialize(p);

    SECTION("truncation") {
        Codeword cut = cw;
        cut.bit_length -= 6;
        CHECK_THROWS_AS(deserialize(cut), CodecError);
    }
    SECTION("single bit flips never pass silently") {
        for (std::uint64_t b = 0; b < cw.bit_length; ++b) {
            Codeword flipped = cw;
            flipped.bytes[b / 8] ^= static_cast<std::uint8_t>(0x80u >> (b % 8));
            try {
                BoxCoverSummaries q = deserialize(flipped);
                // accepted streams are canonical codewords of their payload,
                // and a flipped stream can never decode back to the original
                CHECK(serialize(q) == flipped);
                CHECK_FALSE(q == p);
            } catch (const CodecError&) {
            } catch (const std::invalid_argument&) {
            }
        }
    }
}

TEST_CASE("compression ratio") {
    VoxelField field({2, 2}, 1, {Rat(0)}, {Rat(1)});
    field.set_vec(1, std::vector<Rat>{Rat(0)});
    field.set_vec(2, std::vector<Rat>{Rat(1)});
    field.set_vec(3, std::vector<Rat>{Rat(1, 2)});
    field.set_vec(4, std::vector<Rat>{Rat(1, 3)});

    BoxCoverSummaries onebox;
    onebox.entries.push_back(BoxSummary{Box(vc({1, 1}), vc({2, 2})), Rat(1, 2)});
    onebox.eps_star = Rat(1, 2);
    onebox.eps = Rat(3, 4);
    onebox.f = PiecewisePolynomial::parse("x1", 1);

    BoxCoverSummaries singles = onebox;
    singles.entries.clear();
    for (Index x = 1; x <= 2; ++x)
        for (Index y = 1; y <= 2; ++y)
            singles.entries.push_back(BoxSummary{Box(vc({x, y}), vc({x, y})), Rat(1, 2)});

    Rat r1 = compression_ratio(onebox, field);
    Rat r4 = compression_ratio(singles, field);
    CHECK(r1 > r4);  // fewer entries, same numerator
    CHECK(r1 > 0);
    CHECK(compression_ratio(onebox, field) == r1);  // deterministic
}

TEST_CASE("decoder summary re-check against a supplied field") {
    VoxelField field({2}, 1, {Rat(0)}, {Rat(1)});
    field.set_vec(1, std::vector<Rat>{Rat(0)});
    field.set_vec(2, std::vector<Rat>{Rat(1)});
    BoxCoverSummaries p;
    p.entries.push_back(BoxSummary{Box(vc({1}), vc({2})), Rat(1, 2)});
    p.eps_star = Rat(1, 2);
    p.eps = Rat(3, 4);
    p.f = PiecewisePolynomial::parse("x1", 1);
    CHECK(summary_violations(p, field).empty());
    p.entries[0].summary = Rat(2);  // deviation 2 > eps*
    CHECK(summary_violations(p, field) == std::vector<Index>{1, 2});
}

TEST_CASE("vbx container io") {
    auto p = tiny_payload();
    Codeword cw = serialize(p);
    std::string path = "test_codec_tmp.vbx";
    save_vbx(cw, path);
    Codeword back = load_vbx(path);
    CHECK(back == cw);
    CHECK(deserialize(back) == p);
    std::remove(path.c_str());
}
