#pragma once

#include "voxbox/boxgeom.hpp"
#include "voxbox/field.hpp"
#include "voxbox/poly.hpp"
#include "voxbox/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace voxbox {

struct CodecError : std::runtime_error {
    std::uint64_t bit_position;
    CodecError(std::uint64_t pos, const std::string& msg)
        : std::runtime_error(msg + " (bit " + std::to_string(pos) + ")"), bit_position(pos) {}
};

struct BoxSummary {
    Box box;
    Rat summary;
    bool operator==(const BoxSummary& o) const { return box == o.box && summary == o.summary; }
};

// The codec payload: a box cover with one rational summary per box, plus the
// working tolerance pair and the objective function.
struct BoxCoverSummaries {
    std::vector<BoxSummary> entries;
    Rat eps_star;
    Rat eps;
    PiecewisePolynomial f;

    bool operator==(const BoxCoverSummaries& o) const {
        return entries == o.entries && eps_star == o.eps_star && eps == o.eps && f == o.f;
    }
};

struct Codeword {
    std::vector<std::uint8_t> bytes;  // packed MSB-first
    std::uint64_t bit_length = 0;

    bool operator==(const Codeword& o) const {
        return bit_length == o.bit_length && bytes == o.bytes;
    }
};

inline std::pair<VoxelCoord, VoxelCoord> encode_box(const Box& box) { return {box.c1, box.c2}; }

namespace wire {

// Two-bit symbols.  Tuples open with kOpen, separate items with kComma and
// close with kClose; every number record ends with kTerm.  Magnitude digits
// are emitted as pairs 0b, so any pair starting with 1 ends a digit field.
constexpr unsigned kComma = 0b00;
constexpr unsigned kOpen = 0b01;
constexpr unsigned kClose = 0b10;
constexpr unsigned kTerm = 0b11;
constexpr std::uint64_t kDelimBits = 2;  // r

class BitWriter {
  public:
    void pair(unsigned two) {
        bit(two >> 1 & 1u);
        bit(two & 1u);
    }

    void bit(unsigned b) {
        if (used_ % 8 == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (used_ % 8));
        ++used_;
    }

    void byte(std::uint8_t v) {
        for (int i = 7; i >= 0; --i) bit(v >> i & 1u);
    }

    Codeword finish() && { return Codeword{std::move(bytes_), used_}; }
    std::uint64_t bits_used() const { return used_; }

  private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t used_ = 0;
};

class BitReader {
  public:
    explicit BitReader(const Codeword& cw) : cw_(cw) {}

    unsigned bit() {
        if (pos_ >= cw_.bit_length) throw CodecError(pos_, "truncated bit stream");
        unsigned b = cw_.bytes[pos_ / 8] >> (7 - pos_ % 8) & 1u;
        ++pos_;
        return b;
    }

    unsigned pair() {
        unsigned hi = bit();
        return hi << 1 | bit();
    }

    unsigned peek_pair() const {
        if (pos_ + 2 > cw_.bit_length) throw CodecError(pos_, "truncated bit stream");
        auto at = [&](std::uint64_t q) -> unsigned {
            return cw_.bytes[q / 8] >> (7 - q % 8) & 1u;
        };
        return at(pos_) << 1 | at(pos_ + 1);
    }

    std::uint8_t byte() {
        std::uint8_t v = 0;
        for (int i = 0; i < 8; ++i) v = static_cast<std::uint8_t>(v << 1 | bit());
        return v;
    }

    std::uint64_t pos() const { return pos_; }
    std::uint64_t remaining() const { return cw_.bit_length - pos_; }

  private:
    const Codeword& cw_;
    std::uint64_t pos_ = 0;
};

inline void put_magnitude(BitWriter& w, const Int& m, std::uint64_t pad_digits) {
    std::uint64_t digits = magnitude_bits(m);
    if (pad_digits < digits) throw std::logic_error("padding narrower than the value");
    for (std::uint64_t i = pad_digits; i-- > 0;) {
        unsigned b = (i < digits) ? static_cast<unsigned>(bit_test(m, static_cast<unsigned>(i)))
                                  : 0u;
        w.pair(b);  // digit pairs 00 / 01
    }
}

// sign pair, numerator digits, separator, denominator digits, terminator
inline void put_number(BitWriter& w, const Rat& x, std::uint64_t pad_num, std::uint64_t pad_den) {
    w.pair(x < 0 ? 0b01 : 0b00);
    put_magnitude(w, abs(numerator(x)), pad_num);
    w.pair(kClose);  // numerator/denominator separator (pair 10)
    put_magnitude(w, denominator(x), pad_den);
    w.pair(kTerm);
}

struct NumberRecord {
    Rat value;
    std::uint64_t num_digits = 0;
    std::uint64_t den_digits = 0;
};

inline NumberRecord get_number(BitReader& r) {
    std::uint64_t at = r.pos();
    unsigned sign = r.pair();
    if (sign != 0b00 && sign != 0b01) throw CodecError(at, "malformed number sign");
    NumberRecord rec;
    Int num = 0, den = 0;
    while (true) {
        at = r.pos();
        unsigned p = r.pair();
        if (p == 0b00 || p == 0b01) {
            num = num * 2 + (p & 1u);
            ++rec.num_digits;
            continue;
        }
        if (p == kClose) break;  // separator
        throw CodecError(at, "malformed numerator digits");
    }
    if (rec.num_digits == 0) throw CodecError(at, "empty numerator field");
    while (true) {
        at = r.pos();
        unsigned p = r.pair();
        if (p == 0b00 || p == 0b01) {
            den = den * 2 + (p & 1u);
            ++rec.den_digits;
            continue;
        }
        if (p == kTerm) break;
        throw CodecError(at, "malformed denominator digits");
    }
    if (rec.den_digits == 0) throw CodecError(at, "empty denominator field");
    if (den == 0) throw CodecError(at, "zero denominator");
    if (sign == 0b01 && num == 0) throw CodecError(at, "negative zero");
    rec.value = Rat(num, den);
    if (sign == 0b01) rec.value = -rec.value;
    return rec;
}

}  // namespace wire

namespace detail {

struct PayloadWidths {
    std::uint64_t coord_digits = 0;   // common padded numerator width of corner coordinates
    std::uint64_t sum_num_digits = 0; // common padded numerator width of summaries
    std::uint64_t sum_den_digits = 0; // common padded denominator width of summaries
    unsigned k = 0;
};

inline PayloadWidths payload_widths(const BoxCoverSummaries& p) {
    PayloadWidths w;
    for (const BoxSummary& e : p.entries) {
        w.k = e.box.k();
        for (Index c : e.box.c1.c) w.coord_digits = std::max(w.coord_digits, magnitude_bits(Int(c)));
        for (Index c : e.box.c2.c) w.coord_digits = std::max(w.coord_digits, magnitude_bits(Int(c)));
        w.sum_num_digits = std::max(w.sum_num_digits, magnitude_bits(abs(numerator(e.summary))));
        w.sum_den_digits = std::max(w.sum_den_digits, magnitude_bits(denominator(e.summary)));
    }
    return w;
}

inline std::vector<BoxSummary> canonical_entries(std::vector<BoxSummary> entries) {
    std::sort(entries.begin(), entries.end(), [](const BoxSummary& a, const BoxSummary& b) {
        if (!(a.box == b.box)) return a.box < b.box;
        return a.summary < b.summary;
    });
    return entries;
}

inline std::optional<std::vector<Index>> inferred_dims(const BoxCoverSummaries& p) {
    if (p.entries.empty()) return std::nullopt;
    const unsigned k = p.entries.front().box.k();
    std::vector<Index> dims(k, 0);
    for (const BoxSummary& e : p.entries) {
        if (e.box.k() != k) throw std::invalid_argument("mixed corner arity in cover");
        for (unsigned j = 0; j < k; ++j) dims[j] = std::max(dims[j], e.box.c2.c[j]);
    }
    return dims;
}

inline void validate_payload(const BoxCoverSummaries& p) {
    if (p.eps <= 0 || p.eps >= 1) throw std::invalid_argument("eps must lie in (0,1)");
    if (p.eps_star < 0 || p.eps_star >= p.eps)
        throw std::invalid_argument("eps* must satisfy 0 <= eps* < eps");
    auto dims = inferred_dims(p);
    if (!dims) return;  // empty cover: nothing to rasterize
    std::uint64_t cells = 1;
    for (Index d : *dims) {
        if (static_cast<std::uint64_t>(d) > (1ull << 24) || cells * static_cast<std::uint64_t>(d) > (1ull << 24))
            throw std::invalid_argument("grid too large to validate the cover");
        cells *= static_cast<std::uint64_t>(d);
    }
    for (const BoxSummary& e : p.entries)
        for (unsigned j = 0; j < e.box.k(); ++j)
            if (e.box.c1.c[j] < 1) throw std::invalid_argument("corner coordinates start at 1");
    std::vector<char> hit(cells, 0);
    VoxelField probe(*dims, 1, {Rat(0)}, {Rat(0)});  // index arithmetic helper
    for (const BoxSummary& e : p.entries)
        for (const VoxelCoord& v : box_points(e.box))
            hit[static_cast<std::size_t>(probe.coord_to_flat(v) - 1)] = 1;
    for (std::uint64_t i = 0; i < cells; ++i)
        if (!hit[i]) throw std::invalid_argument("cover does not reach every voxel of the grid");
}

}  // namespace detail

// Exact bit length of the serialized codeword, in closed form:
//   |S|*(10r + 4*size_n + 2*v) + 5r + size(eps*) + size(eps) + size(f)
// with r = 2 delimiter bits and the codec's own width parameters:
//   size_n = k*d + 5k + 1, half the wire cost of one corner tuple, where d
//            is the common padded digit width of corner coordinates;
//   v      = padded numerator plus denominator digit width of summaries.
inline std::uint64_t size_n_bits(unsigned k, std::uint64_t coord_digits) {
    return static_cast<std::uint64_t>(k) * coord_digits + 5ull * k + 1;
}

inline std::uint64_t entry_cost_bits(std::uint64_t size_n, std::uint64_t v) {
    return 10 * wire::kDelimBits + 4 * size_n + 2 * v;
}

inline std::uint64_t size_formula(const BoxCoverSummaries& payload) {
    const auto w = detail::payload_widths(payload);
    std::uint64_t total = 5 * wire::kDelimBits + encoded_bits(payload.eps_star) +
                          encoded_bits(payload.eps) + payload.f.size_bits();
    if (!payload.entries.empty()) {
        std::uint64_t sn = size_n_bits(w.k, w.coord_digits);
        std::uint64_t v = w.sum_num_digits + w.sum_den_digits;
        total += payload.entries.size() * entry_cost_bits(sn, v);
    }
    return total;
}

// Serializes the payload to its canonical codeword.  Layout: an outer tuple
// opened with 01, one entry ((c1,c2), summary) per box each followed by a
// comma, then the parameter triple (eps*, eps, f); the outer close is
// implied by the end of the stream.  Corner coordinates and summaries are
// padded to payload-wide common digit widths, which makes the closed-form
// size count exact.  f travels as its canonical 8-bit text.
inline Codeword serialize(const BoxCoverSummaries& payload) {
    detail::validate_payload(payload);
    BoxCoverSummaries canon = payload;
    canon.entries = detail::canonical_entries(std::move(canon.entries));
    const auto w = detail::payload_widths(canon);

    wire::BitWriter out;
    out.pair(wire::kOpen);
    for (const BoxSummary& e : canon.entries) {
        out.pair(wire::kOpen);  // entry
        out.pair(wire::kOpen);  // Encode(R) = (c1, c2)
        for (const VoxelCoord* corner : {&e.box.c1, &e.box.c2}) {
            out.pair(wire::kOpen);  // corner as a k-tuple of numbers
            for (std::size_t j = 0; j < corner->c.size(); ++j) {
                if (j) out.pair(wire::kComma);
                wire::put_number(out, Rat(corner->c[j]), w.coord_digits, 1);
            }
            out.pair(wire::kClose);
            if (corner == &e.box.c1) out.pair(wire::kComma);
        }
        out.pair(wire::kClose);  // end Encode(R)
        out.pair(wire::kComma);
        wire::put_number(out, e.summary, w.sum_num_digits, w.sum_den_digits);
        out.pair(wire::kClose);  // end entry
        out.pair(wire::kComma);
    }
    out.pair(wire::kOpen);  // (eps*, eps, f)
    wire::put_number(out, canon.eps_star, magnitude_bits(abs(numerator(canon.eps_star))),
                     magnitude_bits(denominator(canon.eps_star)));
    out.pair(wire::kComma);
    wire::put_number(out, canon.eps, magnitude_bits(abs(numerator(canon.eps))),
                     magnitude_bits(denominator(canon.eps)));
    out.pair(wire::kComma);
    for (char ch : canon.f.source()) out.byte(static_cast<std::uint8_t>(ch));
    out.pair(wire::kClose);

    Codeword cw = std::move(out).finish();
    if (cw.bit_length != size_formula(canon))
        throw std::logic_error("serializer disagrees with the closed-form size");
    return cw;
}

// Exact inverse of serialize on canonical codewords.  Anything else is
// rejected: a decoded stream must re-serialize to the identical bits, so an
// accepted codeword is always the canonical encoding of its payload.
inline BoxCoverSummaries deserialize(const Codeword& cw) {
    wire::BitReader in(cw);
    if (in.pair() != wire::kOpen) throw CodecError(0, "codeword must open a tuple");

    std::vector<BoxSummary> entries;
    while (true) {
        std::uint64_t at = in.pos();
        if (in.pair() != wire::kOpen) throw CodecError(at, "expected entry or parameter tuple");
        if (in.peek_pair() != wire::kOpen) break;  // parameter triple starts with a sign pair
        BoxSummary e;
        in.pair();  // Encode(R) open
        for (VoxelCoord* corner : {&e.box.c1, &e.box.c2}) {
            at = in.pos();
            if (in.pair() != wire::kOpen) throw CodecError(at, "expected corner tuple");
            while (true) {
                wire::NumberRecord rec = wire::get_number(in);
                if (denominator(rec.value) != 1 || rec.value < 1 || rec.den_digits != 1)
                    throw CodecError(in.pos(), "corner coordinates are positive integers");
                corner->c.push_back(static_cast<Index>(numerator(rec.value)));
                unsigned p = in.pair();
                if (p == wire::kComma) continue;
                if (p == wire::kClose) break;
                throw CodecError(in.pos(), "malformed corner tuple");
            }
            if (corner == &e.box.c1) {
                at = in.pos();
                if (in.pair() != wire::kComma) throw CodecError(at, "expected corner separator");
            }
        }
        at = in.pos();
        if (in.pair() != wire::kClose) throw CodecError(at, "unterminated Encode(R)");
        if (in.pair() != wire::kComma) throw CodecError(at, "expected summary separator");
        e.summary = wire::get_number(in).value;
        at = in.pos();
        if (in.pair() != wire::kClose) throw CodecError(at, "unterminated entry");
        if (in.pair() != wire::kComma) throw CodecError(at, "expected entry separator");
        if (e.box.c1.c.size() != e.box.c2.c.size() ||
            (!entries.empty() && e.box.c1.c.size() != entries.front().box.c1.c.size()))
            throw CodecError(at, "corner arity mismatch");
        for (std::size_t j = 0; j < e.box.c1.c.size(); ++j)
            if (e.box.c1.c[j] > e.box.c2.c[j]) throw CodecError(at, "box corners out of order");
        entries.push_back(std::move(e));
    }

    Rat eps_star = wire::get_number(in).value;
    std::uint64_t at = in.pos();
    if (in.pair() != wire::kComma) throw CodecError(at, "expected parameter separator");
    Rat eps = wire::get_number(in).value;
    at = in.pos();
    if (in.pair() != wire::kComma) throw CodecError(at, "expected parameter separator");

    // f occupies everything up to the final close pair
    if (in.remaining() < wire::kDelimBits || (in.remaining() - wire::kDelimBits) % 8 != 0)
        throw CodecError(in.pos(), "objective text is not byte aligned");
    std::uint64_t nbytes = (in.remaining() - wire::kDelimBits) / 8;
    std::string ftext;
    ftext.reserve(nbytes);
    for (std::uint64_t i = 0; i < nbytes; ++i) ftext.push_back(static_cast<char>(in.byte()));
    at = in.pos();
    if (in.pair() != wire::kClose) throw CodecError(at, "unterminated parameter tuple");
    if (in.remaining() != 0) throw CodecError(in.pos(), "trailing bits after codeword");

    if (eps_star < 0) throw CodecError(at, "eps* must be non-negative");
    // f's ambient dimension is recovered from its text: the widest variable
    // reference, or the arity of a box-region bound list when the
    // expressions do not name every variable.
    unsigned fdim = 1;
    for (std::size_t i = 0; i + 1 < ftext.size(); ++i) {
        if (ftext[i] == 'x' && ftext[i + 1] >= '0' && ftext[i + 1] <= '9') {
            unsigned idx = 0;
            std::size_t j = i + 1;
            while (j < ftext.size() && ftext[j] >= '0' && ftext[j] <= '9')
                idx = idx * 10 + static_cast<unsigned>(ftext[j++] - '0');
            fdim = std::max(fdim, idx);
        }
        if (ftext.compare(i, 4, "box[") == 0) {
            unsigned arity = 1;
            for (std::size_t j = i + 4; j < ftext.size() && ftext[j] != ']'; ++j)
                if (ftext[j] == ',') ++arity;
            fdim = std::max(fdim, arity);
        }
    }
    BoxCoverSummaries payload;
    payload.entries = std::move(entries);
    payload.eps_star = std::move(eps_star);
    payload.eps = std::move(eps);
    try {
        payload.f = PiecewisePolynomial::parse(ftext, fdim);
    } catch (const ParseError& pe) {
        throw CodecError(at, std::string("embedded objective rejected: ") + pe.what());
    }
    if (payload.f.source() != ftext) throw CodecError(at, "objective text is not canonical");

    detail::validate_payload(payload);
    if (!(serialize(payload) == cw))
        throw CodecError(0, "codeword is not the canonical encoding of its payload");
    return payload;
}

inline Rat compression_ratio(const BoxCoverSummaries& payload, const VoxelField& field) {
    auto dims = detail::inferred_dims(payload);
    if (field.n() > 0) {
        if (!dims || *dims != field.dims())
            throw std::invalid_argument("payload does not cover the field's grid");
    }
    Codeword cw = serialize(payload);
    return Rat(Int(field.size_bits()), Int(cw.bit_length));
}

// Re-checks the summary bound |f(X_i) - summary| <= eps* for every voxel
// covered by each box; returns the offending flat indices.
inline std::vector<Index> summary_violations(const BoxCoverSummaries& payload,
                                             const VoxelField& field) {
    std::vector<Index> bad;
    VoxelField probe(field.dims(), 1, {Rat(0)}, {Rat(0)});
    for (const BoxSummary& e : payload.entries)
        for (const VoxelCoord& v : box_points(e.box)) {
            Index i = probe.coord_to_flat(v);
            if (rat_abs(payload.f.eval(field.vec(i)) - e.summary) > payload.eps_star)
                bad.push_back(i);
        }
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    return bad;
}

// .vbx container: 8-byte big-endian bit length, then the packed bits.
inline void save_vbx(const Codeword& cw, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (int i = 7; i >= 0; --i)
        os.put(static_cast<char>(cw.bit_length >> (8 * i) & 0xFF));
    os.write(reinterpret_cast<const char*>(cw.bytes.data()),
             static_cast<std::streamsize>(cw.bytes.size()));
}

inline Codeword load_vbx(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    Codeword cw;
    for (int i = 0; i < 8; ++i) {
        int ch = is.get();
        if (ch == EOF) throw std::runtime_error("malformed .vbx: truncated header");
        cw.bit_length = cw.bit_length << 8 | static_cast<std::uint64_t>(ch & 0xFF);
    }
    std::uint64_t nbytes = (cw.bit_length + 7) / 8;
    cw.bytes.resize(nbytes);
    is.read(reinterpret_cast<char*>(cw.bytes.data()), static_cast<std::streamsize>(nbytes));
    if (static_cast<std::uint64_t>(is.gcount()) != nbytes)
        throw std::runtime_error("malformed .vbx: truncated payload");
    if (is.get() != EOF) throw std::runtime_error("malformed .vbx: trailing bytes");
    // zero padding in the final byte must be clean
    if (cw.bit_length % 8 != 0 && !cw.bytes.empty()) {
        std::uint8_t mask = static_cast<std::uint8_t>(0xFF >> (cw.bit_length % 8));
        if (cw.bytes.back() & mask) throw std::runtime_error("malformed .vbx: dirty padding");
    }
    return cw;
}

}  // namespace voxbox
