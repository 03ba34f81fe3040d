#pragma once

#include "voxbox/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace voxbox {

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

struct UndefinedRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One monomial: coeff * prod_j x_j^exponents[j].  exponents has length D.
struct PolyTerm {
    Rat coeff;
    std::vector<unsigned> exponents;
};

// Piece regions.  `always` stands for the whole domain when it is the only
// piece and for "otherwise" when written as the trailing `else` clause.
struct RegionPredicate {
    enum class Kind { always, box, value_set };
    Kind kind = Kind::always;
    std::vector<Rat> lo, hi;   // box: coordinatewise bounds, lo <= hi
    std::size_t coord = 0;     // value_set: designated coordinate (0-based)
    std::vector<Rat> values;   // value_set: admissible values

    bool contains(std::span<const Rat> x) const {
        switch (kind) {
            case Kind::always: return true;
            case Kind::box:
                for (std::size_t j = 0; j < lo.size(); ++j)
                    if (x[j] < lo[j] || x[j] > hi[j]) return false;
                return true;
            case Kind::value_set:
                for (const Rat& v : values)
                    if (x[coord] == v) return true;
                return false;
        }
        return false;
    }

    // Exact for box/box; conservative (never false-negative) otherwise.
    bool intersects(const RegionPredicate& other) const {
        if (kind == Kind::always || other.kind == Kind::always) return true;
        if (kind == Kind::box && other.kind == Kind::box) {
            for (std::size_t j = 0; j < lo.size(); ++j)
                if (hi[j] < other.lo[j] || other.hi[j] < lo[j]) return false;
            return true;
        }
        const RegionPredicate& vs = (kind == Kind::value_set) ? *this : other;
        const RegionPredicate& bx = (kind == Kind::value_set) ? other : *this;
        if (bx.kind == Kind::box) {
            for (const Rat& v : vs.values)
                if (v >= bx.lo[vs.coord] && v <= bx.hi[vs.coord]) return true;
            return false;
        }
        // value_set vs value_set: disjoint only when they constrain the same
        // coordinate to disjoint value lists.
        if (vs.coord != bx.coord) return true;
        for (const Rat& v : vs.values)
            for (const Rat& w : bx.values)
                if (v == w) return true;
        return false;
    }
};

struct PolyPiece {
    RegionPredicate region;
    std::vector<PolyTerm> terms;  // canonical: sorted by exponent vector, no zero coeffs
    bool is_else = false;         // trailing "otherwise" piece
};

// A piecewise multivariate polynomial f: Q^D -> Q given as a symbolic string
// of rationals, variables x1..xD, binary + and * (or U+00B7), parentheses and
// optional piece clauses.  The canonical printed form defines len(f); the
// bit size follows the 8-bit alphabet convention size(f) = 8*len(f).
class PiecewisePolynomial {
  public:
    PiecewisePolynomial() = default;  // placeholder; assign a parsed value before use

    static PiecewisePolynomial parse(std::string_view src, unsigned dim);

    Rat eval(std::span<const Rat> x) const {
        if (x.size() != dim_) throw std::invalid_argument("eval: point has wrong dimension");
        for (const PolyPiece& p : pieces_) {
            if (p.is_else || p.region.contains(x)) return eval_terms(p.terms, x);
        }
        throw UndefinedRegionError("eval: point lies outside every declared piece region");
    }

    unsigned degree() const {
        unsigned deg = 0;
        for (const PolyPiece& p : pieces_)
            for (const PolyTerm& t : p.terms) {
                unsigned d = 0;
                for (unsigned e : t.exponents) d += e;
                deg = std::max(deg, d);
            }
        return deg;
    }

    unsigned dim() const { return dim_; }
    const std::vector<PolyPiece>& pieces() const { return pieces_; }
    const std::string& source() const { return source_; }
    std::size_t length() const { return source_.size(); }
    std::uint64_t size_bits() const { return 8 * static_cast<std::uint64_t>(length()); }

    bool operator==(const PiecewisePolynomial& o) const { return source_ == o.source_; }

    static std::string print_terms(const std::vector<PolyTerm>& terms);
    static std::string print_region(const RegionPredicate& r, bool is_else);

  private:
    static Rat eval_terms(const std::vector<PolyTerm>& terms, std::span<const Rat> x) {
        Rat acc = 0;
        for (const PolyTerm& t : terms) {
            Rat m = t.coeff;
            for (std::size_t j = 0; j < t.exponents.size(); ++j)
                for (unsigned e = 0; e < t.exponents[j]; ++e) m *= x[j];
            acc += m;
        }
        return acc;
    }

    unsigned dim_ = 0;
    std::vector<PolyPiece> pieces_;
    std::string source_;  // canonical form
};

namespace detail {

// Sum-of-terms normal form used while expanding expressions.
inline std::vector<PolyTerm> canonical_terms(std::vector<PolyTerm> terms, unsigned dim) {
    std::map<std::vector<unsigned>, Rat> merged;
    for (PolyTerm& t : terms) {
        t.exponents.resize(dim, 0);
        merged[t.exponents] += t.coeff;
    }
    std::vector<PolyTerm> out;
    for (auto& [exps, c] : merged)
        if (c != 0) out.push_back(PolyTerm{c, exps});
    return out;
}

inline std::vector<PolyTerm> add_terms(const std::vector<PolyTerm>& a,
                                       const std::vector<PolyTerm>& b, unsigned dim) {
    std::vector<PolyTerm> all(a);
    all.insert(all.end(), b.begin(), b.end());
    return canonical_terms(std::move(all), dim);
}

inline std::vector<PolyTerm> mul_terms(const std::vector<PolyTerm>& a,
                                       const std::vector<PolyTerm>& b, unsigned dim) {
    std::vector<PolyTerm> prod;
    for (const PolyTerm& ta : a)
        for (const PolyTerm& tb : b) {
            PolyTerm t;
            t.coeff = ta.coeff * tb.coeff;
            t.exponents.resize(dim, 0);
            for (unsigned j = 0; j < dim; ++j) {
                unsigned ea = j < ta.exponents.size() ? ta.exponents[j] : 0;
                unsigned eb = j < tb.exponents.size() ? tb.exponents[j] : 0;
                t.exponents[j] = ea + eb;
            }
            prod.push_back(std::move(t));
        }
    return canonical_terms(std::move(prod), dim);
}

class PolyParser {
  public:
    PolyParser(std::string_view src, unsigned dim) : src_(src), dim_(dim) {}

    std::vector<PolyPiece> run() {
        skip_ws();
        std::vector<PolyPiece> pieces;
        if (peek_word("piece")) {
            while (true) {
                pieces.push_back(parse_piece());
                skip_ws();
                if (pos_ < src_.size() && src_[pos_] == ';') {
                    ++pos_;
                    skip_ws();
                    continue;
                }
                break;
            }
        } else {
            PolyPiece p;
            p.region.kind = RegionPredicate::Kind::always;
            p.terms = parse_expr();
            pieces.push_back(std::move(p));
        }
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        check_pieces(pieces);
        return pieces;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool peek_word(std::string_view w) const {
        return src_.substr(pos_, w.size()) == w;
    }

    void expect(char c) {
        if (pos_ >= src_.size() || src_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void expect_word(std::string_view w) {
        if (!peek_word(w)) fail("expected '" + std::string(w) + "'");
        pos_ += w.size();
    }

    // Multiplication sign: '*' or the two-byte UTF-8 middle dot.
    bool eat_mul_sign() {
        if (pos_ < src_.size() && src_[pos_] == '*') {
            ++pos_;
            return true;
        }
        if (pos_ + 1 < src_.size() && static_cast<unsigned char>(src_[pos_]) == 0xC2 &&
            static_cast<unsigned char>(src_[pos_ + 1]) == 0xB7) {
            pos_ += 2;
            return true;
        }
        return false;
    }

    Rat parse_number() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) ++pos_;
        while (pos_ < src_.size() &&
               ((src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '/' || src_[pos_] == '.'))
            ++pos_;
        Rat r;
        if (pos_ == start || !try_parse_rational(src_.substr(start, pos_ - start), r)) {
            pos_ = start;
            fail("malformed rational literal");
        }
        return r;
    }

    unsigned parse_var() {
        // caller saw 'x'
        std::size_t start = pos_;
        ++pos_;
        unsigned long idx = 0;
        std::size_t digits = 0;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
            idx = idx * 10 + static_cast<unsigned long>(src_[pos_] - '0');
            ++pos_;
            ++digits;
        }
        if (digits == 0) {
            pos_ = start;
            fail("variable symbol must be x<index>");
        }
        if (idx == 0 || idx > dim_) {
            pos_ = start;
            fail("variable x" + std::to_string(idx) + " exceeds dimension D=" + std::to_string(dim_));
        }
        return static_cast<unsigned>(idx);
    }

    std::vector<PolyTerm> parse_factor() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            skip_ws();
            expect(')');
            return e;
        }
        if (c == 'x') {
            unsigned idx = parse_var();
            PolyTerm t;
            t.coeff = 1;
            t.exponents.assign(dim_, 0);
            t.exponents[idx - 1] = 1;
            return {t};
        }
        if (c == '-' || c == '+' || (c >= '0' && c <= '9')) {
            PolyTerm t;
            t.coeff = parse_number();
            t.exponents.assign(dim_, 0);
            return {t};
        }
        fail("expected rational, variable or '('");
    }

    std::vector<PolyTerm> parse_term() {
        auto acc = parse_factor();
        while (true) {
            skip_ws();
            if (!eat_mul_sign()) break;
            acc = mul_terms(acc, parse_factor(), dim_);
        }
        return canonical_terms(std::move(acc), dim_);
    }

    std::vector<PolyTerm> parse_expr() {
        auto acc = parse_term();
        while (true) {
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '+') {
                ++pos_;
                acc = add_terms(acc, parse_term(), dim_);
                continue;
            }
            break;
        }
        return acc;
    }

    std::vector<Rat> parse_rat_list(char close) {
        std::vector<Rat> out;
        while (true) {
            out.push_back(parse_number());
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == ',') {
                ++pos_;
                continue;
            }
            expect(close);
            break;
        }
        return out;
    }

    PolyPiece parse_piece() {
        expect_word("piece");
        skip_ws();
        PolyPiece p;
        if (peek_word("else")) {
            pos_ += 4;
            p.is_else = true;
            p.region.kind = RegionPredicate::Kind::always;
        } else if (peek_word("box")) {
            pos_ += 3;
            skip_ws();
            expect('[');
            p.region.kind = RegionPredicate::Kind::box;
            p.region.lo = parse_rat_list(']');
            skip_ws();
            expect('[');
            p.region.hi = parse_rat_list(']');
            if (p.region.lo.size() != dim_ || p.region.hi.size() != dim_)
                fail("box region must list D bounds per corner");
            for (std::size_t j = 0; j < dim_; ++j)
                if (p.region.lo[j] > p.region.hi[j]) fail("box region requires lo <= hi");
        } else if (peek_word("values")) {
            pos_ += 6;
            skip_ws();
            expect('(');
            skip_ws();
            if (pos_ >= src_.size() || src_[pos_] != 'x') fail("values region needs a variable");
            unsigned idx = parse_var();
            p.region.kind = RegionPredicate::Kind::value_set;
            p.region.coord = idx - 1;
            skip_ws();
            expect(':');
            skip_ws();
            expect('{');
            p.region.values = parse_rat_list('}');
            skip_ws();
            expect(')');
        } else {
            fail("expected region kind: box, values or else");
        }
        skip_ws();
        expect(':');
        p.terms = parse_expr();
        return p;
    }

    void check_pieces(const std::vector<PolyPiece>& pieces) const {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (pieces[i].is_else && i + 1 != pieces.size())
                throw ParseError(pos_, "'else' must be the last piece");
            if (!pieces[i].is_else && pieces[i].region.kind == RegionPredicate::Kind::always &&
                pieces.size() > 1)
                throw ParseError(pos_, "an unconditional piece must be the only piece");
        }
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
            for (std::size_t j = i + 1; j < pieces.size(); ++j) {
                if (pieces[i].is_else || pieces[j].is_else) continue;
                if (pieces[i].region.intersects(pieces[j].region))
                    throw ParseError(pos_, "piece regions " + std::to_string(i + 1) + " and " +
                                               std::to_string(j + 1) + " overlap");
            }
    }

    std::string_view src_;
    unsigned dim_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string PiecewisePolynomial::print_terms(const std::vector<PolyTerm>& terms) {
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const PolyTerm& t : terms) {
        if (!first) out += '+';
        first = false;
        out += rat_to_string(t.coeff);
        for (std::size_t j = 0; j < t.exponents.size(); ++j)
            for (unsigned e = 0; e < t.exponents[j]; ++e) {
                out += '*';
                out += 'x';
                out += std::to_string(j + 1);
            }
    }
    return out;
}

inline std::string PiecewisePolynomial::print_region(const RegionPredicate& r, bool is_else) {
    if (is_else) return "else";
    switch (r.kind) {
        case RegionPredicate::Kind::always: return "always";
        case RegionPredicate::Kind::box: {
            std::string s = "box[";
            for (std::size_t j = 0; j < r.lo.size(); ++j) {
                if (j) s += ',';
                s += rat_to_string(r.lo[j]);
            }
            s += "][";
            for (std::size_t j = 0; j < r.hi.size(); ++j) {
                if (j) s += ',';
                s += rat_to_string(r.hi[j]);
            }
            s += ']';
            return s;
        }
        case RegionPredicate::Kind::value_set: {
            std::string s = "values(x" + std::to_string(r.coord + 1) + ":{";
            for (std::size_t j = 0; j < r.values.size(); ++j) {
                if (j) s += ',';
                s += rat_to_string(r.values[j]);
            }
            s += "})";
            return s;
        }
    }
    return "";
}

inline PiecewisePolynomial PiecewisePolynomial::parse(std::string_view src, unsigned dim) {
    if (dim == 0) throw std::invalid_argument("dimension must be positive");
    detail::PolyParser parser(src, dim);
    PiecewisePolynomial f;
    f.dim_ = dim;
    f.pieces_ = parser.run();
    // Canonical printed form; len(f) is measured on this string.
    if (f.pieces_.size() == 1 && !f.pieces_[0].is_else &&
        f.pieces_[0].region.kind == RegionPredicate::Kind::always) {
        f.source_ = print_terms(f.pieces_[0].terms);
    } else {
        for (std::size_t i = 0; i < f.pieces_.size(); ++i) {
            if (i) f.source_ += ';';
            f.source_ += "piece ";
            f.source_ += print_region(f.pieces_[i].region, f.pieces_[i].is_else);
            f.source_ += ':';
            f.source_ += print_terms(f.pieces_[i].terms);
        }
    }
    return f;
}

}  // namespace voxbox
