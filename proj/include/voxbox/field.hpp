#pragma once

#include "voxbox/poly.hpp"
#include "voxbox/rational.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace voxbox {

using Index = std::int64_t;  // 1-based flat voxel index

struct VoxelCoord {
    std::vector<Index> c;  // 1-based, length k
    bool operator==(const VoxelCoord& o) const { return c == o.c; }
    bool operator<(const VoxelCoord& o) const { return c < o.c; }
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

// A (k,D)-dimensional voxelized vector field: dims [n_1..n_k], one length-D
// rational vector per voxel in row-major flat order (last axis fastest), plus
// the declared hypercube range of the entries.
class VoxelField {
  public:
    VoxelField(std::vector<Index> dims, unsigned d, std::vector<Rat> lo, std::vector<Rat> hi)
        : dims_(std::move(dims)), d_(d), lo_(std::move(lo)), hi_(std::move(hi)) {
        if (dims_.empty()) throw std::invalid_argument("field needs at least one grid axis");
        for (Index nj : dims_)
            if (nj < 0) throw std::invalid_argument("grid extents must be non-negative");
        if (d_ == 0) throw std::invalid_argument("vector length D must be positive");
        if (lo_.size() != d_ || hi_.size() != d_)
            throw std::invalid_argument("hypercube bounds must list D intervals");
        n_ = 1;
        for (Index nj : dims_) n_ *= nj;
        data_.assign(static_cast<std::size_t>(n_) * d_, Rat(0));
    }

    unsigned k() const { return static_cast<unsigned>(dims_.size()); }
    unsigned d() const { return d_; }
    Index n() const { return n_; }
    const std::vector<Index>& dims() const { return dims_; }
    const std::vector<Rat>& range_lo() const { return lo_; }
    const std::vector<Rat>& range_hi() const { return hi_; }

    std::span<const Rat> vec(Index i) const {
        check_index(i);
        return {data_.data() + static_cast<std::size_t>(i - 1) * d_, d_};
    }

    void set_vec(Index i, std::span<const Rat> v) {
        check_index(i);
        if (v.size() != d_) throw std::invalid_argument("vector has wrong length");
        std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>((i - 1) * d_));
    }

    VoxelCoord flat_to_coord(Index i) const {
        check_index(i);
        VoxelCoord out;
        out.c.assign(dims_.size(), 1);
        Index rem = i - 1;
        for (std::size_t j = dims_.size(); j-- > 0;) {
            out.c[j] = rem % dims_[j] + 1;
            rem /= dims_[j];
        }
        return out;
    }

    Index coord_to_flat(const VoxelCoord& v) const {
        if (v.c.size() != dims_.size()) throw std::invalid_argument("coordinate has wrong arity");
        Index flat = 0;
        for (std::size_t j = 0; j < dims_.size(); ++j) {
            if (v.c[j] < 1 || v.c[j] > dims_[j])
                throw std::out_of_range("coordinate outside the grid");
            flat = flat * dims_[j] + (v.c[j] - 1);
        }
        return flat + 1;
    }

    // Bits to store the field with flat indexing: a fixed header allowance
    // plus one self-delimiting number record per vector entry.
    static constexpr std::uint64_t kHeaderBits = 10;
    std::uint64_t size_bits() const {
        std::uint64_t total = kHeaderBits;
        for (const Rat& x : data_) total += encoded_bits(x);
        return total;
    }

    ValidationReport validate() const {
        ValidationReport rep;
        std::map<std::vector<Rat>, Index> seen;
        for (Index i = 1; i <= n_; ++i) {
            auto v = vec(i);
            std::vector<Rat> key(v.begin(), v.end());
            auto [it, fresh] = seen.emplace(std::move(key), i);
            if (!fresh)
                rep.issues.push_back("injectivity: voxels " + coord_str(it->second) + " and " +
                                     coord_str(i) + " hold identical vectors");
            for (unsigned j = 0; j < d_; ++j)
                if (v[j] < lo_[j] || v[j] > hi_[j]) {
                    rep.issues.push_back("range: voxel " + coord_str(i) + " entry " +
                                         std::to_string(j + 1) + " = " + rat_to_string(v[j]) +
                                         " outside [" + rat_to_string(lo_[j]) + "," +
                                         rat_to_string(hi_[j]) + "]");
                }
        }
        return rep;
    }

    void save(std::ostream& os) const {
        os << "VVF " << dims_.size() << ' ' << d_;
        for (Index nj : dims_) os << ' ' << nj;
        os << '\n';
        for (unsigned j = 0; j < d_; ++j)
            os << (j ? " " : "") << rat_to_string(lo_[j]) << ' ' << rat_to_string(hi_[j]);
        os << '\n';
        for (Index i = 1; i <= n_; ++i) {
            auto v = vec(i);
            for (unsigned j = 0; j < d_; ++j) os << (j ? " " : "") << rat_to_string(v[j]);
            os << '\n';
        }
    }

    void save_file(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        save(os);
    }

    static VoxelField load(std::istream& is) {
        std::string magic;
        std::size_t k = 0;
        unsigned d = 0;
        if (!(is >> magic >> k >> d) || magic != "VVF")
            throw std::runtime_error("malformed .vvf: bad header");
        if (k == 0 || d == 0) throw std::runtime_error("malformed .vvf: zero dimensions");
        std::vector<Index> dims(k);
        for (auto& nj : dims)
            if (!(is >> nj) || nj < 0) throw std::runtime_error("malformed .vvf: bad grid extents");
        auto read_rat = [&is]() {
            std::string tok;
            if (!(is >> tok)) throw std::runtime_error("malformed .vvf: missing rational");
            return parse_rational(tok);
        };
        std::vector<Rat> lo(d), hi(d);
        for (unsigned j = 0; j < d; ++j) {
            lo[j] = read_rat();
            hi[j] = read_rat();
        }
        VoxelField f(std::move(dims), d, std::move(lo), std::move(hi));
        std::vector<Rat> v(d);
        for (Index i = 1; i <= f.n(); ++i) {
            for (unsigned j = 0; j < d; ++j) v[j] = read_rat();
            f.set_vec(i, v);
        }
        return f;
    }

    static VoxelField load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open: " + path);
        return load(is);
    }

  private:
    void check_index(Index i) const {
        if (i < 1 || i > n_) throw std::out_of_range("flat index outside [1,n]");
    }

    std::string coord_str(Index i) const {
        VoxelCoord v = flat_to_coord(i);
        std::string s = "(";
        for (std::size_t j = 0; j < v.c.size(); ++j) {
            if (j) s += ',';
            s += std::to_string(v.c[j]);
        }
        return s + ")";
    }

    std::vector<Index> dims_;
    unsigned d_;
    std::vector<Rat> lo_, hi_;
    Index n_ = 0;
    std::vector<Rat> data_;
};

// Zero-padded dimension lift: a (k,D) instance viewed as (k',D') with k'>=k,
// D'>=D.  New grid axes have extent 1, so the embedded data occupies the
// whole lifted grid and no synthetic voxels appear.  f is extended to return
// its original value on the slab x_{D+1}=...=x_{D'}=0 and 0 elsewhere.
inline std::pair<VoxelField, PiecewisePolynomial> lift_dims(const VoxelField& field,
                                                            const PiecewisePolynomial& f,
                                                            unsigned k2, unsigned d2) {
    if (k2 < field.k() || d2 < field.d())
        throw std::invalid_argument("lift_dims requires k' >= k and D' >= D");
    if (f.dim() != field.d()) throw std::invalid_argument("f dimension does not match field");

    std::vector<Index> dims = field.dims();
    dims.resize(k2, 1);
    std::vector<Rat> lo = field.range_lo(), hi = field.range_hi();
    lo.resize(d2, Rat(0));
    hi.resize(d2, Rat(0));
    VoxelField lifted(dims, d2, lo, hi);
    std::vector<Rat> v(d2, Rat(0));
    for (Index i = 1; i <= field.n(); ++i) {
        auto src = field.vec(i);
        std::copy(src.begin(), src.end(), v.begin());
        std::fill(v.begin() + field.d(), v.end(), Rat(0));
        lifted.set_vec(i, v);  // flat order is preserved by extent-1 axes
    }

    if (d2 == field.d()) return {std::move(lifted), f};

    // Rebuild f textually: constrain each piece to the zero slab (using the
    // declared hypercube for previously unconstrained axes) and default to 0.
    std::string src;
    bool first = true;
    for (const PolyPiece& p : f.pieces()) {
        if (p.is_else)
            throw std::invalid_argument("lift_dims: cannot lift an open-ended else piece");
        RegionPredicate r = p.region;
        if (r.kind == RegionPredicate::Kind::value_set) {
            if (!first) src += ';';
            first = false;
            src += "piece " + PiecewisePolynomial::print_region(r, false) + ':' +
                   PiecewisePolynomial::print_terms(p.terms);
            continue;
        }
        if (r.kind == RegionPredicate::Kind::always) {
            r.kind = RegionPredicate::Kind::box;
            r.lo = field.range_lo();
            r.hi = field.range_hi();
        }
        r.lo.resize(d2, Rat(0));
        r.hi.resize(d2, Rat(0));
        if (!first) src += ';';
        first = false;
        src += "piece " + PiecewisePolynomial::print_region(r, false) + ':' +
               PiecewisePolynomial::print_terms(p.terms);
    }
    src += ";piece else:0";
    return {std::move(lifted), PiecewisePolynomial::parse(src, d2)};
}

}  // namespace voxbox
