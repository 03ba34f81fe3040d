#pragma once

#include "voxbox/field.hpp"
#include "voxbox/poly.hpp"
#include "voxbox/rational.hpp"

#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace voxbox {

struct EpsilonStar {
    Rat value;
    std::optional<std::pair<Index, Index>> source_pair;  // pair attaining D(X,f,2eps)
};

// Exact per-voxel energies f(X_i) and the energy-gap metric
// d_f(i,j) = |f(X_i) - f(X_j)| derived from them.
class EnergyCache {
  public:
    static EnergyCache build(const VoxelField& field, const PiecewisePolynomial& f,
                             unsigned threads = 1) {
        if (f.dim() != field.d())
            throw std::invalid_argument("objective dimension does not match field");
        EnergyCache cache;
        cache.values_.resize(static_cast<std::size_t>(field.n()));
        auto work = [&](Index lo, Index hi) {
            for (Index i = lo; i <= hi; ++i)
                cache.values_[static_cast<std::size_t>(i - 1)] = f.eval(field.vec(i));
        };
        if (threads <= 1 || field.n() < 64) {
            if (field.n() > 0) work(1, field.n());
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(threads);
            Index chunk = (field.n() + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                Index lo = 1 + static_cast<Index>(t) * chunk;
                Index hi = std::min<Index>(field.n(), lo + chunk - 1);
                if (lo > hi) break;
                pool.emplace_back([&, t, lo, hi] {
                    try {
                        work(lo, hi);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& err : errors)
                if (err) std::rethrow_exception(err);
        }
        return cache;
    }

    static EnergyCache from_values(std::vector<Rat> values) {
        EnergyCache cache;
        cache.values_ = std::move(values);
        return cache;
    }

    Index n() const { return static_cast<Index>(values_.size()); }

    const Rat& value(Index i) const {
        check(i);
        return values_[static_cast<std::size_t>(i - 1)];
    }

    Rat d_f(Index i, Index j) const { return rat_abs(value(i) - value(j)); }

    // Largest pairwise distance strictly below `bound`; nullopt when no pair
    // of indices has d_f < bound (including n < 2).
    std::optional<Rat> big_pairwise_below(const Rat& bound) const {
        std::optional<Rat> best;
        for (Index i = 1; i <= n(); ++i)
            for (Index j = i + 1; j <= n(); ++j) {
                Rat d = d_f(i, j);
                if (d < bound && (!best || d > *best)) best = d;
            }
        return best;
    }

    std::optional<std::pair<Index, Index>> arg_big_pairwise_below(const Rat& bound) const {
        std::optional<std::pair<Index, Index>> arg;
        std::optional<Rat> best;
        for (Index i = 1; i <= n(); ++i)
            for (Index j = i + 1; j <= n(); ++j) {
                Rat d = d_f(i, j);
                if (d < bound && (!best || d > *best)) {
                    best = d;
                    arg = {i, j};
                }
            }
        return arg;
    }

    // eps* = D(X,f,2eps)/2, the working summary tolerance.  The cluster family
    // feasible at 2eps* equals the family feasible at 2eps.  When no pair of
    // voxels lies within 2eps the quantity D is undefined and eps* = eps/2 so
    // singleton clusters stay encodable.  eps* may be 0 when equal-energy
    // pairs are the only pairs below the bound.
    EpsilonStar select_epsilon_star(const Rat& eps) const {
        if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0,1)");
        EpsilonStar out;
        auto pair = arg_big_pairwise_below(2 * eps);
        if (!pair) {
            out.value = eps / 2;
            return out;
        }
        out.source_pair = pair;
        out.value = d_f(pair->first, pair->second) / 2;
        return out;
    }

    // Indexed Vietoris-Rips membership: diam_{d_f}(members) <= threshold.
    bool cluster_feasible(std::span<const Index> members, const Rat& threshold) const {
        if (members.empty()) throw std::invalid_argument("cluster must be nonempty");
        Rat lo = value(members[0]), hi = lo;
        for (Index m : members) {
            const Rat& v = value(m);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        return hi - lo <= threshold;
    }

    Rat mid_range(std::span<const Index> members) const {
        if (members.empty()) throw std::invalid_argument("cluster must be nonempty");
        Rat lo = value(members[0]), hi = lo;
        for (Index m : members) {
            const Rat& v = value(m);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        return (hi + lo) / 2;
    }

    // Mid-range summary with the feasibility precondition enforced: the
    // cluster diameter must not exceed two_eps_star, which guarantees every
    // member deviates from the summary by at most eps*.
    Rat summarize(std::span<const Index> members, const Rat& two_eps_star) const {
        if (!cluster_feasible(members, two_eps_star))
            throw std::invalid_argument("summary bound violation: cluster diameter exceeds 2*eps*");
        return mid_range(members);
    }

  private:
    void check(Index i) const {
        if (i < 1 || i > n()) throw std::out_of_range("energy index outside [1,n]");
    }

    std::vector<Rat> values_;
};

}  // namespace voxbox
