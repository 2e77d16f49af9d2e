#include "polytraverse/polytope.hpp"

#include <atomic>
#include <numeric>
#include <thread>

namespace polytraverse {

PrescreenResult PrescreenResult::all(int count) {
    PrescreenResult r;
    r.cutting.resize(static_cast<std::size_t>(count));
    std::iota(r.cutting.begin(), r.cutting.end(), 0);
    return r;
}

namespace detail {

LinearConstraint code_constraint(const DenseVector& normal, double offset, bool active_bit) {
    // Active neuron (bit 1): w.x + b >= 0; inactive: w.x + b <= 0.
    return LinearConstraint(normal, offset,
                            active_bit ? Sense::GreaterEqual : Sense::LessEqual);
}

FeasibilityResult check_with_margin(const ConstraintSystem& code_rows,
                                    const ConstraintSystem* closed_rows,
                                    const Tolerances& tol, long* lp_calls) {
    ConstraintSystem query(code_rows.dimension);
    for (LinearConstraint c : code_rows.constraints) {
        if (c.trivial()) {
            // Constant pre-activation: decide by the exact encode tie rule so
            // that exactly one side of a dead hyperplane is non-empty. The
            // active side needs offset >= 0, the inactive side offset < 0.
            const bool ok =
                c.sense == Sense::GreaterEqual ? c.offset >= 0.0 : c.offset < 0.0;
            if (!ok) return {};
            continue;
        }
        c.strictness = Strictness::Open;
        query.add(std::move(c));
    }
    if (closed_rows) query.append(*closed_rows);
    if (lp_calls) ++*lp_calls;
    return solve_feasibility(query, tol);
}

}  // namespace detail

Polytope polytope_from_code(const ReluNetwork& net, const ActivationCode& code) {
    if (code.level_count() < 1 || code.level_count() > net.depth())
        throw InvalidInputError("polytope_from_code: code level count out of range");
    Polytope poly;
    poly.code = code;
    poly.level = code.level_count();
    poly.system = ConstraintSystem(net.input_dim());
    LevelCoefficients lc = first_level_coefficients(net);
    for (int l = 1; l <= code.level_count(); ++l) {
        if (l > 1) lc = next_level_coefficients(net, lc);
        const auto& bits = code.levels[static_cast<std::size_t>(l - 1)];
        if (static_cast<Eigen::Index>(bits.size()) != lc.effective_weights.rows())
            throw InvalidInputError("polytope_from_code: code width mismatch at level " +
                                    std::to_string(l));
        for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m)
            poly.system.add(detail::code_constraint(lc.effective_weights.row(m).transpose(),
                                                    lc.effective_bias(m),
                                                    bits[static_cast<std::size_t>(m)] != 0));
        if (l < code.level_count()) apply_mask(lc, bits);
    }
    return poly;
}

bool is_empty(const Polytope& polytope, const std::optional<BoundedRegion>& region,
              const Tolerances& tol, long* lp_calls) {
    std::optional<ConstraintSystem> closed;
    if (region) {
        if (region->dimension() != polytope.system.dimension)
            throw InvalidInputError("is_empty: region dimension mismatch");
        closed = region->constraints();
    }
    return !detail::check_with_margin(polytope.system, closed ? &*closed : nullptr, tol,
                                      lp_calls)
                .feasible();
}

namespace {

// Shared flip query behind is_redundant / boundaries / one_adjacent_codes.
bool flip_feasible(const Polytope& polytope, int index,
                   const std::optional<BoundedRegion>& region, const Tolerances& tol,
                   long* lp_calls) {
    if (index < 0 || index >= static_cast<int>(polytope.system.size()))
        throw InvalidInputError("constraint index out of range");
    ConstraintSystem flipped = polytope.system;
    flipped.constraints[static_cast<std::size_t>(index)] =
        flipped.constraints[static_cast<std::size_t>(index)].flipped();
    std::optional<ConstraintSystem> closed;
    if (region) closed = region->constraints();
    return detail::check_with_margin(flipped, closed ? &*closed : nullptr, tol, lp_calls)
        .feasible();
}

}  // namespace

bool is_redundant(const Polytope& polytope, int index, const Tolerances& tol,
                  long* lp_calls) {
    return !flip_feasible(polytope, index, {}, tol, lp_calls);
}

std::vector<int> boundaries(const Polytope& polytope,
                            const std::optional<BoundedRegion>& region,
                            const Tolerances& tol, long* lp_calls) {
    if (is_empty(polytope, region, tol, lp_calls))
        throw InvalidInputError("boundaries: polytope is empty in the region");
    std::vector<int> out;
    for (int m = 0; m < static_cast<int>(polytope.system.size()); ++m)
        if (flip_feasible(polytope, m, region, tol, lp_calls)) out.push_back(m);
    return out;
}

std::vector<ActivationCode> one_adjacent_codes(const Polytope& polytope,
                                               const PrescreenResult& candidates,
                                               const std::optional<BoundedRegion>& region,
                                               const Tolerances& tol, long* lp_calls) {
    const int last = polytope.code.level_count() - 1;
    if (last < 0) throw InvalidInputError("one_adjacent_codes: empty code");
    const int last_width =
        static_cast<int>(polytope.code.levels[static_cast<std::size_t>(last)].size());
    const int offset = static_cast<int>(polytope.system.size()) - last_width;
    std::vector<ActivationCode> out;
    for (int m : candidates.cutting) {
        if (m < 0 || m >= last_width)
            throw InvalidInputError("one_adjacent_codes: candidate index out of range");
        if (flip_feasible(polytope, offset + m, region, tol, lp_calls))
            out.push_back(polytope.code.with_flipped_bit(last, m));
    }
    return out;
}

namespace detail {

PrescreenResult prescreen_scoped(const ConstraintSystem& hyperplanes,
                                 const BoundedRegion& region, const Tolerances& tol,
                                 long* lp_calls, int workers) {
    const ConstraintSystem region_sys = region.constraints();
    const auto bounds = region.bounding_box();

    // Interval shortcut: when the whole bounding box lies on one side of a
    // hyperplane (with margin), that side's LP cannot be feasible and the
    // hyperplane does not cut the region. Only the undecided rows go to LP.
    std::vector<int> undecided;
    for (int m = 0; m < static_cast<int>(hyperplanes.size()); ++m) {
        const LinearConstraint& row = hyperplanes.constraints[static_cast<std::size_t>(m)];
        if (row.trivial()) continue;
        if (bounds) {
            double lo = row.offset, hi = row.offset;
            for (Eigen::Index j = 0; j < row.normal.size(); ++j) {
                const double w = row.normal(j);
                lo += w * (w >= 0 ? bounds->first(j) : bounds->second(j));
                hi += w * (w >= 0 ? bounds->second(j) : bounds->first(j));
            }
            const double guard = 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0);
            if (hi < tol.interior_margin - guard || lo > -tol.interior_margin + guard)
                continue;
        }
        undecided.push_back(m);
    }

    std::vector<char> cuts(undecided.size(), 0);
    std::atomic<long> calls{0};
    auto check_row = [&](std::size_t i) {
        const LinearConstraint& row =
            hyperplanes.constraints[static_cast<std::size_t>(undecided[i])];
        bool both = true;
        for (Sense side : {Sense::LessEqual, Sense::GreaterEqual}) {
            ConstraintSystem query = region_sys;
            query.add({row.normal, row.offset, side, Strictness::Open});
            ++calls;
            if (!solve_feasibility(query, tol).feasible()) {
                both = false;
                break;
            }
        }
        cuts[i] = both ? 1 : 0;
    };
    const int threads = std::min<int>(workers, static_cast<int>(undecided.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < undecided.size(); ++i) check_row(i);
    } else {
        std::atomic<std::size_t> cursor{0};
        auto work = [&]() {
            for (std::size_t i = cursor.fetch_add(1); i < undecided.size();
                 i = cursor.fetch_add(1))
                check_row(i);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (lp_calls) *lp_calls += calls.load();

    PrescreenResult result;
    for (std::size_t i = 0; i < undecided.size(); ++i)
        if (cuts[i]) result.cutting.push_back(undecided[i]);
    return result;
}

}  // namespace detail

PrescreenResult prescreen(const ConstraintSystem& hyperplanes, const BoundedRegion& region,
                          const Tolerances& tol, long* lp_calls) {
    if (region.dimension() != hyperplanes.dimension)
        throw InvalidInputError("prescreen: region dimension mismatch");
    if (lp_calls) ++*lp_calls;
    if (!solve_feasibility(region.constraints(), tol).feasible())
        throw InvalidInputError("prescreen: region is empty");
    return detail::prescreen_scoped(hyperplanes, region, tol, lp_calls);
}

}  // namespace polytraverse
