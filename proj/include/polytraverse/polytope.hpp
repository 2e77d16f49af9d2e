// Polytopes named by activation codes: construction, emptiness, boundary and
// redundancy queries, one-adjacent neighbor generation, and hyperplane
// pre-screening against a bounded region.
//
// Emptiness here always means "no point with interior margin": code-derived
// constraints are solved as open inequalities while region constraints stay
// closed, so degenerate slivers thinner than the margin count as empty.
#pragma once

#include <optional>
#include <vector>

#include "polytraverse/lp.hpp"
#include "polytraverse/network.hpp"
#include "polytraverse/region.hpp"

namespace polytraverse {

struct Polytope {
    ActivationCode code;
    ConstraintSystem system;  // one closed constraint per neuron per level
    int level = 0;
};

struct PrescreenResult {
    std::vector<int> cutting;  // ascending hyperplane indices

    static PrescreenResult all(int count);
};

// Builds the stacked constraint system of code-directed halfspaces for
// every level the code covers. Bit 1 keeps the active side (>= 0), bit 0
// the inactive side.
Polytope polytope_from_code(const ReluNetwork& net, const ActivationCode& code);

// True iff polytope (intersected with the region when given) has no point
// clearing the interior margin. lp_calls, when provided, is incremented per
// LP solved.
bool is_empty(const Polytope& polytope, const std::optional<BoundedRegion>& region = {},
              const Tolerances& tol = {}, long* lp_calls = nullptr);

// Flip test: true when flipping constraint `index` yields an
// (interior-)empty system. Sufficient for redundancy; duplicated constraints
// escape it, which is the documented gap of the flip test.
bool is_redundant(const Polytope& polytope, int index, const Tolerances& tol = {},
                  long* lp_calls = nullptr);

// Indices whose flip (within the region, when given) stays non-empty.
// Requires the polytope itself to be non-empty in the region.
std::vector<int> boundaries(const Polytope& polytope,
                            const std::optional<BoundedRegion>& region = {},
                            const Tolerances& tol = {}, long* lp_calls = nullptr);

// Last-level one-adjacent neighbors among the candidate hyperplane indices:
// codes differing in exactly one last-level bit whose polytope stays
// non-empty in the region. Other levels are never touched.
std::vector<ActivationCode> one_adjacent_codes(const Polytope& polytope,
                                               const PrescreenResult& candidates,
                                               const std::optional<BoundedRegion>& region = {},
                                               const Tolerances& tol = {},
                                               long* lp_calls = nullptr);

// Hyperplane pre-screening: index m is kept iff both open halfspaces of row
// m intersect the region. Rows are taken as hyperplanes (their sense is
// irrelevant); trivial rows are never kept.
PrescreenResult prescreen(const ConstraintSystem& hyperplanes, const BoundedRegion& region,
                          const Tolerances& tol = {}, long* lp_calls = nullptr);

namespace detail {

// Feasibility of a code-directed system with the interior-margin policy:
// `code_rows` are solved open, `closed_rows` (region constraints) closed.
FeasibilityResult check_with_margin(const ConstraintSystem& code_rows,
                                    const ConstraintSystem* closed_rows,
                                    const Tolerances& tol, long* lp_calls);

// Pre-screening body without the region emptiness guard, for callers that
// already hold a point inside the region.
PrescreenResult prescreen_scoped(const ConstraintSystem& hyperplanes,
                                 const BoundedRegion& region, const Tolerances& tol,
                                 long* lp_calls, int workers = 1);

// One code-directed closed constraint from an effective hyperplane row.
LinearConstraint code_constraint(const DenseVector& normal, double offset, bool active_bit);

}  // namespace detail

}  // namespace polytraverse
