// Self-contained linear programming kernel: two-phase primal simplex with
// Bland's anti-cycling rule. Backs every feasibility, boundary, witness and
// optimization query in the library.
#pragma once

#include <optional>

#include "polytraverse/constraint.hpp"

namespace polytraverse {

enum class Feasibility { Feasible, Infeasible };

struct FeasibilityResult {
    Feasibility status = Feasibility::Infeasible;
    std::optional<DenseVector> witness;

    bool feasible() const { return status == Feasibility::Feasible; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class Objective { Minimize, Maximize };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::optional<DenseVector> argopt;
    std::optional<double> value;
};

// Canonical <=-form of a system: rows a_i . x <= rhs_i with senses folded,
// strictness margins applied, and trivial rows resolved (dropped when
// satisfied, flagged when violated).
struct LeForm {
    DenseMatrix a;
    DenseVector rhs;
    bool trivially_infeasible = false;
};
LeForm to_le_form(const ConstraintSystem& system, const Tolerances& tol = {});

// Phase-I query: is there a point satisfying every constraint, with open
// constraints held at margin >= tol.interior_margin? Feasible results carry
// a witness. Throws SolverStallError if the iteration cap is hit.
FeasibilityResult solve_feasibility(const ConstraintSystem& system,
                                    const Tolerances& tol = {});

// Vertex-exact minimization/maximization of objective . x over the system.
// Infeasibility and unboundedness are reported in the status, not thrown.
LpSolution optimize_linear(const DenseVector& objective, Objective direction,
                           const ConstraintSystem& system,
                           const Tolerances& tol = {});

// Chebyshev-center style point: maximizes the minimum norm-scaled slack over
// the non-trivial constraints (the sentinel box bounds the search without
// entering the slack objective). Infeasible when no point reaches slack
// >= tol.interior_margin; throws InvalidInputError when every constraint is
// trivial.
FeasibilityResult interior_point(const ConstraintSystem& system,
                                 const Tolerances& tol = {});

}  // namespace polytraverse
