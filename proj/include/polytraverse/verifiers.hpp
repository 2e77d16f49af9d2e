// Application layer on top of polytope traversal: output range and local
// adversarial attacks, counterfactual generation, monotonicity verification,
// robustness checks and linear output-property verification. Each verifier
// is a visitor over traverse()/traverse_with_shrinking().
#pragma once

#include <utility>

#include "polytraverse/traversal.hpp"

namespace polytraverse {

struct VerifierOptions {
    std::optional<long> max_polytopes;
    std::optional<double> time_budget_seconds;
    bool prescreen = true;
    int workers = 1;
    Tolerances tolerances;

    TraversalConfig traversal_config(BoundedRegion region) const;
};

// ---------------------------------------------------------------------------
// Output range / local adversarial attack
// ---------------------------------------------------------------------------

struct PolytopeRange {
    ActivationCode code;
    double local_min = 0.0;
    double local_max = 0.0;
};

struct RangeResult {
    double min = 0.0;
    double max = 0.0;
    DenseVector argmin;
    DenseVector argmax;
    std::vector<PolytopeRange> per_polytope;
    bool truncated = false;
    TraversalStats stats;
};

RangeResult output_range(const ReluNetwork& net, const BoundedRegion& region,
                         int output_index, const VerifierOptions& opts = {});

struct AdversarialPoint {
    DenseVector point;
    double value = 0.0;  // pre-link model output at the point
};

// Binary-response attack: with true label y=1 the prediction is minimized,
// with y=0 maximized; link monotonicity makes pre-link outputs sufficient.
AdversarialPoint adversarial_binary(const ReluNetwork& net, const DenseVector& x0,
                                    const BoundedRegion& region, int y,
                                    const VerifierOptions& opts = {});

enum class VerdictStatus { Verified, Violated, Truncated };

struct Verdict {
    VerdictStatus status = VerdictStatus::Verified;
    std::optional<DenseVector> witness;
    std::optional<ActivationCode> witness_code;
    std::optional<int> witness_class;
    double worst_margin = 0.0;  // max class-change / violation margin seen
    TraversalStats stats;
};

enum class AttackMode { Sound, Exact };

struct MulticlassAttackResult {
    Verdict verdict;
    // Exact mode only: the maximized sum-of-exponentials objective and where
    // it is attained (a vertex of some polytope-and-region intersection).
    std::optional<double> exact_objective;
    std::optional<DenseVector> exact_point;
};

// Per polytope and competitor i != q, maximizes the linear margin
// (w_i - w_q).x + (b_i - b_q); a positive maximum certifies a class change.
// Exact mode additionally maximizes the softmax-attack objective by vertex
// enumeration and requires input dimension <= 4.
MulticlassAttackResult adversarial_multiclass(const ReluNetwork& net, const DenseVector& x0,
                                              const BoundedRegion& region, int target_class,
                                              AttackMode mode = AttackMode::Sound,
                                              const VerifierOptions& opts = {});

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

// Verifies prediction stability on the L-inf ball of radius epsilon around
// x0, clipped to the network's input bounds when present. Stops at the first
// adversarial witness. gamma is the binary decision threshold used when the
// network has a single output.
Verdict robustness_check(const ReluNetwork& net, const DenseVector& x0, double epsilon,
                         const VerifierOptions& opts = {}, double gamma = 0.0);

// ---------------------------------------------------------------------------
// Counterfactuals
// ---------------------------------------------------------------------------

enum class Norm { L1, L2, Linf };

struct CounterfactualSpec {
    DenseVector origin;
    Norm norm = Norm::L2;
    double gamma = 0.0;                 // binary threshold on the raw output
    std::optional<BoundedRegion> clip;  // optional feasible input domain
};

enum class CounterfactualStatus { Found, NoneFound, Truncated };

struct CounterfactualResult {
    CounterfactualStatus status = CounterfactualStatus::NoneFound;
    DenseVector point;
    double distance = 0.0;
    int achieved_class = -1;
    ActivationCode code;
    TraversalStats stats;
};

// Nearest input (in the requested norm) whose predicted class differs from
// the origin's, found by traversal with a dynamically shrinking L-inf ball
// around the origin. Globally optimal for L1/Linf; within first-order
// tolerance for L2.
CounterfactualResult counterfactual(const ReluNetwork& net, const CounterfactualSpec& spec,
                                    const VerifierOptions& opts = {});

// The open halfspaces where class q beats every other class under a local
// model.
ConstraintSystem class_region(const LocalLinearModel& model, int q);

// Minimum-norm point of a constraint system: LP reformulations for L1/Linf,
// dual projected gradient with a duality-gap certificate for L2. Returns
// (point, distance) or nullopt when the system is infeasible.
std::optional<std::pair<DenseVector, double>> min_norm_point(const ConstraintSystem& system,
                                                             const DenseVector& origin,
                                                             Norm norm,
                                                             const Tolerances& tol = {});

// One per-polytope counterfactual sub-solve: minimum-norm point in
// polytope-and-scope subject to the class changing from origin_class to
// target_class (for single-output networks target is the flipped label).
std::optional<std::pair<DenseVector, double>> counterfactual_in_polytope(
    const Polytope& poly, const LocalLinearModel& model, const ConstraintSystem& scope_rows,
    int origin_class, int target_class, const CounterfactualSpec& spec,
    const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Monotonicity
// ---------------------------------------------------------------------------

enum class Direction { Increasing, Decreasing, Any };
enum class MonotoneVerdict { NonDecreasing, NonIncreasing, Constant, Violated, Truncated };

struct MonotonicityReport {
    int feature = 0;
    Direction claimed = Direction::Any;
    MonotoneVerdict verdict = MonotoneVerdict::Constant;
    // Polytopes whose coefficient sign opposes the claimed direction (for
    // Any: the sign opposite to the first nonzero one seen).
    std::vector<std::pair<ActivationCode, double>> violations;
    TraversalStats stats;

    bool consistent_with_claim() const;
};

MonotonicityReport monotonicity(const ReluNetwork& net, const BoundedRegion& region,
                                int feature, Direction claimed,
                                const VerifierOptions& opts = {});

// ---------------------------------------------------------------------------
// Linear output properties
// ---------------------------------------------------------------------------

struct PropertySpec {
    struct Inequality {
        DenseVector a;  // over the Q outputs
        double beta = 0.0;
    };
    // Conjunction: every a_k . o + beta_k <= 0 must hold over the region.
    std::vector<Inequality> inequalities;
};

Verdict verify_output_property(const ReluNetwork& net, const BoundedRegion& region,
                               const PropertySpec& spec, const VerifierOptions& opts = {});

// Vertices of a (bounded) constraint system, by exhaustive basis
// enumeration. Supports the exact attack mode and 2-D polytope dumps.
std::vector<DenseVector> enumerate_vertices(const ConstraintSystem& system,
                                            const Tolerances& tol = {});

}  // namespace polytraverse
