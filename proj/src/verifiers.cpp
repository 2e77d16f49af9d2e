#include "polytraverse/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polytraverse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConstraintSystem with_region(const ConstraintSystem& polytope_rows,
                             const ConstraintSystem& region_rows) {
    ConstraintSystem sys = polytope_rows;
    sys.append(region_rows);
    return sys;
}

int argmax_class(const DenseVector& outputs) {
    int best = 0;
    for (Eigen::Index i = 1; i < outputs.size(); ++i)
        if (outputs(i) > outputs(best)) best = static_cast<int>(i);
    return best;
}

}  // namespace

TraversalConfig VerifierOptions::traversal_config(BoundedRegion region) const {
    TraversalConfig config(std::move(region));
    config.max_polytopes = max_polytopes;
    config.time_budget_seconds = time_budget_seconds;
    config.prescreen = prescreen;
    config.workers = workers;
    config.tolerances = tolerances;
    return config;
}

// ---------------------------------------------------------------------------
// Output range
// ---------------------------------------------------------------------------

namespace {

RangeResult range_impl(const ReluNetwork& net, const BoundedRegion& region,
                       const DenseVector& start, int output_index,
                       const VerifierOptions& opts) {
    if (output_index < 0 || output_index >= net.output_dim())
        throw InvalidInputError("output_range: output index out of range");
    const ConstraintSystem region_rows = region.constraints();
    RangeResult result;
    result.min = kInf;
    result.max = -kInf;

    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        const ConstraintSystem sys = with_region(poly.system, region_rows);
        const DenseVector objective = model.weights.row(output_index).transpose();
        const double shift = model.bias(output_index);
        const LpSolution lo = optimize_linear(objective, Objective::Minimize, sys,
                                              opts.tolerances);
        const LpSolution hi = optimize_linear(objective, Objective::Maximize, sys,
                                              opts.tolerances);
        if (lo.status == LpStatus::Unbounded || hi.status == LpStatus::Unbounded)
            throw InvalidInputError("output range is unbounded over the region");
        if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
            return VisitOutcome::proceed();  // margin-thin cell, nothing to report
        PolytopeRange row{poly.code, *lo.value + shift, *hi.value + shift};
        if (row.local_min < result.min) {
            result.min = row.local_min;
            result.argmin = *lo.argopt;
        }
        if (row.local_max > result.max) {
            result.max = row.local_max;
            result.argmax = *hi.argopt;
        }
        result.per_polytope.push_back(std::move(row));
        return VisitOutcome::proceed();
    };

    TraversalResult tr = traverse(net, start, opts.traversal_config(region), visitor);
    result.stats = tr.stats;
    result.truncated = tr.stats.truncated;
    if (result.per_polytope.empty())
        throw InvalidInputError("output_range: region covers no polytope");
    return result;
}

}  // namespace

RangeResult output_range(const ReluNetwork& net, const BoundedRegion& region,
                         int output_index, const VerifierOptions& opts) {
    return range_impl(net, region, region.nominal_interior_point(opts.tolerances),
                      output_index, opts);
}

AdversarialPoint adversarial_binary(const ReluNetwork& net, const DenseVector& x0,
                                    const BoundedRegion& region, int y,
                                    const VerifierOptions& opts) {
    if (net.output_dim() != 1)
        throw InvalidInputError("adversarial_binary needs a single-output network");
    if (y != 0 && y != 1) throw InvalidInputError("adversarial_binary: y must be 0 or 1");
    const RangeResult range = range_impl(net, region, x0, 0, opts);
    // y=1: hurt the prediction by minimizing it; y=0: by maximizing.
    if (y == 1) return {range.argmin, range.min};
    return {range.argmax, range.max};
}

// ---------------------------------------------------------------------------
// Vertex enumeration (exact attack mode, 2-D dumps)
// ---------------------------------------------------------------------------

std::vector<DenseVector> enumerate_vertices(const ConstraintSystem& system,
                                            [[maybe_unused]] const Tolerances& tol) {
    const int p = system.dimension;
    std::vector<const LinearConstraint*> rows;
    for (const auto& c : system.constraints)
        if (!c.trivial()) rows.push_back(&c);
    std::vector<DenseVector> vertices;
    if (static_cast<int>(rows.size()) < p) return vertices;

    std::vector<int> pick(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) pick[static_cast<std::size_t>(i)] = i;
    const int n = static_cast<int>(rows.size());
    DenseMatrix a(p, p);
    DenseVector b(p);
    while (true) {
        for (int i = 0; i < p; ++i) {
            const LinearConstraint& c = *rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
            a.row(i) = c.normal.transpose();
            b(i) = -c.offset;
        }
        Eigen::FullPivLU<DenseMatrix> lu(a);
        lu.setThreshold(1e-10);
        if (lu.rank() == p) {
            const DenseVector x = lu.solve(b);
            if ((a * x - b).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
                bool ok = true;
                for (const auto& c : system.constraints) {
                    const double scale =
                        1.0 + std::abs(c.offset) + c.normal.cwiseAbs().dot(x.cwiseAbs());
                    if (c.slack(x) < -1e-7 * scale) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    bool dup = false;
                    for (const auto& v : vertices)
                        if ((v - x).cwiseAbs().maxCoeff() <=
                            1e-8 * (1.0 + x.cwiseAbs().maxCoeff())) {
                            dup = true;
                            break;
                        }
                    if (!dup) vertices.push_back(x);
                }
            }
        }
        // next combination
        int i = p - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - p + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < p; ++k)
            pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
    }
    return vertices;
}

// ---------------------------------------------------------------------------
// Multiclass adversarial attack
// ---------------------------------------------------------------------------

MulticlassAttackResult adversarial_multiclass(const ReluNetwork& net, const DenseVector& x0,
                                              const BoundedRegion& region, int target_class,
                                              AttackMode mode, const VerifierOptions& opts) {
    const int q = net.output_dim();
    if (q < 2) throw InvalidInputError("adversarial_multiclass needs >= 2 outputs");
    if (target_class < 0 || target_class >= q)
        throw InvalidInputError("adversarial_multiclass: class out of range");
    if (mode == AttackMode::Exact && net.input_dim() > 4)
        throw UnsupportedConfigError(
            "exact attack mode is limited to input dimension <= 4");
    const ConstraintSystem region_rows = region.constraints();

    MulticlassAttackResult result;
    Verdict& verdict = result.verdict;
    verdict.worst_margin = -kInf;
    double exact_best = -kInf;
    DenseVector exact_point;

    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        const ConstraintSystem sys = with_region(poly.system, region_rows);
        for (int i = 0; i < q; ++i) {
            if (i == target_class) continue;
            const DenseVector objective =
                (model.weights.row(i) - model.weights.row(target_class)).transpose();
            const double shift = model.bias(i) - model.bias(target_class);
            const LpSolution sol =
                optimize_linear(objective, Objective::Maximize, sys, opts.tolerances);
            if (sol.status != LpStatus::Optimal) continue;
            const double margin = *sol.value + shift;
            if (margin > verdict.worst_margin) {
                verdict.worst_margin = margin;
                verdict.witness = sol.argopt;
                verdict.witness_code = poly.code;
                verdict.witness_class = i;
            }
        }
        if (mode == AttackMode::Exact) {
            for (const DenseVector& v : enumerate_vertices(sys, opts.tolerances)) {
                double obj = 0.0;
                const DenseVector o = model.weights * v + model.bias;
                for (int i = 0; i < q; ++i)
                    if (i != target_class) obj += std::exp(o(i) - o(target_class));
                if (obj > exact_best) {
                    exact_best = obj;
                    exact_point = v;
                }
            }
        }
        return VisitOutcome::proceed();
    };

    const TraversalResult tr =
        traverse(net, x0, opts.traversal_config(region), visitor);
    verdict.stats = tr.stats;
    if (tr.stats.truncated)
        verdict.status = VerdictStatus::Truncated;
    else if (verdict.worst_margin > opts.tolerances.numeric)
        verdict.status = VerdictStatus::Violated;
    else
        verdict.status = VerdictStatus::Verified;
    if (!(verdict.status == VerdictStatus::Violated)) {
        verdict.witness.reset();
        verdict.witness_code.reset();
        verdict.witness_class.reset();
    }
    if (mode == AttackMode::Exact && exact_best > -kInf) {
        result.exact_objective = exact_best;
        result.exact_point = exact_point;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

Verdict robustness_check(const ReluNetwork& net, const DenseVector& x0, double epsilon,
                         const VerifierOptions& opts, double gamma) {
    if (!(epsilon > 0.0)) throw InvalidInputError("robustness_check: epsilon must be > 0");
    BoundedRegion region = BoundedRegion::linf_ball(x0, epsilon);
    if (net.input_bounds())
        region = BoundedRegion::intersection(
            {region,
             BoundedRegion::box(net.input_bounds()->lower, net.input_bounds()->upper)});
    const ConstraintSystem region_rows = region.constraints();

    const DenseVector o0 = forward(net, x0);
    const int q = net.output_dim();
    const int origin_class = q == 1 ? (o0(0) >= gamma ? 1 : 0) : argmax_class(o0);

    Verdict verdict;
    verdict.worst_margin = -kInf;
    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        const ConstraintSystem sys = with_region(poly.system, region_rows);
        auto probe = [&](const DenseVector& objective, double shift, int flip_class) {
            const LpSolution sol =
                optimize_linear(objective, Objective::Maximize, sys, opts.tolerances);
            if (sol.status != LpStatus::Optimal) return false;
            const double margin = *sol.value + shift;
            verdict.worst_margin = std::max(verdict.worst_margin, margin);
            if (margin > opts.tolerances.numeric) {
                verdict.status = VerdictStatus::Violated;
                verdict.witness = sol.argopt;
                verdict.witness_code = poly.code;
                verdict.witness_class = flip_class;
                return true;
            }
            return false;
        };
        if (q == 1) {
            // Cross the decision threshold in the direction away from the
            // origin class.
            const double sign = origin_class == 1 ? -1.0 : 1.0;
            const DenseVector objective = sign * model.weights.row(0).transpose();
            const double shift = sign * (model.bias(0) - gamma);
            if (probe(objective, shift, 1 - origin_class)) return VisitOutcome::stop();
        } else {
            for (int i = 0; i < q; ++i) {
                if (i == origin_class) continue;
                const DenseVector objective =
                    (model.weights.row(i) - model.weights.row(origin_class)).transpose();
                const double shift = model.bias(i) - model.bias(origin_class);
                if (probe(objective, shift, i)) return VisitOutcome::stop();
            }
        }
        return VisitOutcome::proceed();
    };

    const TraversalResult tr = traverse(net, x0, opts.traversal_config(region), visitor);
    verdict.stats = tr.stats;
    if (verdict.status != VerdictStatus::Violated)
        verdict.status =
            tr.stats.truncated ? VerdictStatus::Truncated : VerdictStatus::Verified;
    return verdict;
}

// ---------------------------------------------------------------------------
// Counterfactuals
// ---------------------------------------------------------------------------

ConstraintSystem class_region(const LocalLinearModel& model, int q) {
    const int classes = static_cast<int>(model.weights.rows());
    if (q < 0 || q >= classes) throw InvalidInputError("class_region: class out of range");
    ConstraintSystem sys(static_cast<int>(model.weights.cols()));
    for (int i = 0; i < classes; ++i) {
        if (i == q) continue;
        sys.add({(model.weights.row(q) - model.weights.row(i)).transpose(),
                 model.bias(q) - model.bias(i), Sense::GreaterEqual, Strictness::Open});
    }
    return sys;
}

namespace {

std::optional<std::pair<DenseVector, double>> min_norm_lp(const ConstraintSystem& system,
                                                          const DenseVector& origin,
                                                          Norm norm, const Tolerances& tol) {
    const int p = system.dimension;
    const int extra = norm == Norm::Linf ? 1 : p;
    ConstraintSystem lifted(p + extra);
    for (const auto& c : system.constraints) {
        DenseVector n = DenseVector::Zero(p + extra);
        n.segment(0, p) = c.normal;
        lifted.add({std::move(n), c.offset, c.sense, c.strictness});
    }
    for (int j = 0; j < p; ++j) {
        const int slot = norm == Norm::Linf ? p : p + j;
        DenseVector up = DenseVector::Zero(p + extra);
        up(j) = 1.0;
        up(slot) = -1.0;
        lifted.add({std::move(up), -origin(j), Sense::LessEqual});
        DenseVector down = DenseVector::Zero(p + extra);
        down(j) = -1.0;
        down(slot) = -1.0;
        lifted.add({std::move(down), origin(j), Sense::LessEqual});
    }
    DenseVector objective = DenseVector::Zero(p + extra);
    objective.segment(p, extra).setOnes();
    const LpSolution sol = optimize_linear(objective, Objective::Minimize, lifted, tol);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    return std::make_pair(DenseVector(sol.argopt->segment(0, p)), *sol.value);
}

// Exact Euclidean projection by KKT active-set enumeration: the optimal
// active set has at most P linearly independent rows, so all subsets up to
// size P are tried. Used when the first-order dual method cannot certify its
// gap (thin-wedge systems make it arbitrarily slow).
std::optional<std::pair<DenseVector, double>> project_by_active_sets(
    const DenseMatrix& a, const DenseVector& rhs, const DenseVector& origin) {
    const int m = static_cast<int>(a.rows());
    const int p = static_cast<int>(a.cols());
    long budget = 1;
    {
        long subsets = 0, binom = 1;
        for (int k = 1; k <= p; ++k) {
            binom = binom * (m - k + 1) / k;
            subsets += binom;
            if (subsets > 100000) return std::nullopt;
        }
        budget = subsets;
    }
    (void)budget;

    auto feasible = [&](const DenseVector& x) {
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (a.row(i).dot(x) - rhs(i) > 1e-7 * (1.0 + std::abs(rhs(i))))
                return false;
        return true;
    };

    double best = std::numeric_limits<double>::infinity();
    DenseVector best_x;
    std::vector<int> idx;
    auto evaluate = [&]() {
        const int k = static_cast<int>(idx.size());
        DenseMatrix as(k, p);
        DenseVector rs(k);
        for (int i = 0; i < k; ++i) {
            as.row(i) = a.row(idx[static_cast<std::size_t>(i)]);
            rs(i) = rhs(idx[static_cast<std::size_t>(i)]);
        }
        const DenseMatrix gram = as * as.transpose();
        Eigen::FullPivLU<DenseMatrix> lu(gram);
        lu.setThreshold(1e-12);
        if (lu.rank() < k) return;
        const DenseVector lambda = lu.solve(as * origin - rs);
        if ((lambda.array() < -1e-9 * (1.0 + lambda.cwiseAbs().maxCoeff())).any()) return;
        const DenseVector x = origin - as.transpose() * lambda;
        if (!feasible(x)) return;
        const double d2 = (x - origin).squaredNorm();
        if (d2 < best) {
            best = d2;
            best_x = x;
        }
    };
    std::function<void(int, int)> combos = [&](int start, int need) {
        if (need == 0) {
            evaluate();
            return;
        }
        for (int i = start; i + need <= m; ++i) {
            idx.push_back(i);
            combos(i + 1, need - 1);
            idx.pop_back();
        }
    };
    for (int k = 1; k <= p; ++k) combos(0, k);
    if (!std::isfinite(best)) return std::nullopt;
    return std::make_pair(best_x, std::sqrt(best));
}

// Pulls x toward a strictly feasible anchor until every row holds.
DenseVector clip_to_feasible(const DenseVector& x, const DenseVector& anchor,
                             const DenseMatrix& a, const DenseVector& rhs) {
    const DenseVector rx = a * x - rhs;
    if (rx.maxCoeff() <= 0.0) return x;
    const DenseVector ra = a * anchor - rhs;
    double alpha = 0.0;
    for (Eigen::Index i = 0; i < rx.size(); ++i) {
        if (rx(i) <= 0.0) continue;
        const double denom = rx(i) - ra(i);
        if (denom <= 0.0) return anchor;  // degenerate row, bail out safely
        alpha = std::max(alpha, rx(i) / denom);
    }
    alpha = std::min(1.0, alpha * (1.0 + 1e-12) + 1e-15);
    return x + alpha * (anchor - x);
}

std::optional<std::pair<DenseVector, double>> min_norm_l2(const ConstraintSystem& system,
                                                          const DenseVector& origin,
                                                          const Tolerances& tol) {
    const LeForm form = to_le_form(system, tol);
    if (form.trivially_infeasible) return std::nullopt;
    if (form.a.rows() == 0) return std::make_pair(origin, 0.0);
    const FeasibilityResult feas = solve_feasibility(system, tol);
    if (!feas.feasible()) return std::nullopt;
    if ((form.a * origin - form.rhs).maxCoeff() <= 0.0) return std::make_pair(origin, 0.0);

    // The gap certificate needs an anchor strictly inside every row. When the
    // feasible set is too thin for one, relax each row just enough that the
    // phase-I witness becomes strictly interior; the relaxation shifts the
    // optimum by far less than the certified gap.
    DenseVector anchor;
    DenseVector rhs = form.rhs;
    const FeasibilityResult center = interior_point(system, tol);
    const DenseVector probe = center.feasible() ? *center.witness : *feas.witness;
    if (((form.a * probe - form.rhs).array() <= -1e-12).all()) {
        anchor = probe;
    } else {
        anchor = *feas.witness;
        for (Eigen::Index i = 0; i < rhs.size(); ++i)
            rhs(i) += 1e-9 * (1.0 + std::abs(rhs(i)));
    }

    // Dual of min 1/2||x - origin||^2 s.t. Ax <= b over lambda >= 0, solved
    // by accelerated projected gradient; a primal feasible point clipped
    // toward the anchor certifies the duality gap.
    const DenseMatrix& a = form.a;
    const DenseMatrix gram = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eigs(gram);
    const double lip = std::max(eigs.eigenvalues().maxCoeff(), 1e-12);
    const DenseVector lin = a * origin - rhs;

    DenseVector lambda = DenseVector::Zero(a.rows());
    DenseVector momentum = lambda;
    double tk = 1.0;
    DenseVector best_point = anchor;
    double best_f = 0.5 * (anchor - origin).squaredNorm();
    double gap = kInf;
    const long max_iters = 200000;
    for (long iter = 0; iter < max_iters; ++iter) {
        const DenseVector grad = lin - gram * momentum;
        DenseVector next = (momentum + grad / lip).cwiseMax(0.0);
        const double tk_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        momentum = next + ((tk - 1.0) / tk_next) * (next - lambda);
        lambda = std::move(next);
        tk = tk_next;
        if (iter % 32 == 31 || iter == max_iters - 1) {
            const DenseVector x = origin - a.transpose() * lambda;
            const DenseVector xf = clip_to_feasible(x, anchor, a, rhs);
            const double f = 0.5 * (xf - origin).squaredNorm();
            if (f < best_f) {
                best_f = f;
                best_point = xf;
            }
            const double dual = lin.dot(lambda) - 0.5 * lambda.dot(gram * lambda);
            gap = best_f - dual;
            if (gap <= std::max(1e-14, 1e-9 * (1.0 + best_f))) break;
        }
    }
    if (!(gap <= 1e-9 * (1.0 + best_f))) {
        // Ill-conditioned wedges defeat the first-order dual; fall back to
        // the exact active-set projection when the subset budget allows.
        const auto exact = project_by_active_sets(a, rhs, origin);
        if (!exact)
            throw SolverStallError("L2 projection failed to certify a small duality gap");
        return exact;
    }
    return std::make_pair(best_point, (best_point - origin).norm());
}

}  // namespace

std::optional<std::pair<DenseVector, double>> min_norm_point(const ConstraintSystem& system,
                                                             const DenseVector& origin,
                                                             Norm norm,
                                                             const Tolerances& tol) {
    if (origin.size() != system.dimension)
        throw InvalidInputError("min_norm_point: origin dimension mismatch");
    if (norm == Norm::L2) return min_norm_l2(system, origin, tol);
    return min_norm_lp(system, origin, norm, tol);
}

std::optional<std::pair<DenseVector, double>> counterfactual_in_polytope(
    const Polytope& poly, const LocalLinearModel& model, const ConstraintSystem& scope_rows,
    int origin_class, int target_class, const CounterfactualSpec& spec,
    const Tolerances& tol) {
    ConstraintSystem sys = poly.system;
    sys.append(scope_rows);
    if (model.weights.rows() == 1) {
        // Cross the binary threshold, strictly, away from the origin class.
        sys.add({model.weights.row(0).transpose(), model.bias(0) - spec.gamma,
                 origin_class == 1 ? Sense::LessEqual : Sense::GreaterEqual,
                 Strictness::Open});
    } else {
        sys.append(class_region(model, target_class));
    }
    return min_norm_point(sys, spec.origin, spec.norm, tol);
}

CounterfactualResult counterfactual(const ReluNetwork& net, const CounterfactualSpec& spec,
                                    const VerifierOptions& opts) {
    const int p = net.input_dim();
    if (spec.origin.size() != p)
        throw InvalidInputError("counterfactual: origin dimension mismatch");
    const DenseVector o0 = forward(net, spec.origin);
    const int q = net.output_dim();
    const int origin_class = q == 1 ? (o0(0) >= spec.gamma ? 1 : 0) : argmax_class(o0);

    BoundedRegion base = BoundedRegion::sentinel_box(p, opts.tolerances.sentinel_half_width);
    if (spec.clip) base = BoundedRegion::intersection({base, *spec.clip});

    struct Incumbent {
        DenseVector point;
        double distance = kInf;
        int achieved = -1;
        ActivationCode code;
    } best;
    ConstraintSystem scope_rows = base.constraints();
    BoundedRegion current = base;
    std::vector<ActivationCode> visited;
    // The dynamic ball keeps this much slack beyond the incumbent so cells
    // whose optimum ties d* on a shared face remain visitable; the final
    // minimum is taken over all visited cells below.
    const double shrink_slack = 1e-5;

    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        visited.push_back(poly.code);
        bool improved = false;
        if (q == 1) {
            const auto hit = counterfactual_in_polytope(poly, model, scope_rows,
                                                        origin_class, 1 - origin_class,
                                                        spec, opts.tolerances);
            if (hit && hit->second < best.distance - 1e-12) {
                best = {hit->first, hit->second, 1 - origin_class, poly.code};
                improved = true;
            }
        } else {
            for (int target = 0; target < q; ++target) {
                if (target == origin_class) continue;
                const auto hit = counterfactual_in_polytope(poly, model, scope_rows,
                                                            origin_class, target, spec,
                                                            opts.tolerances);
                if (hit && hit->second < best.distance - 1e-12) {
                    best = {hit->first, hit->second, target, poly.code};
                    improved = true;
                }
            }
        }
        if (!improved) return VisitOutcome::proceed();
        // Tighten the traversing region: no point outside the L-inf ball of
        // radius d* can beat the incumbent in any of the supported norms.
        current = BoundedRegion::intersection(
            {BoundedRegion::linf_ball(spec.origin, best.distance + shrink_slack),
             current});
        scope_rows = current.constraints();
        return VisitOutcome::shrink(current);
    };

    const TraversalResult tr =
        traverse_with_shrinking(net, spec.origin, opts.traversal_config(base), visitor);

    CounterfactualResult result;
    result.stats = tr.stats;
    if (best.achieved < 0) {
        result.status = tr.stats.truncated ? CounterfactualStatus::Truncated
                                           : CounterfactualStatus::NoneFound;
        return result;
    }
    // Canonical pass: re-solve every visited cell against the base region so
    // the reported optimum neither depends on the shrink history nor loses a
    // tie on a shared face to float noise.
    const ConstraintSystem base_rows = base.constraints();
    const Incumbent incumbent = best;
    best.distance = kInf;
    for (const ActivationCode& code : visited) {
        const Polytope poly = polytope_from_code(net, code);
        const LocalLinearModel model = local_linear_model(net, code);
        for (int target = 0; target < std::max(q, 2); ++target) {
            if (target == origin_class) continue;
            if (q == 1 && target != 1 - origin_class) continue;
            const auto hit = counterfactual_in_polytope(poly, model, base_rows,
                                                        origin_class, target, spec,
                                                        opts.tolerances);
            if (hit && hit->second < best.distance)
                best = {hit->first, hit->second, target, code};
        }
    }
    if (!std::isfinite(best.distance)) best = incumbent;
    result.status =
        tr.stats.truncated ? CounterfactualStatus::Truncated : CounterfactualStatus::Found;
    result.point = best.point;
    result.distance = best.distance;
    result.achieved_class = best.achieved;
    result.code = best.code;
    return result;
}

// ---------------------------------------------------------------------------
// Monotonicity
// ---------------------------------------------------------------------------

bool MonotonicityReport::consistent_with_claim() const {
    switch (verdict) {
        case MonotoneVerdict::Constant:
            return true;
        case MonotoneVerdict::NonDecreasing:
            return claimed != Direction::Decreasing;
        case MonotoneVerdict::NonIncreasing:
            return claimed != Direction::Increasing;
        default:
            return false;
    }
}

MonotonicityReport monotonicity(const ReluNetwork& net, const BoundedRegion& region,
                                int feature, Direction claimed,
                                const VerifierOptions& opts) {
    if (net.output_dim() != 1)
        throw InvalidInputError("monotonicity needs a single-output network");
    if (feature < 0 || feature >= net.input_dim())
        throw InvalidInputError("monotonicity: feature index out of range");

    MonotonicityReport report;
    report.feature = feature;
    report.claimed = claimed;
    bool seen_pos = false, seen_neg = false;
    int first_sign = 0;
    std::vector<std::pair<ActivationCode, double>> negatives, positives;

    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        const double coeff = model.weights(0, feature);
        if (coeff > opts.tolerances.numeric) {
            seen_pos = true;
            if (first_sign == 0) first_sign = 1;
            positives.emplace_back(poly.code, coeff);
        } else if (coeff < -opts.tolerances.numeric) {
            seen_neg = true;
            if (first_sign == 0) first_sign = -1;
            negatives.emplace_back(poly.code, coeff);
        }
        return VisitOutcome::proceed();
    };

    const TraversalResult tr =
        traverse(net, region.nominal_interior_point(opts.tolerances),
                 opts.traversal_config(region), visitor);
    report.stats = tr.stats;
    if (tr.stats.truncated) {
        report.verdict = MonotoneVerdict::Truncated;
        return report;
    }
    if (seen_pos && seen_neg)
        report.verdict = MonotoneVerdict::Violated;
    else if (seen_pos)
        report.verdict = MonotoneVerdict::NonDecreasing;
    else if (seen_neg)
        report.verdict = MonotoneVerdict::NonIncreasing;
    else
        report.verdict = MonotoneVerdict::Constant;

    switch (claimed) {
        case Direction::Increasing:
            report.violations = std::move(negatives);
            break;
        case Direction::Decreasing:
            report.violations = std::move(positives);
            break;
        case Direction::Any:
            if (report.verdict == MonotoneVerdict::Violated)
                report.violations = first_sign > 0 ? std::move(negatives)
                                                   : std::move(positives);
            break;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Linear output properties
// ---------------------------------------------------------------------------

Verdict verify_output_property(const ReluNetwork& net, const BoundedRegion& region,
                               const PropertySpec& spec, const VerifierOptions& opts) {
    if (spec.inequalities.empty())
        throw InvalidInputError("property spec has no inequalities");
    for (const auto& ineq : spec.inequalities)
        if (ineq.a.size() != net.output_dim())
            throw InvalidInputError("property inequality dimension must match outputs");
    const ConstraintSystem region_rows = region.constraints();

    Verdict verdict;
    verdict.worst_margin = -kInf;
    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        const ConstraintSystem sys = with_region(poly.system, region_rows);
        for (std::size_t k = 0; k < spec.inequalities.size(); ++k) {
            const auto& ineq = spec.inequalities[k];
            const DenseVector objective = model.weights.transpose() * ineq.a;
            const double shift = ineq.a.dot(model.bias) + ineq.beta;
            const LpSolution sol =
                optimize_linear(objective, Objective::Maximize, sys, opts.tolerances);
            if (sol.status != LpStatus::Optimal) continue;
            const double violation = *sol.value + shift;
            verdict.worst_margin = std::max(verdict.worst_margin, violation);
            if (violation >= opts.tolerances.interior_margin) {
                verdict.status = VerdictStatus::Violated;
                verdict.witness = sol.argopt;
                verdict.witness_code = poly.code;
                verdict.witness_class = static_cast<int>(k);
                return VisitOutcome::stop();
            }
        }
        return VisitOutcome::proceed();
    };

    const TraversalResult tr =
        traverse(net, region.nominal_interior_point(opts.tolerances),
                 opts.traversal_config(region), visitor);
    verdict.stats = tr.stats;
    if (verdict.status != VerdictStatus::Violated)
        verdict.status =
            tr.stats.truncated ? VerdictStatus::Truncated : VerdictStatus::Verified;
    return verdict;
}

}  // namespace polytraverse
