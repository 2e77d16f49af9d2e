#include "polytraverse/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polytraverse {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-9;

}  // namespace

LeForm to_le_form(const ConstraintSystem& system, const Tolerances& tol) {
    const int p = system.dimension;
    std::vector<std::pair<DenseVector, double>> rows;
    rows.reserve(system.size());
    LeForm out;
    for (const auto& c : system.constraints) {
        DenseVector a = c.sense == Sense::LessEqual ? c.normal : DenseVector(-c.normal);
        double beta = c.sense == Sense::LessEqual ? -c.offset : c.offset;
        if (c.strictness == Strictness::Open) beta -= tol.interior_margin;
        if (c.trivial()) {
            if (beta < -tol.numeric) {
                out.trivially_infeasible = true;
                return out;
            }
            continue;
        }
        rows.emplace_back(std::move(a), beta);
    }
    out.a.resize(static_cast<Eigen::Index>(rows.size()), p);
    out.rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index i = 0; i < out.a.rows(); ++i) {
        out.a.row(i) = rows[static_cast<std::size_t>(i)].first.transpose();
        out.rhs(i) = rows[static_cast<std::size_t>(i)].second;
    }
    return out;
}

namespace {

// Dense tableau for  min c . y  s.t.  T y = rhs, y >= 0  with Bland's rule.
// Columns [0, n_real) are the split variables and slacks; artificial columns
// live at [n_real, n_total) and are only eligible during phase I.
class Tableau {
public:
    Tableau(const LeForm& rows)
        : m_(static_cast<int>(rows.a.rows())), p_(static_cast<int>(rows.a.cols())) {
        n_real_ = 2 * p_ + m_;
        // Count artificials: rows with negative rhs get their sign flipped,
        // which flips the slack and requires an artificial basis column.
        std::vector<bool> needs_art(static_cast<std::size_t>(m_));
        int n_art = 0;
        for (int i = 0; i < m_; ++i) {
            needs_art[static_cast<std::size_t>(i)] = rows.rhs(i) < 0;
            if (needs_art[static_cast<std::size_t>(i)]) ++n_art;
        }
        n_total_ = n_real_ + n_art;
        t_.setZero(m_, n_total_);
        rhs_.resize(m_);
        basis_.resize(static_cast<std::size_t>(m_));
        int art = n_real_;
        for (int i = 0; i < m_; ++i) {
            const double sign = needs_art[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
            t_.row(i).segment(0, p_) = sign * rows.a.row(i);
            t_.row(i).segment(p_, p_) = -sign * rows.a.row(i);
            t_(i, 2 * p_ + i) = sign;
            rhs_(i) = sign * rows.rhs(i);
            if (needs_art[static_cast<std::size_t>(i)]) {
                t_(i, art) = 1.0;
                basis_[static_cast<std::size_t>(i)] = art++;
            } else {
                basis_[static_cast<std::size_t>(i)] = 2 * p_ + i;
            }
        }
    }

    int rows() const { return m_; }
    int real_cols() const { return n_real_; }

    // Runs phase I. Returns the residual infeasibility (sum of artificials).
    double phase1() {
        DenseVector cost = DenseVector::Zero(n_total_);
        for (int j = n_real_; j < n_total_; ++j) cost(j) = 1.0;
        run(cost, n_total_);
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] >= n_real_) infeas += rhs_(i);
        return infeas;
    }

    // Pivots lingering artificials out of the basis; rows proved dependent are
    // neutralized so they can never perturb the solution again.
    void drop_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_real_) continue;
            int pc = -1;
            for (int j = 0; j < n_real_; ++j) {
                if (std::abs(t_(i, j)) > kPivotTol) {
                    pc = j;
                    break;
                }
            }
            if (pc >= 0) {
                pivot(i, pc);
            } else {
                t_.row(i).segment(0, n_real_).setZero();
                rhs_(i) = 0.0;
            }
        }
    }

    // Runs phase II on the given real-variable cost. Returns false when the
    // objective is unbounded below.
    bool phase2(const DenseVector& cost_real) {
        DenseVector cost = DenseVector::Zero(n_total_);
        cost.segment(0, n_real_) = cost_real;
        return run(cost, n_real_);
    }

    // Basic solution mapped back to the free variables x = u - v.
    DenseVector solution() const {
        DenseVector y = DenseVector::Zero(n_total_);
        for (int i = 0; i < m_; ++i) y(basis_[static_cast<std::size_t>(i)]) = rhs_(i);
        return y.segment(0, p_) - y.segment(p_, p_);
    }

private:
    void pivot(int pr, int pc) {
        const double piv = t_(pr, pc);
        t_.row(pr) /= piv;
        rhs_(pr) /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == pr) continue;
            const double f = t_(i, pc);
            if (f == 0.0) continue;
            t_.row(i) -= f * t_.row(pr);
            t_(i, pc) = 0.0;
            rhs_(i) -= f * rhs_(pr);
            if (rhs_(i) < 0.0 && rhs_(i) > -1e-12) rhs_(i) = 0.0;
        }
        basis_[static_cast<std::size_t>(pr)] = pc;
    }

    bool run(const DenseVector& cost, int eligible) {
        std::vector<bool> in_basis(static_cast<std::size_t>(n_total_), false);
        for (int b : basis_) in_basis[static_cast<std::size_t>(b)] = true;
        DenseVector red = cost;
        auto recompute_red = [&]() {
            red = cost;
            for (int i = 0; i < m_; ++i) {
                const double cb = cost(basis_[static_cast<std::size_t>(i)]);
                if (cb != 0.0) red -= cb * t_.row(i).transpose();
            }
        };
        recompute_red();

        const long max_iters = 10000 + 200L * (m_ + n_total_);
        for (long iter = 0; iter < max_iters; ++iter) {
            if (iter > 0 && iter % 64 == 0) recompute_red();
            // Bland: lowest-index improving column.
            int pc = -1;
            for (int j = 0; j < eligible; ++j) {
                if (!in_basis[static_cast<std::size_t>(j)] && red(j) < -kCostTol) {
                    pc = j;
                    break;
                }
            }
            if (pc < 0) return true;  // optimal
            // Bland ratio test: min ratio, ties to the lowest basis index.
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (t_(i, pc) <= kPivotTol) continue;
                const double ratio = rhs_(i) / t_(i, pc);
                if (ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 &&
                     (pr < 0 || basis_[static_cast<std::size_t>(i)] <
                                    basis_[static_cast<std::size_t>(pr)]))) {
                    best = std::min(best, ratio);
                    pr = i;
                }
            }
            if (pr < 0) return false;  // unbounded
            in_basis[static_cast<std::size_t>(basis_[static_cast<std::size_t>(pr)])] = false;
            in_basis[static_cast<std::size_t>(pc)] = true;
            const double leaving_red = red(pc);
            pivot(pr, pc);
            red -= leaving_red * t_.row(pr).transpose();
            red(pc) = 0.0;
        }
        throw SolverStallError("simplex iteration limit exceeded");
    }

    int m_;
    int p_;
    int n_real_ = 0;
    int n_total_ = 0;
    DenseMatrix t_;
    DenseVector rhs_;
    std::vector<int> basis_;
};

}  // namespace

FeasibilityResult solve_feasibility(const ConstraintSystem& system, const Tolerances& tol) {
    if (system.dimension < 1)
        throw InvalidInputError("solve_feasibility: dimension must be >= 1");
    const LeForm rows = to_le_form(system, tol);
    if (rows.trivially_infeasible) return {};
    if (rows.a.rows() == 0)
        return {Feasibility::Feasible, DenseVector::Zero(system.dimension)};
    Tableau tab(rows);
    if (tab.phase1() > kPhase1Tol) return {};
    return {Feasibility::Feasible, tab.solution()};
}

LpSolution optimize_linear(const DenseVector& objective, Objective direction,
                           const ConstraintSystem& system, const Tolerances& tol) {
    if (objective.size() != system.dimension)
        throw InvalidInputError("optimize_linear: objective dimension mismatch");
    require_finite(objective, "objective");
    const LeForm rows = to_le_form(system, tol);
    if (rows.trivially_infeasible) return {LpStatus::Infeasible, {}, {}};
    const DenseVector cost =
        direction == Objective::Minimize ? objective : DenseVector(-objective);
    if (rows.a.rows() == 0) {
        // No binding rows: any nonzero objective direction is unbounded.
        if (cost.isZero(0.0))
            return {LpStatus::Optimal, DenseVector::Zero(system.dimension), 0.0};
        return {LpStatus::Unbounded, {}, {}};
    }
    Tableau tab(rows);
    if (tab.phase1() > kPhase1Tol) return {LpStatus::Infeasible, {}, {}};
    tab.drop_artificials();
    DenseVector cost_real = DenseVector::Zero(tab.real_cols());
    cost_real.segment(0, objective.size()) = cost;
    cost_real.segment(objective.size(), objective.size()) = -cost;
    if (!tab.phase2(cost_real)) return {LpStatus::Unbounded, {}, {}};
    DenseVector x = tab.solution();
    return {LpStatus::Optimal, x, objective.dot(x)};
}

FeasibilityResult interior_point(const ConstraintSystem& system, const Tolerances& tol) {
    if (system.dimension < 1)
        throw InvalidInputError("interior_point: dimension must be >= 1");
    const int p = system.dimension;
    // Lift to (x, t) and maximize t with every non-trivial row demanding
    // slack t * ||normal||. Sentinel bounds keep x finite without taking part
    // in the slack objective.
    ConstraintSystem lifted(p + 1);
    int nontrivial = 0;
    for (const auto& c : system.constraints) {
        if (c.trivial()) {
            const double s = c.sense == Sense::LessEqual ? -c.offset : c.offset;
            if (s < -tol.numeric) return {};
            continue;
        }
        DenseVector n(p + 1);
        n.segment(0, p) = c.sense == Sense::LessEqual ? c.normal : DenseVector(-c.normal);
        n(p) = c.normal.norm();
        const double off = c.sense == Sense::LessEqual ? c.offset : -c.offset;
        lifted.add({std::move(n), off, Sense::LessEqual});
        ++nontrivial;
    }
    if (nontrivial == 0)
        throw InvalidInputError("interior_point: all constraints trivial");
    for (int j = 0; j < p; ++j) {
        DenseVector lo = DenseVector::Zero(p + 1);
        lo(j) = -1.0;
        lifted.add({std::move(lo), -tol.sentinel_half_width, Sense::LessEqual});
        DenseVector hi = DenseVector::Zero(p + 1);
        hi(j) = 1.0;
        lifted.add({std::move(hi), -tol.sentinel_half_width, Sense::LessEqual});
    }
    DenseVector obj = DenseVector::Zero(p + 1);
    obj(p) = 1.0;
    const LpSolution sol = optimize_linear(obj, Objective::Maximize, lifted, tol);
    if (sol.status != LpStatus::Optimal || !sol.value || *sol.value < tol.interior_margin)
        return {};
    return {Feasibility::Feasible, DenseVector(sol.argopt->segment(0, p))};
}

}  // namespace polytraverse
