// Linear inequality constraints and systems of them.
//
// A LinearConstraint encodes   normal . x + offset  <=  0   (sense LessEqual)
// or                           normal . x + offset  >=  0   (sense GreaterEqual).
// "Open" strictness marks a strict inequality; the LP layer realizes it as
// the closed inequality with an interior margin.
#pragma once

#include <cstddef>
#include <vector>

#include "polytraverse/linalg.hpp"
#include "polytraverse/tolerances.hpp"

namespace polytraverse {

enum class Sense { LessEqual, GreaterEqual };
enum class Strictness { Closed, Open };

struct LinearConstraint {
    DenseVector normal;
    double offset = 0.0;
    Sense sense = Sense::LessEqual;
    Strictness strictness = Strictness::Closed;

    LinearConstraint() = default;
    LinearConstraint(DenseVector n, double off, Sense s,
                     Strictness strict = Strictness::Closed)
        : normal(std::move(n)), offset(off), sense(s), strictness(strict) {
        require_finite(normal, "constraint normal");
        if (!std::isfinite(offset))
            throw InvalidInputError("constraint offset: non-finite");
    }

    // A trivial constraint has an identically zero normal; it is satisfied or
    // violated purely by its offset.
    bool trivial() const { return normal.size() == 0 || normal.isZero(0.0); }

    double evaluate(const DenseVector& x) const { return normal.dot(x) + offset; }

    // Signed slack: >= 0 means satisfied as a closed inequality, and the
    // magnitude is the (unnormalized) distance to violation.
    double slack(const DenseVector& x) const {
        const double v = evaluate(x);
        return sense == Sense::LessEqual ? -v : v;
    }

    bool satisfied(const DenseVector& x, const Tolerances& tol = {}) const {
        const double need =
            strictness == Strictness::Open ? tol.interior_margin - tol.numeric : -tol.numeric;
        return slack(x) >= need;
    }

    LinearConstraint flipped() const {
        LinearConstraint c = *this;
        c.sense = sense == Sense::LessEqual ? Sense::GreaterEqual : Sense::LessEqual;
        return c;
    }
};

struct ConstraintSystem {
    int dimension = 0;
    std::vector<LinearConstraint> constraints;

    ConstraintSystem() = default;
    explicit ConstraintSystem(int dim) : dimension(dim) {
        if (dim < 0)
            throw InvalidInputError("constraint system dimension must be >= 0");
    }

    std::size_t size() const { return constraints.size(); }
    bool empty() const { return constraints.empty(); }

    void add(LinearConstraint c) {
        if (c.normal.size() != dimension)
            throw InvalidInputError("constraint dimension mismatch");
        constraints.push_back(std::move(c));
    }

    void append(const ConstraintSystem& other) {
        if (other.dimension != dimension)
            throw InvalidInputError("constraint system dimension mismatch");
        constraints.insert(constraints.end(), other.constraints.begin(),
                           other.constraints.end());
    }

    bool satisfied(const DenseVector& x, const Tolerances& tol = {}) const {
        for (const auto& c : constraints)
            if (!c.satisfied(x, tol)) return false;
        return true;
    }
};

}  // namespace polytraverse
