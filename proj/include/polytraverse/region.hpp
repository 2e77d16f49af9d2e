// Closed convex traversing regions: boxes, L-infinity balls, halfspace
// intersections, and intersections of other regions. Every region converts
// to a finite ConstraintSystem, which is how the rest of the library
// consumes it.
#pragma once

#include <json.hpp>
#include <optional>
#include <utility>
#include <vector>

#include "polytraverse/constraint.hpp"

namespace polytraverse {

class BoundedRegion {
public:
    enum class Kind { Box, LinfBall, Halfspaces, Intersection };

    static BoundedRegion box(DenseVector lower, DenseVector upper);
    static BoundedRegion linf_ball(DenseVector center, double radius);
    static BoundedRegion halfspaces(int dimension, std::vector<LinearConstraint> rows);
    static BoundedRegion intersection(std::vector<BoundedRegion> parts);
    // Stand-in for R^P: the +/- sentinel_half_width box.
    static BoundedRegion sentinel_box(int dimension, double half_width = Tolerances{}.sentinel_half_width);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }

    const DenseVector& lower() const;
    const DenseVector& upper() const;
    const DenseVector& center() const;
    double radius() const;
    const std::vector<LinearConstraint>& rows() const;
    const std::vector<BoundedRegion>& parts() const;

    ConstraintSystem constraints() const;
    bool contains(const DenseVector& x, double slack_tol = Tolerances{}.numeric) const;

    // Tightest per-coordinate bounds derivable without LP: boxes and balls
    // directly, intersections by combining their parts. Halfspace regions
    // yield nothing.
    std::optional<std::pair<DenseVector, DenseVector>> bounding_box() const;

    // Deterministic point inside the region: box/ball center, Chebyshev
    // center for halfspace regions. Throws InvalidInputError when empty.
    DenseVector nominal_interior_point(const Tolerances& tol = {}) const;

    nlohmann::ordered_json to_json() const;
    static BoundedRegion from_json(const nlohmann::json& j);

private:
    BoundedRegion() = default;

    Kind kind_ = Kind::Box;
    int dimension_ = 0;
    DenseVector lower_, upper_;     // Box
    DenseVector center_;            // LinfBall
    double radius_ = 0.0;           // LinfBall
    std::vector<LinearConstraint> rows_;  // Halfspaces
    std::vector<BoundedRegion> parts_;    // Intersection
};

}  // namespace polytraverse
