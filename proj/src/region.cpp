#include "polytraverse/region.hpp"

#include "polytraverse/lp.hpp"

namespace polytraverse {

BoundedRegion BoundedRegion::box(DenseVector lower, DenseVector upper) {
    require_finite(lower, "box lower");
    require_finite(upper, "box upper");
    if (lower.size() != upper.size() || lower.size() == 0)
        throw InvalidInputError("box bounds must share a positive dimension");
    if ((lower.array() > upper.array()).any())
        throw InvalidInputError("box lower bound exceeds upper bound");
    BoundedRegion r;
    r.kind_ = Kind::Box;
    r.dimension_ = static_cast<int>(lower.size());
    r.lower_ = std::move(lower);
    r.upper_ = std::move(upper);
    return r;
}

BoundedRegion BoundedRegion::linf_ball(DenseVector center, double radius) {
    require_finite(center, "ball center");
    if (center.size() == 0) throw InvalidInputError("ball center must be non-empty");
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw InvalidInputError("ball radius must be finite and non-negative");
    BoundedRegion r;
    r.kind_ = Kind::LinfBall;
    r.dimension_ = static_cast<int>(center.size());
    r.center_ = std::move(center);
    r.radius_ = radius;
    return r;
}

BoundedRegion BoundedRegion::halfspaces(int dimension, std::vector<LinearConstraint> rows) {
    if (dimension < 1) throw InvalidInputError("halfspace region dimension must be >= 1");
    for (const auto& c : rows)
        if (c.normal.size() != dimension)
            throw InvalidInputError("halfspace row dimension mismatch");
    BoundedRegion r;
    r.kind_ = Kind::Halfspaces;
    r.dimension_ = dimension;
    r.rows_ = std::move(rows);
    return r;
}

BoundedRegion BoundedRegion::intersection(std::vector<BoundedRegion> parts) {
    if (parts.empty()) throw InvalidInputError("intersection needs at least one region");
    const int dim = parts.front().dimension();
    for (const auto& p : parts)
        if (p.dimension() != dim)
            throw InvalidInputError("intersection parts must share a dimension");
    BoundedRegion r;
    r.kind_ = Kind::Intersection;
    r.dimension_ = dim;
    r.parts_ = std::move(parts);
    return r;
}

BoundedRegion BoundedRegion::sentinel_box(int dimension, double half_width) {
    return box(DenseVector::Constant(dimension, -half_width),
               DenseVector::Constant(dimension, half_width));
}

const DenseVector& BoundedRegion::lower() const {
    if (kind_ != Kind::Box) throw InvalidInputError("region is not a box");
    return lower_;
}
const DenseVector& BoundedRegion::upper() const {
    if (kind_ != Kind::Box) throw InvalidInputError("region is not a box");
    return upper_;
}
const DenseVector& BoundedRegion::center() const {
    if (kind_ != Kind::LinfBall) throw InvalidInputError("region is not a ball");
    return center_;
}
double BoundedRegion::radius() const {
    if (kind_ != Kind::LinfBall) throw InvalidInputError("region is not a ball");
    return radius_;
}
const std::vector<LinearConstraint>& BoundedRegion::rows() const {
    if (kind_ != Kind::Halfspaces) throw InvalidInputError("region is not halfspaces");
    return rows_;
}
const std::vector<BoundedRegion>& BoundedRegion::parts() const {
    if (kind_ != Kind::Intersection) throw InvalidInputError("region is not an intersection");
    return parts_;
}

ConstraintSystem BoundedRegion::constraints() const {
    ConstraintSystem sys(dimension_);
    switch (kind_) {
        case Kind::Box:
            for (int j = 0; j < dimension_; ++j) {
                DenseVector lo = DenseVector::Zero(dimension_);
                lo(j) = -1.0;
                sys.add({std::move(lo), lower_(j), Sense::LessEqual});
                DenseVector hi = DenseVector::Zero(dimension_);
                hi(j) = 1.0;
                sys.add({std::move(hi), -upper_(j), Sense::LessEqual});
            }
            break;
        case Kind::LinfBall:
            for (int j = 0; j < dimension_; ++j) {
                DenseVector lo = DenseVector::Zero(dimension_);
                lo(j) = -1.0;
                sys.add({std::move(lo), center_(j) - radius_, Sense::LessEqual});
                DenseVector hi = DenseVector::Zero(dimension_);
                hi(j) = 1.0;
                sys.add({std::move(hi), -(center_(j) + radius_), Sense::LessEqual});
            }
            break;
        case Kind::Halfspaces:
            for (const auto& c : rows_) sys.add(c);
            break;
        case Kind::Intersection:
            for (const auto& p : parts_) sys.append(p.constraints());
            break;
    }
    return sys;
}

bool BoundedRegion::contains(const DenseVector& x, double slack_tol) const {
    if (x.size() != dimension_) return false;
    Tolerances tol;
    tol.numeric = slack_tol;
    return constraints().satisfied(x, tol);
}

DenseVector BoundedRegion::nominal_interior_point(const Tolerances& tol) const {
    switch (kind_) {
        case Kind::Box:
            return 0.5 * (lower_ + upper_);
        case Kind::LinfBall:
            return center_;
        case Kind::Halfspaces:
        case Kind::Intersection: {
            const FeasibilityResult r = interior_point(constraints(), tol);
            if (!r.feasible())
                throw InvalidInputError("region has no interior point");
            return *r.witness;
        }
    }
    throw InvalidInputError("unknown region kind");
}

std::optional<std::pair<DenseVector, DenseVector>> BoundedRegion::bounding_box() const {
    switch (kind_) {
        case Kind::Box:
            return std::make_pair(lower_, upper_);
        case Kind::LinfBall:
            return std::make_pair(DenseVector(center_.array() - radius_),
                                  DenseVector(center_.array() + radius_));
        case Kind::Halfspaces:
            return std::nullopt;
        case Kind::Intersection: {
            std::optional<std::pair<DenseVector, DenseVector>> acc;
            for (const auto& p : parts_) {
                const auto b = p.bounding_box();
                if (!b) continue;
                if (!acc) {
                    acc = b;
                } else {
                    acc->first = acc->first.cwiseMax(b->first);
                    acc->second = acc->second.cwiseMin(b->second);
                }
            }
            return acc;
        }
    }
    return std::nullopt;
}

nlohmann::ordered_json BoundedRegion::to_json() const {
    nlohmann::ordered_json j;
    auto vec = [](const DenseVector& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    switch (kind_) {
        case Kind::Box:
            j["type"] = "box";
            j["lower"] = vec(lower_);
            j["upper"] = vec(upper_);
            break;
        case Kind::LinfBall:
            j["type"] = "linf_ball";
            j["center"] = vec(center_);
            j["radius"] = radius_;
            break;
        case Kind::Halfspaces: {
            j["type"] = "halfspaces";
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& c : rows_) {
                nlohmann::ordered_json row;
                row["normal"] = vec(c.normal);
                row["offset"] = c.offset;
                row["sense"] = c.sense == Sense::LessEqual ? "le" : "ge";
                rows.push_back(row);
            }
            j["rows"] = rows;
            break;
        }
        case Kind::Intersection: {
            j["type"] = "intersection";
            nlohmann::ordered_json parts = nlohmann::ordered_json::array();
            for (const auto& p : parts_) parts.push_back(p.to_json());
            j["parts"] = parts;
            break;
        }
    }
    return j;
}

BoundedRegion BoundedRegion::from_json(const nlohmann::json& j) {
    auto vec = [](const nlohmann::json& a, const char* where) {
        if (!a.is_array()) throw ParseError(std::string("region json: ") + where + " must be an array");
        DenseVector v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number())
                throw ParseError(std::string("region json: ") + where + " entries must be numbers");
            v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
        }
        return v;
    };
    if (!j.is_object() || !j.contains("type"))
        throw ParseError("region json: missing type");
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "box") return box(vec(j.at("lower"), "lower"), vec(j.at("upper"), "upper"));
        if (type == "linf_ball")
            return linf_ball(vec(j.at("center"), "center"), j.at("radius").get<double>());
        if (type == "halfspaces") {
            std::vector<LinearConstraint> rows;
            int dim = -1;
            for (const auto& row : j.at("rows")) {
                DenseVector n = vec(row.at("normal"), "normal");
                const std::string sense = row.value("sense", "le");
                if (dim < 0) dim = static_cast<int>(n.size());
                rows.emplace_back(std::move(n), row.at("offset").get<double>(),
                                  sense == "ge" ? Sense::GreaterEqual : Sense::LessEqual);
            }
            if (dim < 0) throw ParseError("region json: halfspaces needs at least one row");
            return halfspaces(dim, std::move(rows));
        }
        if (type == "intersection") {
            std::vector<BoundedRegion> parts;
            for (const auto& pj : j.at("parts")) parts.push_back(from_json(pj));
            return intersection(std::move(parts));
        }
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("region json: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("region json: ") + e.what());
    }
    throw ParseError("region json: unknown type '" + type + "'");
}

}  // namespace polytraverse
