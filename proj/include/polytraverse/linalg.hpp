// Dense vector/matrix aliases and finiteness checks.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "polytraverse/errors.hpp"

namespace polytraverse {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

inline bool all_finite(const DenseVector& v) { return v.allFinite(); }
inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

inline void require_finite(const DenseVector& v, const std::string& what) {
    if (!v.allFinite())
        throw InvalidInputError(what + ": non-finite entry");
}

inline void require_finite(const DenseMatrix& m, const std::string& what) {
    if (!m.allFinite())
        throw InvalidInputError(what + ": non-finite entry");
}

}  // namespace polytraverse
