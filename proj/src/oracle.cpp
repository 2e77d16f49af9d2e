#include "polytraverse/oracle.hpp"

#include <cmath>

namespace polytraverse {

namespace {

// Depth-first over level codes; a prefix whose polytope misses the region is
// pruned, which is safe because children only add constraints.
void enumerate_level(const ReluNetwork& net, const ConstraintSystem& region_rows,
                     const Tolerances& tol, int level, const ActivationCode& prefix,
                     const ConstraintSystem& prefix_rows,
                     const LevelCoefficients* masked_parent, EnumerationResult& out) {
    LevelCoefficients lc = level == 1 ? first_level_coefficients(net)
                                      : next_level_coefficients(net, *masked_parent);
    const int width = static_cast<int>(lc.effective_weights.rows());
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width), 0);
    for (long pattern = 0; pattern < (1L << width); ++pattern) {
        for (int m = 0; m < width; ++m)
            bits[static_cast<std::size_t>(m)] = (pattern >> m) & 1 ? 1 : 0;
        ConstraintSystem rows = prefix_rows;
        for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m)
            rows.add(detail::code_constraint(lc.effective_weights.row(m).transpose(),
                                             lc.effective_bias(m),
                                             bits[static_cast<std::size_t>(m)] != 0));
        if (!detail::check_with_margin(rows, &region_rows, tol, &out.lp_calls).feasible())
            continue;
        const ActivationCode code = prefix.with_appended(bits);
        if (level == net.depth()) {
            out.codes.insert(code);
        } else {
            LevelCoefficients masked = lc;
            apply_mask(masked, bits);
            enumerate_level(net, region_rows, tol, level + 1, code, rows, &masked, out);
        }
    }
}

}  // namespace

EnumerationResult enumerate_bruteforce(const ReluNetwork& net, const BoundedRegion& region,
                                       const Tolerances& tol) {
    long total_neurons = 0;
    for (int l = 1; l <= net.depth(); ++l) total_neurons += net.layer_width(l);
    if (total_neurons > 24)
        throw UnsupportedConfigError("enumerate_bruteforce: more than 24 neurons");
    if (region.dimension() != net.input_dim())
        throw InvalidInputError("enumerate_bruteforce: region dimension mismatch");
    EnumerationResult out;
    enumerate_level(net, region.constraints(), tol, 1, ActivationCode{},
                    ConstraintSystem(net.input_dim()), nullptr, out);
    return out;
}

GridScanResult grid_scan(const ReluNetwork& net, const BoundedRegion& region,
                         double resolution) {
    if (!(resolution > 0.0)) throw InvalidInputError("grid_scan: resolution must be > 0");
    if (region.dimension() != net.input_dim())
        throw InvalidInputError("grid_scan: region dimension mismatch");
    DenseVector lower, upper;
    if (region.kind() == BoundedRegion::Kind::Box) {
        lower = region.lower();
        upper = region.upper();
    } else if (region.kind() == BoundedRegion::Kind::LinfBall) {
        lower = region.center().array() - region.radius();
        upper = region.center().array() + region.radius();
    } else {
        throw UnsupportedConfigError("grid_scan: region must be a box or an L-inf ball");
    }
    const int p = net.input_dim();
    std::vector<long> steps(static_cast<std::size_t>(p));
    long total = 1;
    for (int j = 0; j < p; ++j) {
        steps[static_cast<std::size_t>(j)] =
            std::max<long>(1, std::lround((upper(j) - lower(j)) / resolution)) ;
        total *= steps[static_cast<std::size_t>(j)] + 1;
        if (total > 10'000'000L)
            throw UnsupportedConfigError("grid_scan: more than 1e7 grid points");
    }

    GridScanResult out;
    const int q = net.output_dim();
    out.min_values = DenseVector::Constant(q, std::numeric_limits<double>::infinity());
    out.max_values = DenseVector::Constant(q, -std::numeric_limits<double>::infinity());
    out.argmin.assign(static_cast<std::size_t>(q), DenseVector::Zero(p));
    out.argmax.assign(static_cast<std::size_t>(q), DenseVector::Zero(p));

    std::vector<long> idx(static_cast<std::size_t>(p), 0);
    DenseVector x(p);
    while (true) {
        for (int j = 0; j < p; ++j) {
            const long n = steps[static_cast<std::size_t>(j)];
            const long i = idx[static_cast<std::size_t>(j)];
            x(j) = i == n ? upper(j) : lower(j) + resolution * static_cast<double>(i);
        }
        ++out.points;
        out.codes.insert(encode(net, x));
        const DenseVector o = forward(net, x);
        for (int k = 0; k < q; ++k) {
            if (o(k) < out.min_values(k)) {
                out.min_values(k) = o(k);
                out.argmin[static_cast<std::size_t>(k)] = x;
            }
            if (o(k) > out.max_values(k)) {
                out.max_values(k) = o(k);
                out.argmax[static_cast<std::size_t>(k)] = x;
            }
        }
        int j = 0;
        while (j < p && ++idx[static_cast<std::size_t>(j)] >
                            steps[static_cast<std::size_t>(j)]) {
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == p) break;
    }
    return out;
}

}  // namespace polytraverse
