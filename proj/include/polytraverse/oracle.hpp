// Independent brute-force baselines: exhaustive code enumeration and dense
// grid scanning. Correctness references only; no attention is paid to speed.
#pragma once

#include "polytraverse/polytope.hpp"
#include "polytraverse/traversal.hpp"

namespace polytraverse {

struct EnumerationResult {
    CodeSet codes;
    long lp_calls = 0;
};

// Checks every activation code against the region: flat for one hidden
// layer, depth-first with empty-prefix pruning for deeper networks. Ground
// truth for the traversal exhaustiveness checks. Guarded to networks with
// at most 24 neurons in total.
EnumerationResult enumerate_bruteforce(const ReluNetwork& net, const BoundedRegion& region,
                                       const Tolerances& tol = {});

struct GridScanResult {
    CodeSet codes;
    DenseVector min_values;  // per output
    DenseVector max_values;
    std::vector<DenseVector> argmin;  // per output
    std::vector<DenseVector> argmax;
    long points = 0;
};

// Evaluates forward/encode on a uniform grid over a box-like region
// (box or L-infinity ball), corners included. Guarded to 1e7 points.
GridScanResult grid_scan(const ReluNetwork& net, const BoundedRegion& region,
                         double resolution);

}  // namespace polytraverse
