#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polytraverse/oracle.hpp"
#include "polytraverse/polytope.hpp"
#include "test_util.hpp"

using namespace polytraverse;
using namespace polytraverse::testutil;

namespace {

Polytope raw_polytope(ConstraintSystem sys) {
    Polytope p;
    p.system = std::move(sys);
    p.level = 0;
    return p;
}

}  // namespace

TEST_CASE("polytope construction follows the code direction convention") {
    const ReluNetwork net = identity_fixture();
    const Polytope poly = polytope_from_code(net, ActivationCode::parse("10"));
    REQUIRE(poly.system.size() == 2);
    // Bit 1: x1 >= 0; bit 0: x2 <= 0.
    CHECK(poly.system.constraints[0].sense == Sense::GreaterEqual);
    CHECK(poly.system.constraints[0].normal == vec({1, 0}));
    CHECK(poly.system.constraints[1].sense == Sense::LessEqual);
    CHECK(poly.system.constraints[1].normal == vec({0, 1}));

    const ReluNetwork deep = two_layer_fixture();
    const Polytope leaf = polytope_from_code(deep, ActivationCode::parse("1|1"));
    REQUIRE(leaf.system.size() == 2);
    CHECK(leaf.system.constraints[1].normal == vec({1, 0}));
    CHECK(leaf.system.constraints[1].offset == -0.5);
    CHECK(leaf.system.constraints[1].sense == Sense::GreaterEqual);
    CHECK(leaf.level == 2);
}

TEST_CASE("construction succeeds even for conflicting directions") {
    // x <= -1 and x >= 1 by hand: construction is not a feasibility query.
    ConstraintSystem sys(1);
    sys.add({vec({1}), 1.0, Sense::LessEqual});
    sys.add({vec({1}), -1.0, Sense::GreaterEqual});
    const Polytope poly = raw_polytope(sys);
    CHECK(poly.system.size() == 2);
    CHECK(is_empty(poly));
}

TEST_CASE("emptiness inside and outside a region") {
    const ReluNetwork net = identity_fixture();
    const Polytope quadrant = polytope_from_code(net, ActivationCode::parse("11"));
    CHECK_FALSE(is_empty(quadrant, BoundedRegion::box(vec({-1, -1}), vec({1, 1}))));
    CHECK(is_empty(quadrant, BoundedRegion::box(vec({-1, -1}), vec({-0.5, -0.5}))));
    CHECK_FALSE(is_empty(quadrant));
}

TEST_CASE("emptiness agrees with grid sampling on random nets") {
    std::mt19937_64 rng(37);
    const BoundedRegion region = BoundedRegion::box(vec({-1, -1}), vec({1, 1}));
    for (int trial = 0; trial < 25; ++trial) {
        RandomNetSpec spec;
        spec.widths = {4};
        const ReluNetwork net = random_network(rng, spec);
        const GridScanResult grid = grid_scan(net, region, 0.1);
        for (const ActivationCode& code : grid.codes) {
            // A sampled code must correspond to a non-empty polytope.
            CHECK_FALSE(is_empty(polytope_from_code(net, code), region));
        }
    }
}

TEST_CASE("redundancy by the flip test") {
    ConstraintSystem sys(1);
    sys.add({vec({1}), -1.0, Sense::LessEqual});  // x <= 1
    sys.add({vec({1}), -2.0, Sense::LessEqual});  // x <= 2
    const Polytope poly = raw_polytope(sys);
    CHECK(is_redundant(poly, 1));        // flip: {x <= 1, x >= 2} empty
    CHECK_FALSE(is_redundant(poly, 0));  // flip: {x >= 1, x <= 2} non-empty
    CHECK_THROWS_AS(is_redundant(poly, 5), InvalidInputError);
}

TEST_CASE("duplicated constraints escape the flip test") {
    // Documented gap: each copy is redundant by definition, but flipping one
    // still leaves a non-empty (zero-width closed) set only when the margin
    // does not apply; under the interior margin the flip is empty, yet we
    // keep the guarantee that matters: deletion must stay safe.
    ConstraintSystem sys(1);
    sys.add({vec({1}), 0.0, Sense::LessEqual});
    sys.add({vec({1}), 0.0, Sense::LessEqual});
    const Polytope poly = raw_polytope(sys);
    // Under the interior-margin policy the flipped duplicate is empty, so the
    // flip test reports it redundant; deleting it indeed leaves the set
    // unchanged, so the deletion guarantee still holds.
    CHECK(is_redundant(poly, 0) == is_redundant(poly, 1));
}

TEST_CASE("flip-test soundness: flagged constraints can be deleted") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    int flagged = 0;
    for (int trial = 0; trial < 60; ++trial) {
        ConstraintSystem sys(2);
        const int m = 3 + static_cast<int>(rng() % 4);
        for (int i = 0; i < m; ++i)
            sys.add({vec({g(rng), g(rng)}), g(rng) - 1.0, Sense::LessEqual});
        const Polytope poly = raw_polytope(sys);
        if (is_empty(poly)) continue;
        for (int idx = 0; idx < m; ++idx) {
            if (!is_redundant(poly, idx)) continue;
            ++flagged;
            ConstraintSystem reduced(2);
            for (int k = 0; k < m; ++k)
                if (k != idx) reduced.add(sys.constraints[static_cast<std::size_t>(k)]);
            // Deleting a flagged constraint leaves the feasible set unchanged
            // on a grid sample.
            for (int i = 0; i <= 60; ++i)
                for (int j = 0; j <= 60; ++j) {
                    const DenseVector x = vec({-3.0 + 0.1 * i, -3.0 + 0.1 * j});
                    CHECK(sys.satisfied(x) == reduced.satisfied(x));
                }
        }
    }
    CHECK(flagged > 5);
}

TEST_CASE("boundaries of the quadrant") {
    const ReluNetwork net = identity_fixture();
    const Polytope quadrant = polytope_from_code(net, ActivationCode::parse("11"));
    CHECK(boundaries(quadrant) == std::vector<int>{0, 1});
    // Region strictly inside the quadrant: no flips stay feasible.
    CHECK(boundaries(quadrant, BoundedRegion::box(vec({0.5, 0.5}), vec({1, 1}))).empty());
    // Empty polytope in region: invalid input.
    CHECK_THROWS_AS(
        boundaries(quadrant, BoundedRegion::box(vec({-1, -1}), vec({-0.5, -0.5}))),
        InvalidInputError);
}

TEST_CASE("boundaries agree with a grid oracle on random 2-D nets") {
    std::mt19937_64 rng(43);
    const BoundedRegion region = BoundedRegion::box(vec({-1, -1}), vec({1, 1}));
    for (int trial = 0; trial < 15; ++trial) {
        RandomNetSpec spec;
        spec.widths = {4};
        const ReluNetwork net = random_network(rng, spec);
        const DenseVector x = random_point(rng, 2, 0.9);
        const ActivationCode code = encode(net, x);
        const Polytope poly = polytope_from_code(net, code);
        if (is_empty(poly, region)) continue;
        const std::vector<int> b = boundaries(poly, region);
        // One-sided grid check: if some grid point carries the flipped code,
        // that flip must be a boundary.
        const GridScanResult grid = grid_scan(net, region, 0.05);
        for (int m = 0; m < 4; ++m) {
            const ActivationCode flipped = code.with_flipped_bit(0, m);
            if (grid.codes.contains(flipped))
                CHECK(std::find(b.begin(), b.end(), m) != b.end());
        }
    }
}

TEST_CASE("one-adjacent codes of the fixtures") {
    const ReluNetwork net = identity_fixture();
    const Polytope quadrant = polytope_from_code(net, ActivationCode::parse("11"));
    const auto neighbors = one_adjacent_codes(quadrant, PrescreenResult::all(2));
    REQUIRE(neighbors.size() == 2);
    CHECK(neighbors[0].to_string() == "01");
    CHECK(neighbors[1].to_string() == "10");

    const ReluNetwork deep = two_layer_fixture();
    const Polytope leaf = polytope_from_code(deep, ActivationCode::parse("1|1"));
    const auto level2 = one_adjacent_codes(leaf, PrescreenResult::all(1));
    REQUIRE(level2.size() == 1);
    CHECK(level2[0].to_string() == "1|0");

    for (const auto& n : neighbors) {
        int diff = 0;
        for (std::size_t i = 0; i < 2; ++i)
            diff += n.levels[0][i] != quadrant.code.levels[0][i];
        CHECK(diff == 1);
    }
}

TEST_CASE("flip symmetry of adjacency") {
    std::mt19937_64 rng(47);
    const BoundedRegion region = BoundedRegion::box(vec({-1, -1}), vec({1, 1}));
    for (int trial = 0; trial < 10; ++trial) {
        RandomNetSpec spec;
        spec.widths = {5};
        const ReluNetwork net = random_network(rng, spec);
        const DenseVector x = random_point(rng, 2, 0.9);
        const ActivationCode code = encode(net, x);
        const Polytope poly = polytope_from_code(net, code);
        if (is_empty(poly, region)) continue;
        for (const ActivationCode& other :
             one_adjacent_codes(poly, PrescreenResult::all(5), region)) {
            const Polytope neighbor = polytope_from_code(net, other);
            const auto back = one_adjacent_codes(neighbor, PrescreenResult::all(5), region);
            bool found = false;
            for (const auto& c : back) found = found || c == code;
            CHECK(found);
        }
    }
}

TEST_CASE("prescreen keeps exactly the cutting hyperplanes") {
    ConstraintSystem planes(2);
    planes.add({vec({1, 0}), 0.0, Sense::LessEqual});    // x1 = 0
    planes.add({vec({1, 0}), -1.5, Sense::LessEqual});   // x1 = 1.5
    planes.add({vec({0, 0}), 1.0, Sense::LessEqual});    // trivial
    const BoundedRegion box = BoundedRegion::box(vec({1, 1}), vec({2, 2}));
    const PrescreenResult r = prescreen(planes, box);
    CHECK(r.cutting == std::vector<int>{1});

    CHECK_THROWS_AS(
        prescreen(planes, BoundedRegion::halfspaces(
                              2, {LinearConstraint(vec({1, 0}), 1.0, Sense::LessEqual),
                                  LinearConstraint(vec({1, 0}), -2.0, Sense::GreaterEqual)})),
        InvalidInputError);
}

TEST_CASE("prescreen keeps every hyperplane separating visited code pairs") {
    // Soundness: if unscreened traversal visits two codes differing in bit m,
    // hyperplane m must survive pre-screening.
    std::mt19937_64 rng(149);
    const BoundedRegion region = BoundedRegion::box(vec({-0.5, -0.5}), vec({0.5, 0.5}));
    for (int trial = 0; trial < 15; ++trial) {
        RandomNetSpec spec;
        spec.widths = {6};
        const ReluNetwork net = random_network(rng, spec);
        const auto full = enumerate_bruteforce(net, region);
        ConstraintSystem planes(2);
        const LevelCoefficients lc = first_level_coefficients(net);
        for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m)
            planes.add({lc.effective_weights.row(m).transpose(), lc.effective_bias(m),
                        Sense::LessEqual});
        const PrescreenResult t = prescreen(planes, region);
        std::vector<ActivationCode> codes(full.codes.begin(), full.codes.end());
        for (std::size_t i = 0; i < codes.size(); ++i)
            for (std::size_t j = i + 1; j < codes.size(); ++j) {
                int diff = -1, count = 0;
                for (int m = 0; m < 6; ++m)
                    if (codes[i].levels[0][static_cast<std::size_t>(m)] !=
                        codes[j].levels[0][static_cast<std::size_t>(m)]) {
                        diff = m;
                        ++count;
                    }
                if (count != 1) continue;
                CHECK(std::find(t.cutting.begin(), t.cutting.end(), diff) !=
                      t.cutting.end());
            }
    }
}

TEST_CASE("prescreen indices ascend and are a subset of the row range") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> g(0.0, 1.0);
    const BoundedRegion box = BoundedRegion::box(vec({-0.4, -0.4}), vec({0.4, 0.4}));
    for (int trial = 0; trial < 20; ++trial) {
        ConstraintSystem planes(2);
        const int m = 6;
        for (int i = 0; i < m; ++i)
            planes.add({vec({g(rng), g(rng)}), g(rng), Sense::LessEqual});
        const PrescreenResult r = prescreen(planes, box);
        for (std::size_t i = 0; i < r.cutting.size(); ++i) {
            CHECK(r.cutting[i] >= 0);
            CHECK(r.cutting[i] < m);
            if (i > 0) CHECK(r.cutting[i] > r.cutting[i - 1]);
        }
    }
}
