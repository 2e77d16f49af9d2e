#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "polytraverse/lp.hpp"
#include "polytraverse/network.hpp"
#include "polytraverse/polytope.hpp"
#include "test_util.hpp"

using namespace polytraverse;
using namespace polytraverse::testutil;

TEST_CASE("json identity fixture loads") {
    std::istringstream in(R"({
        "input_dim": 2,
        "hidden": [{"weights": [[1,0],[0,1]], "bias": [0,0]}],
        "output": {"weights": [[1,1]], "bias": [0]}
    })");
    const ReluNetwork net = load_network(in, NetworkFormat::Json);
    CHECK(net.input_dim() == 2);
    CHECK(net.depth() == 1);
    CHECK(net.layer_width(1) == 2);
    CHECK(net.output_dim() == 1);
    CHECK(net == identity_fixture());
}

TEST_CASE("json parse errors carry field context") {
    std::istringstream bad_dims(R"({
        "input_dim": 2,
        "hidden": [{"weights": [[1,0],[0,1,5]], "bias": [0,0]}],
        "output": {"weights": [[1,1]], "bias": [0]}
    })");
    CHECK_THROWS_WITH_AS(load_network(bad_dims, NetworkFormat::Json),
                         doctest::Contains("hidden[0]"), ParseError);

    std::istringstream nonfinite(R"({
        "input_dim": 1,
        "hidden": [{"weights": [[1e999]], "bias": [0]}],
        "output": {"weights": [[1]], "bias": [0]}
    })");
    CHECK_THROWS_AS(load_network(nonfinite, NetworkFormat::Json), ParseError);

    std::istringstream chain(R"({
        "input_dim": 3,
        "hidden": [{"weights": [[1,0],[0,1]], "bias": [0,0]}],
        "output": {"weights": [[1,1]], "bias": [0]}
    })");
    CHECK_THROWS_AS(load_network(chain, NetworkFormat::Json), ParseError);
}

TEST_CASE("nnet size mismatch is a parse error with a line number") {
    // Declares a 2-2-1 net but provides only one weight row for layer 1.
    std::istringstream in(
        "// header\n"
        "2,2,1,2,\n"
        "2,2,1,\n"
        "0,\n"
        "-1,-1,\n"
        "1,1,\n"
        "0,0,0,\n"
        "1,1,1,\n"
        "1,0,\n"
        "0,\n"
        "0,\n"
        "1,1,\n"
        "0,\n");
    CHECK_THROWS_WITH_AS(load_network(in, NetworkFormat::Nnet), doctest::Contains("line"),
                         ParseError);
}

TEST_CASE("save/load round-trips are bit exact") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        RandomNetSpec spec;
        spec.input_dim = 1 + static_cast<int>(rng() % 4);
        spec.widths = {1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 4)};
        spec.output_dim = 1 + static_cast<int>(rng() % 3);
        const ReluNetwork net = random_network(rng, spec);

        std::stringstream js;
        save_network(net, js, NetworkFormat::Json);
        CHECK(load_network(js, NetworkFormat::Json) == net);

        std::stringstream ns;
        save_network(net, ns, NetworkFormat::Nnet);
        CHECK(load_network(ns, NetworkFormat::Nnet) == net);
    }
}

TEST_CASE("nnet normalization and bounds survive a json round-trip") {
    std::istringstream in(
        "// acas style\n"
        "2,2,1,2,\n"
        "2,2,1,\n"
        "0,\n"
        "-1,-2,\n"
        "1,2,\n"
        "0.5,-0.5,3,\n"
        "2,4,2,\n"
        "1,0,\n"
        "0,1,\n"
        "0.25,\n"
        "-0.25,\n"
        "1,1,\n"
        "0.5,\n");
    const ReluNetwork net = load_network(in, NetworkFormat::Nnet);
    REQUIRE(net.normalization());
    CHECK(net.normalization()->mean(0) == 0.5);
    CHECK(net.normalization()->scale(1) == 4.0);
    REQUIRE(net.input_bounds());
    CHECK(net.input_bounds()->lower(1) == -2.0);
    // Output normalization (mean 3, range 2) folds into the output layer.
    CHECK(net.output_layer().weights(0, 0) == 2.0);
    CHECK(net.output_layer().bias(0) == 0.5 * 2.0 + 3.0);

    // Normalized evaluation: x=(1,2) -> x_norm=(0.25, 0.625).
    const DenseVector o = forward(net, vec({1, 2}));
    const double h1 = std::max(0.0, 0.25 + 0.25);
    const double h2 = std::max(0.0, 0.625 - 0.25);
    CHECK(o(0) == doctest::Approx(2.0 * (h1 + h2) + 0.5 * 2.0 + 3.0).epsilon(1e-12));

    std::stringstream js;
    save_network(net, js, NetworkFormat::Json);
    CHECK(load_network(js, NetworkFormat::Json) == net);
    std::stringstream ns;
    save_network(net, ns, NetworkFormat::Nnet);
    CHECK(load_network(ns, NetworkFormat::Nnet) == net);
}

TEST_CASE("forward on the identity fixture") {
    const ReluNetwork net = identity_fixture();
    CHECK(forward(net, vec({0.5, -0.5}))(0) == 0.5);
    CHECK(forward(net, vec({1, 1}))(0) == 2.0);
    CHECK_THROWS_AS(forward(net, vec({1})), InvalidInputError);
}

TEST_CASE("encode on the fixtures") {
    const ReluNetwork net = identity_fixture();
    const ActivationCode c = encode(net, vec({0.5, -0.5}));
    CHECK(c.to_string() == "10");

    const ReluNetwork deep = two_layer_fixture();
    CHECK(encode(deep, vec({0.7, 0})).to_string() == "1|1");
    CHECK(encode(deep, vec({0.2, 0})).to_string() == "1|0");
    CHECK(encode(deep, vec({-1, 0})).to_string() == "0|0");
    CHECK(encode(deep, vec({0.2, 0}), 1).to_string() == "1");

    // Tie on the hyperplane encodes as bit 1.
    CHECK(encode(net, vec({0.0, 0.3})).levels[0][0] == 1);
    CHECK_THROWS_AS(encode(net, vec({0, 0}), 2), InvalidInputError);
}

TEST_CASE("level coefficients follow the recursion") {
    const ReluNetwork deep = two_layer_fixture();

    const LevelCoefficients l1 = level_coefficients(deep, ActivationCode{}, 1);
    CHECK(l1.effective_weights == deep.hidden_layer(1).weights);
    CHECK(l1.effective_bias == deep.hidden_layer(1).bias);
    CHECK_FALSE(l1.masked_weights.has_value());

    ActivationCode on;
    on.levels = {{1}};
    const LevelCoefficients l2 = level_coefficients(deep, on, 2);
    CHECK(l2.effective_weights == mat({{1, 0}}));
    CHECK(l2.effective_bias(0) == -0.5);

    ActivationCode off;
    off.levels = {{0}};
    const LevelCoefficients dead = level_coefficients(deep, off, 2);
    CHECK(dead.effective_weights.isZero(0.0));
    CHECK(dead.effective_bias(0) == -0.5);

    CHECK_THROWS_AS(level_coefficients(deep, ActivationCode{}, 2), InvalidInputError);
}

TEST_CASE("masking zeroes inactive rows and is idempotent") {
    const ReluNetwork net = identity_fixture();
    LevelCoefficients lc = first_level_coefficients(net);
    apply_mask(lc, {1, 0});
    CHECK((*lc.masked_weights)(0, 0) == 1.0);
    CHECK(lc.masked_weights->row(1).isZero(0.0));
    LevelCoefficients once = lc;
    lc.effective_weights = *lc.masked_weights;
    lc.effective_bias = *lc.masked_bias;
    apply_mask(lc, {1, 0});
    CHECK(*lc.masked_weights == *once.masked_weights);
    CHECK(*lc.masked_bias == *once.masked_bias);
}

TEST_CASE("local linear model on the identity fixture") {
    const ReluNetwork net = identity_fixture();
    ActivationCode on;
    on.levels = {{1, 1}};
    const LocalLinearModel both = local_linear_model(net, on);
    CHECK(both.weights == mat({{1, 1}}));
    CHECK(both.bias(0) == 0.0);

    ActivationCode off;
    off.levels = {{0, 0}};
    const LocalLinearModel none = local_linear_model(net, off);
    CHECK(none.weights.isZero(0.0));
    CHECK(none.bias(0) == 0.0);

    ActivationCode partial;
    partial.levels = {{1}};
    CHECK_THROWS_AS(local_linear_model(identity_fixture(), partial), InvalidInputError);
}

TEST_CASE("activation code equality, hashing and parsing") {
    const ActivationCode a = ActivationCode::parse("10|011");
    CHECK(a.level_count() == 2);
    CHECK(a.to_string() == "10|011");
    const ActivationCode b = a.with_flipped_bit(1, 2);
    CHECK(b.to_string() == "10|010");
    CHECK(a != b);
    CHECK(ActivationCodeHash{}(a) != ActivationCodeHash{}(b));
    CHECK(a.prefix(1).to_string() == "10");
    CHECK_THROWS_AS(ActivationCode::parse("10|x"), ParseError);
}

TEST_CASE("forward equals the encoded local model on random networks") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        RandomNetSpec spec;
        spec.input_dim = 2 + static_cast<int>(rng() % 2);
        spec.widths = {2 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 3)};
        spec.output_dim = 1 + static_cast<int>(rng() % 3);
        const ReluNetwork net = random_network(rng, spec);
        for (int k = 0; k < 25; ++k) {
            const DenseVector x = random_point(rng, spec.input_dim, 2.0);
            const DenseVector direct = forward(net, x);
            const ActivationCode code = encode(net, x);
            const LocalLinearModel model = local_linear_model(net, code);
            const DenseVector via_model = model.weights * x + model.bias;
            const double tol = 1e-9 * (1.0 + direct.cwiseAbs().maxCoeff());
            CHECK((direct - via_model).cwiseAbs().maxCoeff() <= tol);
        }
    }
}

TEST_CASE("adjacent local models agree on the shared face") {
    std::mt19937_64 rng(31);
    int pairs_checked = 0;
    for (int trial = 0; trial < 40 && pairs_checked < 60; ++trial) {
        RandomNetSpec spec;
        spec.input_dim = 2;
        spec.widths = {3, 3};
        const ReluNetwork net = random_network(rng, spec);
        const DenseVector x = random_point(rng, 2, 1.0);
        const ActivationCode code = encode(net, x);
        const Polytope poly = polytope_from_code(net, code);
        const int last_width = static_cast<int>(code.levels.back().size());
        const int offset = static_cast<int>(poly.system.size()) - last_width;
        for (int m = 0; m < last_width; ++m) {
            const ActivationCode other = code.with_flipped_bit(code.level_count() - 1, m);
            // A point on the shared hyperplane, inside the closed polytope.
            // Copy the row: adding to the system reallocates its storage.
            ConstraintSystem face = poly.system;
            const LinearConstraint cut =
                face.constraints[static_cast<std::size_t>(offset + m)];
            if (cut.trivial()) continue;
            face.add({cut.normal, cut.offset, Sense::GreaterEqual});
            face.add({cut.normal, cut.offset, Sense::LessEqual});
            const FeasibilityResult fr = solve_feasibility(face);
            if (!fr.feasible()) continue;
            ++pairs_checked;
            const LocalLinearModel a = local_linear_model(net, code);
            const LocalLinearModel b = local_linear_model(net, other);
            const DenseVector ya = a.weights * *fr.witness + a.bias;
            const DenseVector yb = b.weights * *fr.witness + b.bias;
            CHECK((ya - yb).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    CHECK(pairs_checked >= 30);
}
