// ReLU network representation, forward evaluation, activation encoding and
// the recursive extraction of per-polytope linear coefficients.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polytraverse/linalg.hpp"

namespace polytraverse {

struct LayerSpec {
    DenseMatrix weights;  // fan_out x fan_in
    DenseVector bias;     // fan_out

    LayerSpec() = default;
    LayerSpec(DenseMatrix w, DenseVector b);

    int fan_in() const { return static_cast<int>(weights.cols()); }
    int fan_out() const { return static_cast<int>(weights.rows()); }
};

// Per-feature affine input normalization: the network consumes
// (x - mean) / scale.
struct InputNormalization {
    DenseVector mean;
    DenseVector scale;
};

struct InputBounds {
    DenseVector lower;
    DenseVector upper;
};

class ReluNetwork {
public:
    ReluNetwork(std::vector<LayerSpec> hidden, LayerSpec output, int input_dim,
                std::optional<InputNormalization> normalization = {},
                std::optional<InputBounds> input_bounds = {},
                std::optional<std::vector<std::string>> labels = {});

    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_.fan_out(); }
    int depth() const { return static_cast<int>(hidden_.size()); }
    int layer_width(int level) const;  // level in [1, depth()]

    const std::vector<LayerSpec>& hidden() const { return hidden_; }
    const LayerSpec& hidden_layer(int level) const;
    const LayerSpec& output_layer() const { return output_; }
    const std::optional<InputNormalization>& normalization() const { return normalization_; }
    const std::optional<InputBounds>& input_bounds() const { return input_bounds_; }
    const std::optional<std::vector<std::string>>& labels() const { return labels_; }

    // First hidden layer with the input normalization folded in, so that all
    // polytope geometry lives in raw input coordinates.
    const LayerSpec& folded_first_layer() const { return folded_first_; }

    bool operator==(const ReluNetwork& other) const;

private:
    std::vector<LayerSpec> hidden_;
    LayerSpec output_;
    int input_dim_;
    std::optional<InputNormalization> normalization_;
    std::optional<InputBounds> input_bounds_;
    std::optional<std::vector<std::string>> labels_;
    LayerSpec folded_first_;
};

// Hierarchical activation code: one bit vector per hidden level, bit 1 marks
// an active (>= 0 pre-activation) neuron. Equality and hashing are bitwise.
struct ActivationCode {
    std::vector<std::vector<std::uint8_t>> levels;

    int level_count() const { return static_cast<int>(levels.size()); }
    bool operator==(const ActivationCode&) const = default;

    ActivationCode prefix(int level_count) const;
    ActivationCode with_appended(std::vector<std::uint8_t> segment) const;
    ActivationCode with_flipped_bit(int level_index, int bit) const;

    std::string to_string() const;  // e.g. "10|011"
    static ActivationCode parse(const std::string& text);
};

struct ActivationCodeHash {
    std::size_t operator()(const ActivationCode& code) const;
};

// Effective level-l coefficients: pre-activations at level l are
// effective_weights * x + effective_bias for every x in the level-(l-1)
// polytope the code prefix names. The masked pair has the rows of inactive
// neurons zeroed and is present only when the code covers the level itself.
struct LevelCoefficients {
    int level = 0;
    DenseMatrix effective_weights;
    DenseVector effective_bias;
    std::optional<DenseMatrix> masked_weights;
    std::optional<DenseVector> masked_bias;
};

struct LocalLinearModel {
    DenseMatrix weights;  // Q x P
    DenseVector bias;     // Q
};

enum class NetworkFormat { Json, Nnet };

ReluNetwork load_network(std::istream& in, NetworkFormat format);
ReluNetwork load_network_file(const std::string& path);  // format by extension
void save_network(const ReluNetwork& net, std::ostream& out, NetworkFormat format);
void save_network_file(const ReluNetwork& net, const std::string& path);

DenseVector forward(const ReluNetwork& net, const DenseVector& x);

// Activation code of x down to `up_to_level` (default: all hidden levels).
// A pre-activation of exactly zero encodes as bit 1.
ActivationCode encode(const ReluNetwork& net, const DenseVector& x, int up_to_level = -1);

LevelCoefficients level_coefficients(const ReluNetwork& net, const ActivationCode& code,
                                     int level);

LocalLinearModel local_linear_model(const ReluNetwork& net, const ActivationCode& code);

// Incremental forms used by the traversal engine to avoid re-deriving whole
// coefficient chains.
LevelCoefficients first_level_coefficients(const ReluNetwork& net);
void apply_mask(LevelCoefficients& coeffs, const std::vector<std::uint8_t>& bits);
LevelCoefficients next_level_coefficients(const ReluNetwork& net,
                                          const LevelCoefficients& masked_prev);
LocalLinearModel model_from_masked(const ReluNetwork& net,
                                   const LevelCoefficients& masked_last);

}  // namespace polytraverse
