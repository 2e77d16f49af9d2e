#include "polytraverse/network.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace polytraverse {

LayerSpec::LayerSpec(DenseMatrix w, DenseVector b) : weights(std::move(w)), bias(std::move(b)) {
    require_finite(weights, "layer weights");
    require_finite(bias, "layer bias");
    if (weights.rows() != bias.size())
        throw InvalidInputError("layer weight rows must match bias length");
    if (weights.rows() < 1)
        throw InvalidInputError("layer must have at least one neuron");
}

namespace {

LayerSpec fold_normalization(const LayerSpec& first,
                             const std::optional<InputNormalization>& norm) {
    if (!norm) return first;
    DenseVector inv_scale = norm->scale.cwiseInverse();
    DenseMatrix w = first.weights * inv_scale.asDiagonal();
    DenseVector b = first.bias - w * norm->mean;
    return LayerSpec(std::move(w), std::move(b));
}

}  // namespace

ReluNetwork::ReluNetwork(std::vector<LayerSpec> hidden, LayerSpec output, int input_dim,
                         std::optional<InputNormalization> normalization,
                         std::optional<InputBounds> input_bounds,
                         std::optional<std::vector<std::string>> labels)
    : hidden_(std::move(hidden)),
      output_(std::move(output)),
      input_dim_(input_dim),
      normalization_(std::move(normalization)),
      input_bounds_(std::move(input_bounds)),
      labels_(std::move(labels)) {
    if (input_dim_ < 1) throw InvalidInputError("network input dimension must be >= 1");
    if (hidden_.empty()) throw InvalidInputError("network needs at least one hidden layer");
    int prev = input_dim_;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        if (hidden_[l].fan_in() != prev)
            throw InvalidInputError("hidden layer " + std::to_string(l + 1) +
                                    " fan-in does not chain");
        prev = hidden_[l].fan_out();
    }
    if (output_.fan_in() != prev)
        throw InvalidInputError("output layer fan-in does not chain");
    if (normalization_) {
        if (normalization_->mean.size() != input_dim_ ||
            normalization_->scale.size() != input_dim_)
            throw InvalidInputError("normalization length must match input dimension");
        require_finite(normalization_->mean, "normalization mean");
        require_finite(normalization_->scale, "normalization scale");
        for (int j = 0; j < input_dim_; ++j)
            if (normalization_->scale(j) == 0.0)
                throw InvalidInputError("normalization scale must be nonzero");
    }
    if (input_bounds_) {
        if (input_bounds_->lower.size() != input_dim_ ||
            input_bounds_->upper.size() != input_dim_)
            throw InvalidInputError("input bounds length must match input dimension");
        if ((input_bounds_->lower.array() > input_bounds_->upper.array()).any())
            throw InvalidInputError("input lower bound exceeds upper bound");
    }
    if (labels_ && static_cast<int>(labels_->size()) != output_.fan_out())
        throw InvalidInputError("label count must match output dimension");
    folded_first_ = fold_normalization(hidden_.front(), normalization_);
}

int ReluNetwork::layer_width(int level) const {
    if (level < 1 || level > depth())
        throw InvalidInputError("layer level out of range");
    return hidden_[static_cast<std::size_t>(level - 1)].fan_out();
}

const LayerSpec& ReluNetwork::hidden_layer(int level) const {
    if (level < 1 || level > depth())
        throw InvalidInputError("layer level out of range");
    return hidden_[static_cast<std::size_t>(level - 1)];
}

namespace {

bool same_matrix(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}
bool same_vector(const DenseVector& a, const DenseVector& b) {
    return a.size() == b.size() && a == b;
}

}  // namespace

bool ReluNetwork::operator==(const ReluNetwork& other) const {
    if (input_dim_ != other.input_dim_ || hidden_.size() != other.hidden_.size())
        return false;
    for (std::size_t l = 0; l < hidden_.size(); ++l)
        if (!same_matrix(hidden_[l].weights, other.hidden_[l].weights) ||
            !same_vector(hidden_[l].bias, other.hidden_[l].bias))
            return false;
    if (!same_matrix(output_.weights, other.output_.weights) ||
        !same_vector(output_.bias, other.output_.bias))
        return false;
    if (normalization_.has_value() != other.normalization_.has_value()) return false;
    if (normalization_ && (!same_vector(normalization_->mean, other.normalization_->mean) ||
                           !same_vector(normalization_->scale, other.normalization_->scale)))
        return false;
    if (input_bounds_.has_value() != other.input_bounds_.has_value()) return false;
    if (input_bounds_ && (!same_vector(input_bounds_->lower, other.input_bounds_->lower) ||
                          !same_vector(input_bounds_->upper, other.input_bounds_->upper)))
        return false;
    return labels_ == other.labels_;
}

ActivationCode ActivationCode::prefix(int level_count) const {
    if (level_count < 0 || level_count > this->level_count())
        throw InvalidInputError("code prefix length out of range");
    ActivationCode out;
    out.levels.assign(levels.begin(), levels.begin() + level_count);
    return out;
}

ActivationCode ActivationCode::with_appended(std::vector<std::uint8_t> segment) const {
    ActivationCode out = *this;
    out.levels.push_back(std::move(segment));
    return out;
}

ActivationCode ActivationCode::with_flipped_bit(int level_index, int bit) const {
    ActivationCode out = *this;
    auto& seg = out.levels.at(static_cast<std::size_t>(level_index));
    auto& b = seg.at(static_cast<std::size_t>(bit));
    b = static_cast<std::uint8_t>(1 - b);
    return out;
}

std::string ActivationCode::to_string() const {
    std::string s;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        if (l > 0) s += '|';
        for (std::uint8_t b : levels[l]) s += b ? '1' : '0';
    }
    return s;
}

ActivationCode ActivationCode::parse(const std::string& text) {
    ActivationCode code;
    code.levels.emplace_back();
    for (char ch : text) {
        if (ch == '|') {
            code.levels.emplace_back();
        } else if (ch == '0' || ch == '1') {
            code.levels.back().push_back(ch == '1' ? 1 : 0);
        } else {
            throw ParseError(std::string("activation code: unexpected character '") + ch +
                             "'");
        }
    }
    return code;
}

std::size_t ActivationCodeHash::operator()(const ActivationCode& code) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(code.levels.size()));
    for (const auto& level : code.levels) {
        mix(static_cast<std::uint64_t>(level.size()) + 0x9e3779b9ull);
        std::uint64_t word = 0;
        int n = 0;
        for (std::uint8_t b : level) {
            word = (word << 1) | b;
            if (++n == 64) {
                mix(word);
                word = 0;
                n = 0;
            }
        }
        if (n > 0) mix(word | (1ull << n));
    }
    return static_cast<std::size_t>(h);
}

DenseVector forward(const ReluNetwork& net, const DenseVector& x) {
    if (x.size() != net.input_dim())
        throw InvalidInputError("forward: input dimension mismatch");
    DenseVector h = (net.folded_first_layer().weights * x + net.folded_first_layer().bias)
                        .cwiseMax(0.0);
    for (int l = 2; l <= net.depth(); ++l) {
        const LayerSpec& layer = net.hidden_layer(l);
        h = (layer.weights * h + layer.bias).cwiseMax(0.0);
    }
    return net.output_layer().weights * h + net.output_layer().bias;
}

LevelCoefficients first_level_coefficients(const ReluNetwork& net) {
    LevelCoefficients lc;
    lc.level = 1;
    lc.effective_weights = net.folded_first_layer().weights;
    lc.effective_bias = net.folded_first_layer().bias;
    return lc;
}

void apply_mask(LevelCoefficients& coeffs, const std::vector<std::uint8_t>& bits) {
    if (static_cast<Eigen::Index>(bits.size()) != coeffs.effective_weights.rows())
        throw InvalidInputError("mask length must match level width");
    coeffs.masked_weights = coeffs.effective_weights;
    coeffs.masked_bias = coeffs.effective_bias;
    for (Eigen::Index m = 0; m < coeffs.masked_weights->rows(); ++m) {
        if (!bits[static_cast<std::size_t>(m)]) {
            coeffs.masked_weights->row(m).setZero();
            (*coeffs.masked_bias)(m) = 0.0;
        }
    }
}

LevelCoefficients next_level_coefficients(const ReluNetwork& net,
                                          const LevelCoefficients& masked_prev) {
    if (!masked_prev.masked_weights || !masked_prev.masked_bias)
        throw InvalidInputError("previous level coefficients are unmasked");
    const int level = masked_prev.level + 1;
    const LayerSpec& layer = net.hidden_layer(level);
    LevelCoefficients lc;
    lc.level = level;
    lc.effective_weights = layer.weights * (*masked_prev.masked_weights);
    lc.effective_bias = layer.weights * (*masked_prev.masked_bias) + layer.bias;
    return lc;
}

LocalLinearModel model_from_masked(const ReluNetwork& net,
                                   const LevelCoefficients& masked_last) {
    if (masked_last.level != net.depth())
        throw InvalidInputError("local model requires last-level coefficients");
    if (!masked_last.masked_weights || !masked_last.masked_bias)
        throw InvalidInputError("last level coefficients are unmasked");
    LocalLinearModel model;
    model.weights = net.output_layer().weights * (*masked_last.masked_weights);
    model.bias = net.output_layer().weights * (*masked_last.masked_bias) +
                 net.output_layer().bias;
    return model;
}

ActivationCode encode(const ReluNetwork& net, const DenseVector& x, int up_to_level) {
    if (x.size() != net.input_dim())
        throw InvalidInputError("encode: input dimension mismatch");
    const int target = up_to_level < 0 ? net.depth() : up_to_level;
    if (target < 1 || target > net.depth())
        throw InvalidInputError("encode: level out of range");
    ActivationCode code;
    LevelCoefficients lc = first_level_coefficients(net);
    for (int l = 1; l <= target; ++l) {
        if (l > 1) lc = next_level_coefficients(net, lc);
        const DenseVector z = lc.effective_weights * x + lc.effective_bias;
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(z.size()));
        for (Eigen::Index m = 0; m < z.size(); ++m)
            bits[static_cast<std::size_t>(m)] = z(m) >= 0.0 ? 1 : 0;
        code.levels.push_back(bits);
        if (l < target) apply_mask(lc, bits);
    }
    return code;
}

LevelCoefficients level_coefficients(const ReluNetwork& net, const ActivationCode& code,
                                     int level) {
    if (level < 1 || level > net.depth())
        throw InvalidInputError("level_coefficients: level out of range");
    if (code.level_count() < level - 1)
        throw InvalidInputError("level_coefficients: code prefix too short");
    LevelCoefficients lc = first_level_coefficients(net);
    for (int l = 1; l < level; ++l) {
        apply_mask(lc, code.levels[static_cast<std::size_t>(l - 1)]);
        lc = next_level_coefficients(net, lc);
    }
    if (code.level_count() >= level)
        apply_mask(lc, code.levels[static_cast<std::size_t>(level - 1)]);
    return lc;
}

LocalLinearModel local_linear_model(const ReluNetwork& net, const ActivationCode& code) {
    if (code.level_count() < net.depth())
        throw InvalidInputError("local_linear_model: code does not cover all levels");
    LevelCoefficients lc = level_coefficients(net, code, net.depth());
    return model_from_masked(net, lc);
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

namespace {

using nlohmann::ordered_json;

DenseVector json_to_vector(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw ParseError("network json: " + where + " must be an array");
    DenseVector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ParseError("network json: " + where + "[" + std::to_string(i) +
                             "] is not a number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

DenseMatrix json_to_matrix(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw ParseError("network json: " + where + " must be a non-empty array of rows");
    const std::size_t cols = arr[0].is_array() ? arr[0].size() : 0;
    DenseMatrix m(static_cast<Eigen::Index>(arr.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        DenseVector row = json_to_vector(arr[i], where + " row " + std::to_string(i));
        if (static_cast<std::size_t>(row.size()) != cols)
            throw ParseError("network json: " + where + " row " + std::to_string(i) +
                             " has inconsistent length");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

LayerSpec json_to_layer(const nlohmann::json& obj, const std::string& where) {
    if (!obj.is_object() || !obj.contains("weights") || !obj.contains("bias"))
        throw ParseError("network json: " + where + " must have weights and bias");
    try {
        return LayerSpec(json_to_matrix(obj["weights"], where + ".weights"),
                         json_to_vector(obj["bias"], where + ".bias"));
    } catch (const InvalidInputError& e) {
        throw ParseError("network json: " + where + ": " + e.what());
    }
}

nlohmann::json vector_to_json(const DenseVector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        arr.push_back(vector_to_json(m.row(i).transpose()));
    return arr;
}

ReluNetwork load_json(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("input_dim") || !j.contains("hidden") ||
        !j.contains("output"))
        throw ParseError("network json: need input_dim, hidden and output fields");
    const int input_dim = j["input_dim"].get<int>();
    std::vector<LayerSpec> hidden;
    if (!j["hidden"].is_array() || j["hidden"].empty())
        throw ParseError("network json: hidden must be a non-empty array");
    for (std::size_t l = 0; l < j["hidden"].size(); ++l)
        hidden.push_back(json_to_layer(j["hidden"][l], "hidden[" + std::to_string(l) + "]"));
    LayerSpec output = json_to_layer(j["output"], "output");
    std::optional<InputNormalization> norm;
    if (j.contains("normalization") && !j["normalization"].is_null()) {
        const auto& n = j["normalization"];
        norm = InputNormalization{json_to_vector(n.at("mean"), "normalization.mean"),
                                  json_to_vector(n.at("scale"), "normalization.scale")};
    }
    std::optional<InputBounds> bounds;
    if (j.contains("input_bounds") && !j["input_bounds"].is_null()) {
        const auto& b = j["input_bounds"];
        bounds = InputBounds{json_to_vector(b.at("lower"), "input_bounds.lower"),
                             json_to_vector(b.at("upper"), "input_bounds.upper")};
    }
    std::optional<std::vector<std::string>> labels;
    if (j.contains("labels") && !j["labels"].is_null())
        labels = j["labels"].get<std::vector<std::string>>();
    try {
        return ReluNetwork(std::move(hidden), std::move(output), input_dim, std::move(norm),
                           std::move(bounds), std::move(labels));
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
}

ReluNetwork load_json_guarded(std::istream& in) {
    try {
        return load_json(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
}

void save_json(const ReluNetwork& net, std::ostream& out) {
    ordered_json j;
    j["input_dim"] = net.input_dim();
    j["hidden"] = nlohmann::json::array();
    for (const auto& layer : net.hidden()) {
        ordered_json lj;
        lj["weights"] = matrix_to_json(layer.weights);
        lj["bias"] = vector_to_json(layer.bias);
        j["hidden"].push_back(lj);
    }
    ordered_json oj;
    oj["weights"] = matrix_to_json(net.output_layer().weights);
    oj["bias"] = vector_to_json(net.output_layer().bias);
    j["output"] = oj;
    if (net.labels()) j["labels"] = *net.labels();
    if (net.normalization()) {
        ordered_json nj;
        nj["mean"] = vector_to_json(net.normalization()->mean);
        nj["scale"] = vector_to_json(net.normalization()->scale);
        j["normalization"] = nj;
    }
    if (net.input_bounds()) {
        ordered_json bj;
        bj["lower"] = vector_to_json(net.input_bounds()->lower);
        bj["upper"] = vector_to_json(net.input_bounds()->upper);
        j["input_bounds"] = bj;
    }
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// NNet text format (ACAS Xu distribution style)
// ---------------------------------------------------------------------------

// Bounds at or beyond this magnitude stand for "unbounded" when written to
// NNet, which has no way to omit the min/max lines.
constexpr double kUnboundedSentinel = 1e30;

struct NnetReader {
    std::istream& in;
    int line_no = 0;
    std::string line;

    explicit NnetReader(std::istream& s) : in(s) {}

    bool next_line() {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.rfind("//", 0) == 0) continue;
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("nnet line " + std::to_string(line_no) + ": " + msg);
    }

    std::vector<double> values(std::size_t expected) {
        if (!next_line()) throw ParseError("nnet: unexpected end of file");
        std::vector<double> vals;
        const char* s = line.c_str();
        while (*s) {
            while (*s && (std::isspace(static_cast<unsigned char>(*s)) || *s == ',')) ++s;
            if (!*s) break;
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s) fail("expected a number near '" + std::string(s).substr(0, 12) + "'");
            vals.push_back(v);
            s = end;
        }
        if (expected != 0 && vals.size() != expected)
            fail("expected " + std::to_string(expected) + " values, got " +
                 std::to_string(vals.size()));
        return vals;
    }
};

ReluNetwork load_nnet(std::istream& in) {
    NnetReader r(in);
    const auto counts = r.values(4);
    const int num_layers = static_cast<int>(counts[0]);
    const int input_size = static_cast<int>(counts[1]);
    const int output_size = static_cast<int>(counts[2]);
    if (num_layers < 2) r.fail("need at least one hidden layer plus the output layer");
    if (input_size < 1 || output_size < 1) r.fail("bad input/output sizes");
    const auto sizes_d = r.values(static_cast<std::size_t>(num_layers) + 1);
    std::vector<int> sizes(sizes_d.begin(), sizes_d.end());
    if (sizes.front() != input_size) r.fail("first layer size must equal input size");
    if (sizes.back() != output_size) r.fail("last layer size must equal output size");
    r.values(0);  // legacy symmetric flag, ignored
    const auto mins = r.values(static_cast<std::size_t>(input_size));
    const auto maxs = r.values(static_cast<std::size_t>(input_size));
    const auto means = r.values(static_cast<std::size_t>(input_size) + 1);
    const auto ranges = r.values(static_cast<std::size_t>(input_size) + 1);

    std::vector<LayerSpec> layers;
    for (int l = 0; l < num_layers; ++l) {
        const int rows = sizes[static_cast<std::size_t>(l) + 1];
        const int cols = sizes[static_cast<std::size_t>(l)];
        DenseMatrix w(rows, cols);
        for (int i = 0; i < rows; ++i) {
            const auto vals = r.values(static_cast<std::size_t>(cols));
            for (int jc = 0; jc < cols; ++jc) w(i, jc) = vals[static_cast<std::size_t>(jc)];
        }
        DenseVector b(rows);
        for (int i = 0; i < rows; ++i) b(i) = r.values(1)[0];
        if (!w.allFinite() || !b.allFinite()) r.fail("non-finite weight");
        layers.emplace_back(std::move(w), std::move(b));
    }

    // The single output mean/range pair folds into the output layer; the
    // input means/ranges become the network's input normalization.
    LayerSpec output = layers.back();
    layers.pop_back();
    const double out_mean = means[static_cast<std::size_t>(input_size)];
    const double out_range = ranges[static_cast<std::size_t>(input_size)];
    if (out_range == 0.0) r.fail("output range must be nonzero");
    if (out_range != 1.0 || out_mean != 0.0) {
        output.weights *= out_range;
        output.bias = output.bias * out_range + DenseVector::Constant(output.bias.size(), out_mean);
    }

    DenseVector mean(input_size), scale(input_size), lower(input_size), upper(input_size);
    bool identity_norm = true;
    bool unbounded = true;
    for (int jf = 0; jf < input_size; ++jf) {
        mean(jf) = means[static_cast<std::size_t>(jf)];
        scale(jf) = ranges[static_cast<std::size_t>(jf)];
        if (scale(jf) == 0.0) r.fail("input range must be nonzero");
        lower(jf) = mins[static_cast<std::size_t>(jf)];
        upper(jf) = maxs[static_cast<std::size_t>(jf)];
        if (mean(jf) != 0.0 || scale(jf) != 1.0) identity_norm = false;
        if (lower(jf) > -kUnboundedSentinel * 0.99 || upper(jf) < kUnboundedSentinel * 0.99)
            unbounded = false;
    }
    std::optional<InputNormalization> norm;
    if (!identity_norm) norm = InputNormalization{std::move(mean), std::move(scale)};
    std::optional<InputBounds> bounds;
    if (!unbounded) bounds = InputBounds{std::move(lower), std::move(upper)};
    try {
        return ReluNetwork(std::move(layers), std::move(output), input_size, std::move(norm),
                           std::move(bounds), {});
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("nnet: ") + e.what());
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_row(std::ostream& out, const DenseVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt(v(i)) << ',';
    out << '\n';
}

void save_nnet(const ReluNetwork& net, std::ostream& out) {
    const int num_layers = net.depth() + 1;
    int max_size = net.input_dim();
    for (int l = 1; l <= net.depth(); ++l) max_size = std::max(max_size, net.layer_width(l));
    max_size = std::max(max_size, net.output_dim());

    out << "// polytraverse network export\n";
    out << num_layers << ',' << net.input_dim() << ',' << net.output_dim() << ','
        << max_size << ",\n";
    out << net.input_dim() << ',';
    for (int l = 1; l <= net.depth(); ++l) out << net.layer_width(l) << ',';
    out << net.output_dim() << ",\n";
    out << "0,\n";

    const int p = net.input_dim();
    DenseVector lower = DenseVector::Constant(p, -kUnboundedSentinel);
    DenseVector upper = DenseVector::Constant(p, kUnboundedSentinel);
    if (net.input_bounds()) {
        lower = net.input_bounds()->lower;
        upper = net.input_bounds()->upper;
    }
    DenseVector mean = DenseVector::Zero(p + 1);
    DenseVector scale = DenseVector::Ones(p + 1);
    if (net.normalization()) {
        mean.segment(0, p) = net.normalization()->mean;
        scale.segment(0, p) = net.normalization()->scale;
    }
    write_row(out, lower);
    write_row(out, upper);
    write_row(out, mean);
    write_row(out, scale);

    auto write_layer = [&out](const LayerSpec& layer) {
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
            write_row(out, layer.weights.row(i).transpose());
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
            out << fmt(layer.bias(i)) << ",\n";
    };
    for (const auto& layer : net.hidden()) write_layer(layer);
    write_layer(net.output_layer());
}

}  // namespace

ReluNetwork load_network(std::istream& in, NetworkFormat format) {
    return format == NetworkFormat::Json ? load_json_guarded(in) : load_nnet(in);
}

ReluNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path);
    const bool nnet = path.size() >= 5 && path.substr(path.size() - 5) == ".nnet";
    return load_network(in, nnet ? NetworkFormat::Nnet : NetworkFormat::Json);
}

void save_network(const ReluNetwork& net, std::ostream& out, NetworkFormat format) {
    if (format == NetworkFormat::Json)
        save_json(net, out);
    else
        save_nnet(net, out);
}

void save_network_file(const ReluNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    const bool nnet = path.size() >= 5 && path.substr(path.size() - 5) == ".nnet";
    save_network(net, out, nnet ? NetworkFormat::Nnet : NetworkFormat::Json);
}

}  // namespace polytraverse
