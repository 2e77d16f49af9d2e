// polytraverse command line: polytope traversal, verification, 2-D polytope
// dumps and network format conversion.
//
// Exit codes: 0 verified / optimum found, 1 violated / adversarial or
// counterfactual found (or none exists for counterfactual search), 2 parse
// or input error, 3 solver error, 4 truncated by a limit.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "polytraverse/oracle.hpp"
#include "polytraverse/report.hpp"
#include "polytraverse/verifiers.hpp"

using namespace polytraverse;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTruncated = 4;

DenseVector parse_vector(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("cannot parse vector component '" + item + "'");
        }
    }
    if (values.empty()) throw ParseError("empty vector argument");
    DenseVector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = values[i];
    return v;
}

BoundedRegion load_region_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open region file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("region json: ") + e.what());
    }
    return BoundedRegion::from_json(j);
}

void emit(const ordered_json& report, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << report.dump(2) << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw ParseError("cannot open output file: " + out_path);
        out << report.dump(2) << '\n';
    }
}

struct CommonArgs {
    std::string net_path;
    std::string out_path;
    long max_polytopes = 0;
    double time_budget = 0.0;
    bool no_prescreen = false;
    int workers = 0;
    double eps_int = Tolerances{}.interior_margin;
    double eps_num = Tolerances{}.numeric;
    double sentinel = Tolerances{}.sentinel_half_width;

    void attach(CLI::App* cmd, bool with_limits = true) {
        cmd->add_option("--net", net_path, "network file (.json or .nnet)")->required();
        cmd->add_option("--out", out_path, "report path (default: stdout)");
        if (with_limits) {
            cmd->add_option("--max-polytopes", max_polytopes, "visit limit");
            cmd->add_option("--time-budget", time_budget, "wall-clock limit in seconds");
            cmd->add_flag("--no-prescreen", no_prescreen,
                          "disable hyperplane pre-screening");
            cmd->add_option("--workers", workers,
                            "parallel candidate checks (default: "
                            "POLYTRAVERSE_WORKERS or 1)");
        }
        cmd->add_option("--eps-int", eps_int, "interior margin (default 1e-7)");
        cmd->add_option("--eps-num", eps_num, "numeric tolerance (default 1e-9)");
        cmd->add_option("--sentinel", sentinel,
                        "half-width of the unbounded-traversal box (default 1e6)");
    }

    VerifierOptions verifier_options() const {
        VerifierOptions opts;
        if (max_polytopes > 0) opts.max_polytopes = max_polytopes;
        if (time_budget > 0) opts.time_budget_seconds = time_budget;
        opts.prescreen = !no_prescreen;
        opts.workers = effective_workers();
        opts.tolerances = tolerances();
        return opts;
    }

    Tolerances tolerances() const {
        Tolerances tol;
        tol.interior_margin = eps_int;
        tol.numeric = eps_num;
        tol.sentinel_half_width = sentinel;
        return tol;
    }

    int effective_workers() const {
        if (workers > 0) return workers;
        if (const char* env = std::getenv("POLYTRAVERSE_WORKERS")) {
            const int n = std::atoi(env);
            if (n > 0) return n;
        }
        return 1;
    }

    ordered_json config_json() const {
        ordered_json j;
        j["eps_int"] = eps_int;
        j["eps_num"] = eps_num;
        j["sentinel"] = sentinel;
        j["prescreen"] = !no_prescreen;
        j["workers"] = effective_workers();
        if (max_polytopes > 0) j["max_polytopes"] = max_polytopes;
        if (time_budget > 0) j["time_budget_seconds"] = time_budget;
        return j;
    }
};

ordered_json model_json(const LocalLinearModel& model) {
    ordered_json j;
    ordered_json w = ordered_json::array();
    for (Eigen::Index i = 0; i < model.weights.rows(); ++i)
        w.push_back(vector_to_json(model.weights.row(i).transpose()));
    j["weights"] = w;
    j["bias"] = vector_to_json(model.bias);
    return j;
}

// ---------------------------------------------------------------------------
// traverse
// ---------------------------------------------------------------------------

int run_traverse(const CommonArgs& common, const std::string& region_path,
                 const std::string& start_text, bool with_models,
                 const std::string& command_echo) {
    const ReluNetwork net = load_network_file(common.net_path);
    const BoundedRegion region =
        region_path.empty()
            ? BoundedRegion::sentinel_box(net.input_dim(), common.sentinel)
            : load_region_file(region_path);
    const DenseVector start = start_text.empty()
                                  ? region.nominal_interior_point(common.tolerances())
                                  : parse_vector(start_text);

    TraversalConfig config = common.verifier_options().traversal_config(region);
    std::vector<std::pair<std::string, ordered_json>> models;
    Visitor visitor;
    if (with_models)
        visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
            models.emplace_back(poly.code.to_string(), model_json(model));
            return VisitOutcome::proceed();
        };
    const TraversalResult result = traverse(net, start, config, visitor);

    ordered_json config_json = common.config_json();
    config_json["region"] = region.to_json();
    config_json["start"] = vector_to_json(start);
    ordered_json report = make_report(command_echo, common.net_path, config_json);
    ordered_json payload;
    payload["polytope_count"] = result.codes.size();
    payload["codes"] = sorted_code_strings(result.codes);
    if (with_models) {
        std::sort(models.begin(), models.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ordered_json mj = ordered_json::object();
        for (auto& [code, model] : models) mj[code] = std::move(model);
        payload["models"] = mj;
    }
    report["result"] = payload;
    report["stats"] = stats_to_json(result.stats);
    emit(report, common.out_path);
    return result.stats.truncated ? kExitTruncated : kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

const char* verdict_name(VerdictStatus status) {
    switch (status) {
        case VerdictStatus::Verified: return "verified";
        case VerdictStatus::Violated: return "violated";
        default: return "truncated";
    }
}

int verdict_exit(VerdictStatus status) {
    switch (status) {
        case VerdictStatus::Verified: return kExitOk;
        case VerdictStatus::Violated: return kExitViolated;
        default: return kExitTruncated;
    }
}

ordered_json verdict_json(const Verdict& verdict) {
    ordered_json j;
    j["verdict"] = verdict_name(verdict.status);
    j["worst_margin"] = verdict.worst_margin;
    if (verdict.witness) {
        j["witness"] = vector_to_json(*verdict.witness);
        j["witness_code"] = verdict.witness_code->to_string();
        if (verdict.witness_class) j["witness_class"] = *verdict.witness_class;
    }
    return j;
}

struct VerifyArgs {
    std::string property_path;
    std::string region_path;
    std::string x0_text;
    double eps = 0.0;
    double gamma = 0.0;
    int monotone_feature = -1;
    std::string direction = "increasing";
    bool range_mode = false;
    int output_index = 0;
    std::string counterfactual_norm;
    std::string clip_path;
};

int run_verify(const CommonArgs& common, const VerifyArgs& args,
               const std::string& command_echo) {
    const ReluNetwork net = load_network_file(common.net_path);
    const VerifierOptions opts = common.verifier_options();
    ordered_json config_json = common.config_json();
    int exit_code = kExitOk;
    ordered_json payload;
    TraversalStats stats;

    const int modes = (!args.property_path.empty()) + (args.eps > 0.0) +
                      (args.monotone_feature >= 0) + args.range_mode +
                      (!args.counterfactual_norm.empty());
    if (modes != 1)
        throw ParseError("verify needs exactly one of --property, --robust, "
                         "--monotone-feature, --range, --counterfactual");

    if (!args.property_path.empty()) {
        std::ifstream in(args.property_path);
        if (!in) throw ParseError("cannot open property file: " + args.property_path);
        nlohmann::json pj;
        try {
            pj = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("property json: ") + e.what());
        }
        PropertySpec spec;
        try {
            for (const auto& row : pj.at("inequalities")) {
                PropertySpec::Inequality ineq;
                const auto& avec = row.at("a");
                ineq.a.resize(static_cast<Eigen::Index>(avec.size()));
                for (std::size_t i = 0; i < avec.size(); ++i)
                    ineq.a(static_cast<Eigen::Index>(i)) = avec[i].get<double>();
                ineq.beta = row.value("beta", 0.0);
                spec.inequalities.push_back(std::move(ineq));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("property json: ") + e.what());
        }
        const BoundedRegion region = !args.region_path.empty()
                                         ? load_region_file(args.region_path)
                                         : BoundedRegion::from_json(pj.at("region"));
        config_json["region"] = region.to_json();
        const Verdict verdict = verify_output_property(net, region, spec, opts);
        payload = verdict_json(verdict);
        stats = verdict.stats;
        exit_code = verdict_exit(verdict.status);
    } else if (args.eps > 0.0) {
        if (args.x0_text.empty()) throw ParseError("--robust needs --x0");
        const DenseVector x0 = parse_vector(args.x0_text);
        config_json["x0"] = vector_to_json(x0);
        config_json["epsilon"] = args.eps;
        const Verdict verdict = robustness_check(net, x0, args.eps, opts, args.gamma);
        payload = verdict_json(verdict);
        stats = verdict.stats;
        exit_code = verdict_exit(verdict.status);
    } else if (args.monotone_feature >= 0) {
        if (args.region_path.empty()) throw ParseError("--monotone-feature needs --region");
        const BoundedRegion region = load_region_file(args.region_path);
        config_json["region"] = region.to_json();
        config_json["feature"] = args.monotone_feature;
        config_json["direction"] = args.direction;
        Direction dir = Direction::Any;
        if (args.direction == "increasing") dir = Direction::Increasing;
        else if (args.direction == "decreasing") dir = Direction::Decreasing;
        else if (args.direction != "any")
            throw ParseError("direction must be increasing, decreasing or any");
        const MonotonicityReport report =
            monotonicity(net, region, args.monotone_feature, dir, opts);
        const char* verdict = nullptr;
        switch (report.verdict) {
            case MonotoneVerdict::NonDecreasing: verdict = "monotone-nondecreasing"; break;
            case MonotoneVerdict::NonIncreasing: verdict = "monotone-nonincreasing"; break;
            case MonotoneVerdict::Constant: verdict = "constant"; break;
            case MonotoneVerdict::Violated: verdict = "violated"; break;
            default: verdict = "truncated"; break;
        }
        payload["verdict"] = verdict;
        payload["consistent_with_claim"] = report.consistent_with_claim();
        ordered_json viols = ordered_json::array();
        for (const auto& [code, coeff] : report.violations)
            viols.push_back({{"code", code.to_string()}, {"coefficient", coeff}});
        payload["violations"] = viols;
        stats = report.stats;
        exit_code = report.verdict == MonotoneVerdict::Truncated
                        ? kExitTruncated
                        : (report.consistent_with_claim() ? kExitOk : kExitViolated);
    } else if (args.range_mode) {
        if (args.region_path.empty()) throw ParseError("--range needs --region");
        const BoundedRegion region = load_region_file(args.region_path);
        config_json["region"] = region.to_json();
        config_json["output_index"] = args.output_index;
        const RangeResult range = output_range(net, region, args.output_index, opts);
        payload["min"] = range.min;
        payload["max"] = range.max;
        payload["argmin"] = vector_to_json(range.argmin);
        payload["argmax"] = vector_to_json(range.argmax);
        ordered_json per = ordered_json::array();
        for (const auto& row : range.per_polytope)
            per.push_back({{"code", row.code.to_string()},
                           {"min", row.local_min},
                           {"max", row.local_max}});
        payload["per_polytope"] = per;
        stats = range.stats;
        exit_code = range.truncated ? kExitTruncated : kExitOk;
    } else {
        if (args.x0_text.empty()) throw ParseError("--counterfactual needs --x0");
        CounterfactualSpec spec;
        spec.origin = parse_vector(args.x0_text);
        spec.gamma = args.gamma;
        if (args.counterfactual_norm == "l1") spec.norm = Norm::L1;
        else if (args.counterfactual_norm == "l2") spec.norm = Norm::L2;
        else if (args.counterfactual_norm == "linf") spec.norm = Norm::Linf;
        else throw ParseError("counterfactual norm must be l1, l2 or linf");
        if (!args.clip_path.empty()) spec.clip = load_region_file(args.clip_path);
        config_json["x0"] = vector_to_json(spec.origin);
        config_json["norm"] = args.counterfactual_norm;
        config_json["gamma"] = args.gamma;
        const CounterfactualResult result = counterfactual(net, spec, opts);
        stats = result.stats;
        switch (result.status) {
            case CounterfactualStatus::Found:
                payload["status"] = "found";
                payload["point"] = vector_to_json(result.point);
                payload["distance"] = result.distance;
                payload["achieved_class"] = result.achieved_class;
                payload["code"] = result.code.to_string();
                exit_code = kExitOk;
                break;
            case CounterfactualStatus::NoneFound:
                payload["status"] = "none-found";
                exit_code = kExitViolated;
                break;
            default:
                payload["status"] = "truncated";
                if (result.achieved_class >= 0) {
                    // Best incumbent so far; not certified optimal.
                    payload["point"] = vector_to_json(result.point);
                    payload["distance"] = result.distance;
                    payload["achieved_class"] = result.achieved_class;
                    payload["code"] = result.code.to_string();
                }
                exit_code = kExitTruncated;
                break;
        }
    }

    ordered_json report = make_report(command_echo, common.net_path, config_json);
    report["result"] = payload;
    report["stats"] = stats_to_json(stats);
    emit(report, common.out_path);
    return exit_code;
}

// ---------------------------------------------------------------------------
// dump-polytopes (P == 2)
// ---------------------------------------------------------------------------

ordered_json polygon_json(std::vector<DenseVector> vertices) {
    // Order vertices counterclockwise around their centroid.
    DenseVector center = DenseVector::Zero(2);
    for (const auto& v : vertices) center += v;
    center /= static_cast<double>(vertices.size());
    std::sort(vertices.begin(), vertices.end(),
              [&](const DenseVector& a, const DenseVector& b) {
                  return std::atan2(a(1) - center(1), a(0) - center(0)) <
                         std::atan2(b(1) - center(1), b(0) - center(0));
              });
    ordered_json arr = ordered_json::array();
    for (const auto& v : vertices) arr.push_back({v(0), v(1)});
    return arr;
}

// Longest chord of the line normal.x + offset = 0 inside the closed system.
// Degenerate normals have no line to draw.
std::optional<std::pair<DenseVector, DenseVector>> clip_line(
    const ConstraintSystem& system, const DenseVector& normal, double offset,
    const Tolerances& tol) {
    if (normal.norm() < 1e-12) return std::nullopt;
    ConstraintSystem cut = system;
    cut.add({normal, offset, Sense::LessEqual});
    cut.add({normal, offset, Sense::GreaterEqual});
    const std::vector<DenseVector> pts = enumerate_vertices(cut, tol);
    if (pts.size() < 2) return std::nullopt;
    double best = 0.0;
    std::pair<DenseVector, DenseVector> seg{pts[0], pts[0]};
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = (pts[i] - pts[j]).norm();
            if (d > best) {
                best = d;
                seg = {pts[i], pts[j]};
            }
        }
    if (best <= 1e-9) return std::nullopt;
    return seg;
}

int run_dump(const CommonArgs& common, const std::string& region_path, double gamma,
             const std::string& format, const std::string& command_echo) {
    const ReluNetwork net = load_network_file(common.net_path);
    if (net.input_dim() != 2)
        throw UnsupportedConfigError("dump-polytopes requires a 2-D input space");
    const BoundedRegion region = load_region_file(region_path);
    const Tolerances tol = common.tolerances();

    std::vector<std::pair<ActivationCode, LocalLinearModel>> visited;
    Visitor visitor = [&](const Polytope& poly, const LocalLinearModel& model) {
        visited.emplace_back(poly.code, model);
        return VisitOutcome::proceed();
    };
    TraversalConfig config = common.verifier_options().traversal_config(region);
    const TraversalResult tr =
        traverse(net, region.nominal_interior_point(tol), config, visitor);
    const ConstraintSystem region_rows = region.constraints();

    ordered_json cells = ordered_json::array();
    for (const auto& [code, model] : visited) {
        const Polytope poly = polytope_from_code(net, code);
        ConstraintSystem closed = poly.system;
        closed.append(region_rows);
        const std::vector<DenseVector> verts = enumerate_vertices(closed, tol);
        if (verts.size() < 3) continue;
        ordered_json cell;
        cell["code"] = code.to_string();
        cell["vertices"] = polygon_json(verts);
        cell["model"] = model_json(model);
        ordered_json lines = ordered_json::array();
        const int q = net.output_dim();
        if (q == 1) {
            if (auto seg = clip_line(closed, model.weights.row(0).transpose(),
                                     model.bias(0) - gamma, tol))
                lines.push_back({{seg->first(0), seg->first(1)},
                                 {seg->second(0), seg->second(1)}});
        } else {
            for (int i = 0; i < q; ++i)
                for (int j = i + 1; j < q; ++j) {
                    if (auto seg = clip_line(
                            closed, (model.weights.row(i) - model.weights.row(j)).transpose(),
                            model.bias(i) - model.bias(j), tol))
                        lines.push_back({{seg->first(0), seg->first(1)},
                                         {seg->second(0), seg->second(1)}});
                }
        }
        cell["model_lines"] = lines;
        cells.push_back(cell);
    }

    // Partitioning hyperplane segments, per level, clipped to each parent.
    ordered_json segments = ordered_json::array();
    CodeSet parents;
    parents.insert(ActivationCode{});
    for (int level = 1; level <= net.depth(); ++level) {
        CodeSet next_parents;
        for (const auto& [code, model] : visited) next_parents.insert(code.prefix(level));
        for (const ActivationCode& parent : parents) {
            ConstraintSystem scope(2);
            if (parent.level_count() > 0)
                scope = polytope_from_code(net, parent).system;
            scope.append(region_rows);
            const LevelCoefficients lc = level_coefficients(net, parent, level);
            for (Eigen::Index m = 0; m < lc.effective_weights.rows(); ++m) {
                const DenseVector n = lc.effective_weights.row(m).transpose();
                if (n.isZero(0.0)) continue;
                if (auto seg = clip_line(scope, n, lc.effective_bias(m), tol)) {
                    ordered_json sj;
                    sj["level"] = level;
                    sj["parent"] = parent.to_string();
                    sj["index"] = m;
                    sj["segment"] = {{seg->first(0), seg->first(1)},
                                     {seg->second(0), seg->second(1)}};
                    segments.push_back(sj);
                }
            }
        }
        parents = std::move(next_parents);
    }

    if (format == "csv") {
        std::ostringstream csv;
        csv << "kind,code,level,index,x1,y1,x2,y2\n";
        for (const auto& sj : segments)
            csv << "hyperplane," << sj["parent"].get<std::string>() << ','
                << sj["level"] << ',' << sj["index"] << ',' << sj["segment"][0][0] << ','
                << sj["segment"][0][1] << ',' << sj["segment"][1][0] << ','
                << sj["segment"][1][1] << '\n';
        for (const auto& cell : cells)
            for (const auto& line : cell["model_lines"])
                csv << "model_line," << cell["code"].get<std::string>() << ",,,"
                    << line[0][0] << ',' << line[0][1] << ',' << line[1][0] << ','
                    << line[1][1] << '\n';
        if (common.out_path.empty() || common.out_path == "-") {
            std::cout << csv.str();
        } else {
            std::ofstream out(common.out_path);
            if (!out) throw ParseError("cannot open output file: " + common.out_path);
            out << csv.str();
        }
        return tr.stats.truncated ? kExitTruncated : kExitOk;
    }

    ordered_json config_json = common.config_json();
    config_json["region"] = region.to_json();
    config_json["gamma"] = gamma;
    ordered_json report = make_report(command_echo, common.net_path, config_json);
    ordered_json payload;
    payload["cells"] = cells;
    payload["hyperplane_segments"] = segments;
    report["result"] = payload;
    report["stats"] = stats_to_json(tr.stats);
    emit(report, common.out_path);
    return tr.stats.truncated ? kExitTruncated : kExitOk;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

int run_convert(const std::string& in_path, const std::string& out_path) {
    const ReluNetwork net = load_network_file(in_path);
    save_network_file(net, out_path);
    return kExitOk;
}

std::string echo_command(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ReLU-network verification by local polytope traversal"};
    app.require_subcommand(1);

    CommonArgs traverse_args;
    std::string traverse_region, traverse_start;
    bool traverse_models = false;
    CLI::App* cmd_traverse =
        app.add_subcommand("traverse", "enumerate polytopes overlapping a region");
    traverse_args.attach(cmd_traverse);
    cmd_traverse->add_option("--region", traverse_region,
                             "region JSON file (default: sentinel box)");
    cmd_traverse->add_option("--start", traverse_start,
                             "start point, comma separated (default: region center)");
    cmd_traverse->add_flag("--models", traverse_models,
                           "include per-polytope local models in the report");

    CommonArgs verify_args;
    VerifyArgs verify;
    bool robust_flag = false, counterfactual_flag = false;
    CLI::App* cmd_verify = app.add_subcommand("verify", "verify a network property");
    verify_args.attach(cmd_verify);
    cmd_verify->add_option("--property", verify.property_path,
                           "property JSON file (region + inequalities)");
    cmd_verify->add_flag("--robust", robust_flag, "robustness mode (needs --x0, --eps)");
    cmd_verify->add_option("--x0", verify.x0_text, "origin point, comma separated");
    cmd_verify->add_option("--eps", verify.eps, "L-inf robustness radius");
    cmd_verify->add_option("--gamma", verify.gamma,
                           "binary decision threshold (default 0)");
    cmd_verify->add_option("--monotone-feature", verify.monotone_feature,
                           "feature index for monotonicity verification");
    cmd_verify->add_option("--direction", verify.direction,
                           "claimed direction: increasing|decreasing|any");
    cmd_verify->add_flag("--range", verify.range_mode, "output range mode");
    cmd_verify->add_option("--output-index", verify.output_index,
                           "output coordinate for --range (default 0)");
    cmd_verify->add_flag("--counterfactual", counterfactual_flag,
                         "counterfactual mode (needs --x0, --norm)");
    cmd_verify->add_option("--norm", verify.counterfactual_norm,
                           "counterfactual norm: l1|l2|linf");
    cmd_verify->add_option("--clip", verify.clip_path,
                           "clip region JSON for counterfactual search");
    cmd_verify->add_option("--region", verify.region_path, "region JSON file");

    CommonArgs dump_args;
    std::string dump_region, dump_format = "json";
    double dump_gamma = 0.0;
    CLI::App* cmd_dump = app.add_subcommand(
        "dump-polytopes", "emit 2-D cells, hyperplane segments and model lines");
    dump_args.attach(cmd_dump);
    cmd_dump->add_option("--region", dump_region, "region JSON file")->required();
    cmd_dump->add_option("--gamma", dump_gamma, "decision threshold for model lines");
    cmd_dump->add_option("--format", dump_format, "json (default) or csv");

    std::string convert_in, convert_out;
    CLI::App* cmd_convert =
        app.add_subcommand("convert", "convert between .json and .nnet");
    cmd_convert->add_option("--in", convert_in, "input network file")->required();
    cmd_convert->add_option("--out", convert_out, "output network file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    const std::string echo = echo_command(argc, argv);
    try {
        if (cmd_traverse->parsed())
            return run_traverse(traverse_args, traverse_region, traverse_start,
                                traverse_models, echo);
        if (cmd_verify->parsed()) {
            if (robust_flag && verify.eps <= 0)
                throw ParseError("--robust needs a positive --eps");
            if (counterfactual_flag && verify.counterfactual_norm.empty())
                throw ParseError("--counterfactual needs --norm");
            if (!counterfactual_flag) verify.counterfactual_norm.clear();
            if (!robust_flag) verify.eps = 0.0;
            return run_verify(verify_args, verify, echo);
        }
        if (cmd_dump->parsed())
            return run_dump(dump_args, dump_region, dump_gamma, dump_format, echo);
        if (cmd_convert->parsed()) return run_convert(convert_in, convert_out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const UnsupportedConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const SolverStallError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitParse;
}
