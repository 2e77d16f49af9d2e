#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "polytraverse/network.hpp"
#include "polytraverse/polytope.hpp"
#include "test_util.hpp"

using namespace polytraverse;
using namespace polytraverse::testutil;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(POLYTRAVERSE_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() /
              ("polytraverse_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        write("id.json", R"({"input_dim": 2,
            "hidden": [{"weights": [[1,0],[0,1]], "bias": [0,0]}],
            "output": {"weights": [[1,1]], "bias": [0]}})");
        write("twoout.json", R"({"input_dim": 2,
            "hidden": [{"weights": [[1,0]], "bias": [0]}],
            "output": {"weights": [[1],[0]], "bias": [0,0.5]}})");
        write("box.json", R"({"type":"box","lower":[-1,-1],"upper":[1,1]})");
        write("prop.json", R"({"region": {"type":"box","lower":[-1,-1],"upper":[0.4,0.4]},
            "inequalities": [{"a": [1,-1], "beta": 0}], "mode": "forall"})");
        write("prop_wide.json", R"({"region": {"type":"box","lower":[-1,-1],"upper":[1,1]},
            "inequalities": [{"a": [1,-1], "beta": 0}], "mode": "forall"})");
    }
    ~Workspace() { fs::remove_all(dir); }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(dir / name);
        out << content;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

const Workspace& ws() {
    static Workspace w;
    return w;
}

void check_report_schema(const nlohmann::json& r) {
    CHECK(r.at("schema_version") == "report_v1");
    CHECK(r.at("artifact").contains("version"));
    CHECK(r.at("network").contains("fingerprint"));
    CHECK(r.contains("command"));
    CHECK(r.contains("config"));
    CHECK(r.contains("result"));
    CHECK(r.at("stats").contains("polytopes_visited"));
    CHECK(r.at("stats").contains("lp_calls"));
}

}  // namespace

TEST_CASE("traverse reports the four quadrants") {
    const RunResult r = run_cli("traverse --net " + ws().path("id.json") + " --region " +
                                ws().path("box.json") + " --start 0.5,0.5");
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    check_report_schema(report);
    CHECK(report["result"]["polytope_count"] == 4);
    CHECK(report["result"]["codes"].size() == 4);
    CHECK(report["stats"]["truncated"] == false);
}

TEST_CASE("traverse truncation exits 4 and flags the report") {
    const RunResult r = run_cli("traverse --net " + ws().path("id.json") + " --region " +
                                ws().path("box.json") + " --max-polytopes 2");
    CHECK(r.exit_code == 4);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["stats"]["truncated"] == true);
    CHECK(report["stats"]["polytopes_visited"] == 2);
}

TEST_CASE("traverse with --models embeds local models") {
    const RunResult r = run_cli("traverse --net " + ws().path("id.json") + " --region " +
                                ws().path("box.json") + " --models");
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["result"]["models"].size() == 4);
    CHECK(report["result"]["models"]["11"]["weights"][0][0] == 1.0);
}

TEST_CASE("reports are deterministic modulo the timing field") {
    const std::string cmd = "traverse --net " + ws().path("id.json") + " --region " +
                            ws().path("box.json");
    nlohmann::json a = nlohmann::json::parse(run_cli(cmd).out);
    nlohmann::json b = nlohmann::json::parse(run_cli(cmd).out);
    a["stats"].erase("wall_time_seconds");
    b["stats"].erase("wall_time_seconds");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("verify robustness exit codes") {
    CHECK(run_cli("verify --net " + ws().path("twoout.json") +
                  " --robust --x0 -0.5,0 --eps 0.2 --out /dev/null")
              .exit_code == 0);
    const RunResult bad = run_cli("verify --net " + ws().path("twoout.json") +
                                  " --robust --x0 -0.5,0 --eps 1.2");
    CHECK(bad.exit_code == 1);
    const nlohmann::json report = nlohmann::json::parse(bad.out);
    CHECK(report["result"]["verdict"] == "violated");
    CHECK(report["result"].contains("witness"));
}

TEST_CASE("verify property exit codes") {
    CHECK(run_cli("verify --net " + ws().path("twoout.json") + " --property " +
                  ws().path("prop.json") + " --out /dev/null")
              .exit_code == 0);
    CHECK(run_cli("verify --net " + ws().path("twoout.json") + " --property " +
                  ws().path("prop_wide.json") + " --out /dev/null")
              .exit_code == 1);
}

TEST_CASE("verify counterfactual reports the analytic distance") {
    const RunResult r = run_cli("verify --net " + ws().path("id.json") +
                                " --counterfactual --x0 0.2,0.2 --norm l2 --gamma 1");
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["result"]["status"] == "found");
    CHECK(std::abs(report["result"]["distance"].get<double>() - 0.42426406871) < 1e-4);
}

TEST_CASE("verify range over the unit box") {
    const RunResult r = run_cli("verify --net " + ws().path("id.json") +
                                " --range --region " + ws().path("box.json"));
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["result"]["min"].get<double>() == doctest::Approx(0.0));
    CHECK(report["result"]["max"].get<double>() == doctest::Approx(2.0));
    CHECK(report["result"]["per_polytope"].size() == 4);
}

TEST_CASE("verify monotone exit codes") {
    CHECK(run_cli("verify --net " + ws().path("id.json") +
                  " --monotone-feature 0 --direction increasing --region " +
                  ws().path("box.json") + " --out /dev/null")
              .exit_code == 0);
    CHECK(run_cli("verify --net " + ws().path("id.json") +
                  " --monotone-feature 0 --direction decreasing --region " +
                  ws().path("box.json") + " --out /dev/null")
              .exit_code == 1);
}

TEST_CASE("verify rejects ambiguous mode selections") {
    CHECK(run_cli("verify --net " + ws().path("id.json") + " --range --robust --x0 0,0 " +
                  "--eps 0.1 --region " + ws().path("box.json"))
              .exit_code == 2);
    CHECK(run_cli("verify --net " + ws().path("id.json")).exit_code == 2);
}

TEST_CASE("dump-polytopes covers the fixtures") {
    const RunResult r = run_cli("dump-polytopes --net " + ws().path("id.json") +
                                " --region " + ws().path("box.json"));
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["result"]["cells"].size() == 4);
    CHECK(report["result"]["hyperplane_segments"].size() == 2);

    // Every grid point of the region lies in at least one emitted cell.
    const ReluNetwork net = load_network_file(ws().path("id.json"));
    Tolerances loose;
    loose.numeric = 1e-6;
    int covered = 0, total = 0;
    for (double x = -1.0; x <= 1.0; x += 0.25)
        for (double y = -1.0; y <= 1.0; y += 0.25) {
            ++total;
            DenseVector p(2);
            p << x, y;
            for (const auto& cell : report["result"]["cells"]) {
                const Polytope poly = polytope_from_code(
                    net, ActivationCode::parse(cell["code"].get<std::string>()));
                if (poly.system.satisfied(p, loose)) {
                    ++covered;
                    break;
                }
            }
        }
    CHECK(covered == total);
}

TEST_CASE("dump-polytopes on the two-layer fixture includes the level-2 segment") {
    ws().write("deep.json", R"({"input_dim": 2,
        "hidden": [{"weights": [[1,0]], "bias": [0]},
                   {"weights": [[1]], "bias": [-0.5]}],
        "output": {"weights": [[1]], "bias": [0]}})");
    const RunResult r = run_cli("dump-polytopes --net " + ws().path("deep.json") +
                                " --region " + ws().path("box.json"));
    CHECK(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.out);
    CHECK(report["result"]["cells"].size() == 3);
    int level2 = 0;
    for (const auto& seg : report["result"]["hyperplane_segments"])
        if (seg["level"] == 2) {
            ++level2;
            CHECK(std::abs(seg["segment"][0][0].get<double>() - 0.5) < 1e-7);
        }
    CHECK(level2 == 1);
}

TEST_CASE("dump-polytopes rejects non-2-D networks") {
    ws().write("one_d.json", R"({"input_dim": 1,
        "hidden": [{"weights": [[1]], "bias": [0]}],
        "output": {"weights": [[1]], "bias": [0]}})");
    CHECK(run_cli("dump-polytopes --net " + ws().path("one_d.json") + " --region " +
                  ws().path("box.json"))
              .exit_code == 2);
}

TEST_CASE("convert round-trips json through nnet bit-exactly") {
    std::mt19937_64 rng(151);
    RandomNetSpec spec;
    spec.widths = {3, 2};
    const ReluNetwork net = random_network(rng, spec);
    save_network_file(net, ws().path("rand.json"));
    CHECK(run_cli("convert --in " + ws().path("rand.json") + " --out " +
                  ws().path("rand.nnet"))
              .exit_code == 0);
    CHECK(run_cli("convert --in " + ws().path("rand.nnet") + " --out " +
                  ws().path("rand2.json"))
              .exit_code == 0);
    CHECK(load_network_file(ws().path("rand2.json")) == net);
}

TEST_CASE("convert propagates parse errors as exit 2") {
    ws().write("broken.nnet", "// header\n2,2,1,2,\n9,9,9,\n");
    CHECK(run_cli("convert --in " + ws().path("broken.nnet") + " --out " +
                  ws().path("x.json"))
              .exit_code == 2);
}

TEST_CASE("missing network file exits 2") {
    CHECK(run_cli("traverse --net /nonexistent.json --region " + ws().path("box.json"))
              .exit_code == 2);
}
