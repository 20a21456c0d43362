#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "qqbf/json_io.hpp"

using namespace qqbf;

namespace {

// JSON literals for the workhorse functions (no single quotes inside, so
// they can be passed through the shell verbatim).
const std::string kFnZ =
    R"({"P":{"coeffs":[[0,0],[1,0]]},"Q":{"coeffs":[[1,0]]}})";
const std::string kFnZ2 =
    R"({"P":{"coeffs":[[0,0],[0,0],[1,0]]},"Q":{"coeffs":[[1,0]]}})";
const std::string kFnSum =
    R"({"P":{"k":2,"terms":[{"index":[1,0],"re":1,"im":0},)"
    R"({"index":[0,1],"re":1,"im":0}]},)"
    R"("Q":{"k":2,"terms":[{"index":[0,0],"re":1,"im":0}]}})";
const std::string kFnProd =
    R"({"P":{"k":2,"terms":[{"index":[1,1],"re":1,"im":0}]},)"
    R"("Q":{"k":2,"terms":[{"index":[0,0],"re":1,"im":0}]}})";

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const std::string& work_dir() {
    static const std::string dir = [] {
        char tmpl[] = "/tmp/qqbf_cli_XXXXXX";
        const char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run the CLI binary with the given (pre-quoted) argument string.
CliResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    const char* bin = std::getenv("QQBF_CLI_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "QQBF_CLI_BIN must point at the binary");
    const std::string in_path = work_dir() + "/stdin.txt";
    const std::string err_path = work_dir() + "/stderr.txt";
    {
        std::ofstream in(in_path);
        in << stdin_text;
    }
    const std::string cmd = std::string("'") + bin + "' " + args + " < '" +
                            in_path + "' 2> '" + err_path + "'";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        res.out.append(buf, got);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.err = slurp_file(err_path);
    return res;
}

std::string error_kind(const CliResult& r) {
    const json j = json::parse(r.err);
    return j.at("error").at("kind").get<std::string>();
}

} // namespace

TEST_CASE("synth emits the identity circuit for f = z") {
    const auto r = run_cli("synth --fn '" + kFnZ + "'");
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["k"] == 1);
    CHECK(j["ns"] == json::array({1}));
    CHECK(j["m"] == 0);
    CHECK(j["bit_order"] == "lsb-first");
    const Circuit c = circuit_from_json(j);
    CHECK((c.U - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("synth validates the ancilla override") {
    CHECK(run_cli("synth --fn '" + kFnZ + "' --m 0").code == 0);
    const auto bad = run_cli("synth --fn '" + kFnZ + "' --m 1");
    CHECK(bad.code == 2);
    CHECK(error_kind(bad) == "bad_argument");
}

TEST_CASE("synth rejects a shared root") {
    const std::string noncoprime =
        R"({"P":{"coeffs":[[-1,0],[0,0],[1,0]]},"Q":{"coeffs":[[-1,0],[1,0]]}})";
    const auto r = run_cli("synth --fn '" + noncoprime + "'");
    CHECK(r.code == 2);
    CHECK(error_kind(r) == "not_coprime");
}

TEST_CASE("malformed JSON is a structured error") {
    const auto r = run_cli("synth --fn '{\"P\": nope'");
    CHECK(r.code == 2);
    const json j = json::parse(r.err);
    CHECK(j["error"]["kind"] == "bad_json");
    CHECK_FALSE(j["error"]["detail"].get<std::string>().empty());
}

TEST_CASE("unknown subcommands and missing arguments exit 2") {
    CHECK(run_cli("nonsense").code == 2);
    CHECK(run_cli("synth").code == 2); // --fn is required
}

TEST_CASE("compat reports both verdicts at exit 0") {
    const auto yes = run_cli("compat --g0 '" + kFnSum + "' --g1 '" + kFnProd +
                             "' --n 1,1");
    CHECK(yes.code == 0);
    CHECK(json::parse(yes.out)["compatible"].get<bool>());

    const auto no = run_cli("compat --g0 '" + kFnProd + "' --g1 '" + kFnSum +
                            "' --n 1,1");
    CHECK(no.code == 0);
    const json jn = json::parse(no.out);
    CHECK_FALSE(jn["compatible"].get<bool>());
    CHECK(jn["epsilon_trace"].is_array());
}

TEST_CASE("multifunc builds the priority circuit or exits 3") {
    const auto ok = run_cli("multifunc --g0 '" + kFnSum + "' --g1 '" +
                            kFnProd + "' --n 1,1");
    CHECK(ok.code == 0);
    const json j = json::parse(ok.out);
    CHECK(j["kind"] == "priority");
    CHECK(j["k"] == 2);

    const auto bad = run_cli("multifunc --g0 '" + kFnProd + "' --g1 '" +
                             kFnSum + "' --n 1,1");
    CHECK(bad.code == 3);
    CHECK(error_kind(bad) == "incompatible");
}

TEST_CASE("synth output piped into run matches the in-process result") {
    const std::string circuit_path = work_dir() + "/sum_circuit.json";
    const auto s = run_cli("synth --fn '" + kFnSum + "' --out '" +
                           circuit_path + "'");
    REQUIRE(s.code == 0);
    CHECK(s.out.empty());

    const auto from_file =
        run_cli("run --circuit '@" + circuit_path + "' --z 1,1");
    REQUIRE(from_file.code == 0);
    const auto in_process = run_cli("run --fn '" + kFnSum + "' --z 1,1");
    REQUIRE(in_process.code == 0);

    const double p_file =
        json::parse(from_file.out)["success_prob"].get<double>();
    const double p_direct =
        json::parse(in_process.out)["success_prob"].get<double>();
    CHECK(p_file == p_direct); // bit-identical through the 17-digit rendering
    CHECK(p_direct == doctest::Approx(0.625).epsilon(1e-12));

    // The same circuit can arrive on stdin.
    const auto piped = run_cli("run --circuit - --z 1,1",
                               slurp_file(circuit_path));
    CHECK(piped.code == 0);
    CHECK(json::parse(piped.out)["success_prob"].get<double>() == p_file);
}

TEST_CASE("run executes a multifunctional circuit from a file") {
    const std::string mc_path = work_dir() + "/priority.json";
    REQUIRE(run_cli("multifunc --g0 '" + kFnSum + "' --g1 '" + kFnProd +
                    "' --n 1,1 --out '" + mc_path + "'")
                .code == 0);
    const auto r = run_cli("run --circuit '@" + mc_path + "' --z 1,1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j["branches"].size() == 2);
    CHECK(j["branches"][0]["success_prob"].get<double>() ==
          doctest::Approx(0.625).epsilon(1e-12));
    CHECK(j["branches"][1]["success_prob"].get<double>() ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sample is deterministic in the seed and validates shots") {
    const std::string cmd =
        "sample --fn '" + kFnProd + "' --z 1,1 --shots 2000 --seed 9";
    const auto a = run_cli(cmd);
    REQUIRE(a.code == 0);
    const json j = json::parse(a.out);
    CHECK(j["shots"] == 2000);
    CHECK(j["seed"] == 9);
    CHECK(j["branches"].size() == 1);
    const auto b = run_cli(cmd);
    CHECK(a.out == b.out);

    const auto zero = run_cli("sample --fn '" + kFnProd +
                              "' --z 1,1 --shots 0");
    CHECK(zero.code == 2);
}

TEST_CASE("verify passes a sound synthesis and exits 4 when a check fails") {
    const auto ok = run_cli("verify --fn '" + kFnZ + "'");
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out)["pass"].get<bool>());

    // An unsatisfiable fidelity demand exercises the failure path
    // deterministically.
    const auto bad = run_cli("verify --fn '" + kFnZ + "' --tol-fidelity=-1");
    CHECK(bad.code == 4);
    CHECK(error_kind(bad) == "verification");
    const json j = json::parse(bad.out);
    CHECK_FALSE(j["pass"].get<bool>());
    CHECK(j["failures"].size() > 0);
    CHECK(j["failures"][0]["reason"] == "fidelity");
}

TEST_CASE("prob computes points, weighted points, and ensemble means") {
    const auto pt = run_cli("prob --fn '" + kFnProd + "' --z 2,2");
    REQUIRE(pt.code == 0);
    CHECK(json::parse(pt.out)["success_prob"].get<double>() ==
          doctest::Approx(0.68).epsilon(1e-12));

    const auto weighted = run_cli("prob --fn '" + kFnZ + "' --z 1 --w 1");
    REQUIRE(weighted.code == 0);
    CHECK(json::parse(weighted.out)["success_prob"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));

    const auto mean = run_cli("prob --fn '" + kFnZ2 + "'");
    REQUIRE(mean.code == 0);
    json jm = json::parse(mean.out);
    CHECK(jm["mean_prob"].get<double>() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(jm["ensemble"] == "uniform");
    CHECK(jm["n"] == 2);

    const auto mean3 = run_cli("prob --fn '" + kFnZ2 + "' --n 3");
    CHECK(json::parse(mean3.out)["mean_prob"].get<double>() ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const auto inf_pt = run_cli("prob --fn '" + kFnProd + "' --z inf,inf");
    CHECK(json::parse(inf_pt.out)["success_prob"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run_cli("prob --fn '" + kFnProd + "'").code == 2); // mean needs k=1
}

TEST_CASE("sweep emits sorted CSV with argmax flags") {
    const auto r = run_cli("sweep --fn '" + kFnZ +
                           "' --grid 0.5,1,2 --n-max 3");
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "param,n,ensemble,mean_prob,is_argmax");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 9); // 3 params x n in {1,2,3}
    CHECK(r.out.find("0.5,1,uniform,0.625,1\n") != std::string::npos);

    // Geometric grids expand to the requested count.
    const auto log_grid = run_cli("sweep --fn '" + kFnZ +
                                  "' --grid 1:100:3:log --n-max 2");
    REQUIRE(log_grid.code == 0);
    CHECK(log_grid.out.find("\n100,") != std::string::npos);
}

TEST_CASE("numeric policy arrives via environment file or flag") {
    // A coprime pair judged with an absurd threshold stops being coprime:
    // the knobs demonstrably reach the validation layer.
    const auto flagged = run_cli("synth --fn '" + kFnZ +
                                 "' --tol-resultant 10");
    CHECK(flagged.code == 2);
    CHECK(error_kind(flagged) == "not_coprime");

    const std::string policy_path = work_dir() + "/policy.json";
    {
        std::ofstream out(policy_path);
        out << R"({"resultant": 10.0})";
    }
    // run_cli prefixes the binary itself, so build the env-var form by hand.
    const char* bin = std::getenv("QQBF_CLI_BIN");
    REQUIRE(bin != nullptr);
    const std::string err_path = work_dir() + "/stderr_env.txt";
    const std::string cmd = std::string("QQBF_NUM_POLICY='") + policy_path +
                            "' '" + bin + "' synth --fn '" + kFnZ + "' 2> '" +
                            err_path + "'";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (fread(buf, 1, sizeof buf, pipe) > 0) {
    }
    const int status = pclose(pipe);
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(json::parse(slurp_file(err_path))["error"]["kind"] == "not_coprime");

    // A broken policy file fails before any subcommand runs.
    const std::string broken_path = work_dir() + "/broken_policy.json";
    {
        std::ofstream out(broken_path);
        out << "{";
    }
    const std::string cmd2 = std::string("QQBF_NUM_POLICY='") + broken_path +
                             "' '" + bin + "' synth --fn '" + kFnZ +
                             "' 2> /dev/null";
    FILE* pipe2 = popen(cmd2.c_str(), "r");
    REQUIRE(pipe2 != nullptr);
    while (fread(buf, 1, sizeof buf, pipe2) > 0) {
    }
    CHECK(WEXITSTATUS(pclose(pipe2)) == 2);
}

TEST_CASE("dilate builds for any pair and checks its scale factor") {
    const auto ok = run_cli("dilate --g0 '" + kFnProd + "' --g1 '" + kFnSum +
                            "' --n 1,1");
    REQUIRE(ok.code == 0);
    const json j = json::parse(ok.out);
    CHECK(j["kind"] == "dilation");
    CHECK(j["r"].get<double>() == 1.0);

    const auto bad = run_cli("dilate --g0 '" + kFnProd + "' --g1 '" + kFnSum +
                             "' --n 1,1 --r 0.5");
    CHECK(bad.code == 2);
}
