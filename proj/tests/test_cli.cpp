#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_path = std::string(HOLOPNT_TEST_DATA) + "/cli_out.tmp";
    const std::string cmd =
        std::string(HOLOPNT_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(status), buf.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string(HOLOPNT_TEST_DATA) + "/" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("validate accepts builtins and reports structure") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const RunResult r = run_cli("validate --model " + model);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"number_conserving\": true") != std::string::npos);
    CHECK(r.output.find("holopnt-report/1") != std::string::npos);
}

TEST_CASE("malformed documents exit with code 2 and a position") {
    const std::string model = write_temp("broken.model", "model = \"lambda\"\nedges = [ oops\n");
    const RunResult r = run_cli("validate --model " + model);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 2") != std::string::npos);
}

TEST_CASE("spectrum of the chain shows the two-photon dark degeneracy") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const RunResult r =
        run_cli("spectrum --model " + model + " --N 2 --params theta=0.6,phi=1.1");
    CHECK(r.exit_code == 0);
    // The zero-eigenvalue family gathers 1 + 1 + 2 dark states up to N = 2.
    CHECK(r.output.find("\"degeneracy\": 4") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical reports") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const RunResult a = run_cli("pnt --model " + model + " --N-max 2 --seed 11");
    const RunResult b = run_cli("pnt --model " + model + " --N-max 2 --seed 11");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("\"n_t\": 1") != std::string::npos);
}

TEST_CASE("pnt table format emits one row per eigenspace") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const RunResult r = run_cli("pnt --model " + model + " --N-max 2 --format table");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("label,eigenvalue,degeneracy,particles,dim_F,dim_Hol", 0) == 0);
}

TEST_CASE("curvature subcommand reports the audit spectrum") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const RunResult r =
        run_cli("curvature --model " + model + " --N 1 --block 1 --order 0 --points 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"rank\": 1") != std::string::npos);
    CHECK(r.output.find("singular_values") != std::string::npos);
}

TEST_CASE("holonomy subcommand evaluates a loop document") {
    const std::string model = write_temp("lambda.model", "model = \"lambda\"\n");
    const std::string loop = write_temp("rect.loop", R"(
segments_per_leg = 200
waypoints = [
  { theta = 0.0, phi = 0.0 },
  { theta = 0.785398163, phi = 0.0 },
  { theta = 0.785398163, phi = 1.570796327 },
  { theta = 0.0, phi = 1.570796327 },
]
)");
    const RunResult r =
        run_cli("holonomy --model " + model + " --loop " + loop + " --N 1 --block 1");
    CHECK(r.exit_code == 0);
    // Phase of the single-photon rectangle: pi/4.
    const auto pos = r.output.find("\"phase\": ");
    REQUIRE(pos != std::string::npos);
    const double phase = std::atof(r.output.c_str() + pos + 9);
    CHECK(std::abs(phase - 0.7853981) < 1e-3);
}

TEST_CASE("unknown builtin model exits with input error") {
    const std::string model = write_temp("unknown.model", "model = \"nonesuch\"\n");
    const RunResult r = run_cli("validate --model " + model);
    CHECK(r.exit_code == 2);
}
