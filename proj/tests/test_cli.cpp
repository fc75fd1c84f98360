#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CIR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) r.stdout_text += buf;
    const int status = pclose(pipe);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int count_data_rows(const std::string& csv) {
    int rows = 0;
    bool seen_header = false;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

}  // namespace

TEST_CASE("validate: gate violation exits 2, valid exits 0, structural exits 64") {
    CHECK(run("validate --scheme sd --a 0 --k 2 --l 1 --sigma 3 --steps 10 --t-max 1").exit_code == 2);
    CHECK(run("validate --scheme sd --a 1 --k 2 --l 1 --sigma 3 --steps 10 --t-max 1").exit_code == 0);
    CHECK(run("validate --scheme sd --a 1 --k 2 --l 1 --sigma -1 --steps 10 --t-max 1").exit_code == 64);
    CHECK(run("validate --bogus-flag 1").exit_code == 64);
}

TEST_CASE("simulate: deterministic CSV with the documented shape") {
    const std::string out = "/tmp/cir_cli_sim.csv";
    const std::string flags = "simulate --scheme sd --a 1 --k 2 --l 1 --sigma 1 --x0 4 "
                              "--t-max 1 --steps 10000 --paths 1 --seed 42 --out " + out;
    CHECK(run(flags).exit_code == 0);
    const std::string first = slurp(out);
    CHECK(count_data_rows(first) == 10001);
    CHECK(first.find("path_id,t,y\n") != std::string::npos);
    // all y >= 0
    std::istringstream is(first);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto last_comma = line.rfind(',');
        CHECK(std::stod(line.substr(last_comma + 1)) >= 0.0);
    }
    CHECK(run(flags).exit_code == 0);
    CHECK(slurp(out) == first);  // byte identical rerun
}

TEST_CASE("simulate: zero paths gives a header-only file") {
    const std::string out = "/tmp/cir_cli_sim0.csv";
    CHECK(run("simulate --scheme sd --a 1 --k 2 --l 1 --sigma 1 --x0 4 --t-max 1 "
              "--steps 10 --paths 0 --out " + out).exit_code == 0);
    CHECK(count_data_rows(slurp(out)) == 0);
}

TEST_CASE("simulate: two-factor emits four columns") {
    const std::string out = "/tmp/cir_cli_sim2.csv";
    CHECK(run("simulate --scheme tf-squared --k 2 --l 1 --lambda11 1 --lambda21 1 "
              "--sigma1 1 --sigma2 1 --x10 1 --x20 1 --t-max 1 --steps 8 --paths 2 --out " +
              out).exit_code == 0);
    CHECK(slurp(out).find("path_id,t,y1,y2\n") != std::string::npos);
    CHECK(count_data_rows(slurp(out)) == 18);
}

TEST_CASE("converge: report pair, determinism modulo runtime") {
    const std::string base = "/tmp/cir_cli_conv";
    const std::string flags = "converge --scheme sd --a 0 --k 2 --l 1 --sigma 0.5 --x0 4 "
                              "--t-max 1 --steps 16 --levels 3 --paths 400 --seed 9 --out " + base;
    CHECK(run(flags).exit_code == 0);
    const std::string json1 = slurp(base + ".json");
    const std::string csv1 = slurp(base + ".csv");
    CHECK(json1.find("\"schema\": 1") != std::string::npos);
    CHECK(json1.find("\"fitted_order\"") != std::string::npos);
    CHECK(run(flags).exit_code == 0);
    const std::string json2 = slurp(base + ".json");
    // identical except the runtime_seconds line
    std::istringstream a(json1), b(json2);
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
        if (la.find("runtime_seconds") != std::string::npos) continue;
        CHECK(la == lb);
    }
    CHECK(slurp(base + ".csv") == csv1);
    CHECK(run("converge --scheme sd --a 0 --k 2 --l 1 --sigma 0.5 --x0 4 --t-max 1 "
              "--steps 16 --levels 1 --paths 10 --out " + base).exit_code == 2);
}

TEST_CASE("signflip: sigma = 0 ladder is all zeros; non-sd scheme rejected") {
    const std::string base = "/tmp/cir_cli_flip";
    CHECK(run("signflip --scheme sd --a 0 --k 2 --l 1 --sigma 0 --x0 4 --t-max 1 "
              "--steps 8 --levels 3 --paths 50 --out " + base).exit_code == 0);
    const std::string csv = slurp(base + ".csv");
    std::istringstream is(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            CHECK(line == "delta,flip_fraction");
            continue;
        }
        CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.0);
    }
    CHECK(run("signflip --scheme euler --k 2 --l 1 --sigma 1 --x0 4 --steps 8 --levels 3 "
              "--paths 10 --out " + base).exit_code == 2);
}

TEST_CASE("artifacts embed config and version") {
    const std::string out = "/tmp/cir_cli_echo.csv";
    CHECK(run("simulate --scheme sd --a 1 --k 2 --l 1 --sigma 1 --x0 4 --t-max 1 "
              "--steps 4 --paths 1 --seed 3 --out " + out).exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find("# version=") != std::string::npos);
    CHECK(csv.find("# seed=3") != std::string::npos);
    CHECK(csv.find("# scheme=sd") != std::string::npos);
}
