#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "halfline/io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "halfline_cli_test";
    fs::create_directories(dir);
    const fs::path log = dir / ("out" + std::to_string(counter++) + ".log");
    const std::string cmd =
        std::string(HALFLINE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream buf;
    buf << in.rdbuf();
    int code = -1;
    if (WIFEXITED(status)) code = WEXITSTATUS(status);
    return {code, buf.str()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "halfline_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path.string();
}

const char* kBenchmarkConfig = R"([problem]
horizon = 1.0
control = interval
alpha_min = -1
alpha_max = 1

[sigma]
kind = constant
value = 1.0

[drift]
kind = polynomial
ca = 1.0

[discount]
kind = constant
value = 0.0

[reward]
kind = constant
value = 1.0

[boundary_terminal]
kind = constant
value = 0.0

[boundary_lateral]
kind = constant
value = 0.0

[mesh]
x_max = 6.0
nx = 81
nt = 101

[iteration]
kappa = auto
tol = 1e-7
max_iter = 100

[montecarlo]
paths = 20000
dt = 1e-3
seed = 7
workers = 2
)";

const char* kBadSigmaConfig = R"([problem]
horizon = 1.0
control = interval
alpha_min = -1
alpha_max = 1

[sigma]
kind = polynomial
cx = 1.0

[drift]
kind = constant
value = 0.0

[discount]
kind = constant
value = 0.0

[reward]
kind = constant
value = 1.0

[boundary_terminal]
kind = constant
value = 0.0

[boundary_lateral]
kind = constant
value = 0.0

[assumptions]
sigma_min = 0.05
)";

}  // namespace

TEST_CASE("validate: benchmark passes, vanishing sigma fails with a B1/A1 report") {
    const std::string good = write_file("bench.conf", kBenchmarkConfig);
    const RunResult ok = run_cli("validate " + good);
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("PASS") != std::string::npos);

    const std::string bad = write_file("bad_sigma.conf", kBadSigmaConfig);
    const RunResult fail = run_cli("validate " + bad);
    CHECK(fail.exit_code == 1);
    CHECK(fail.output.find("A1") != std::string::npos);
    CHECK(fail.output.find("FAIL") != std::string::npos);
}

TEST_CASE("validate: declared constants inconsistent with samples fail with the worst pair") {
    std::string body = kBadSigmaConfig;
    const std::string marker = "[assumptions]\nsigma_min = 0.05\n";
    body.replace(body.find(marker), marker.size(),
                 "[assumptions]\nlip_coeffs = 0.0001\n");
    // Make the reward x-dependent so B3's Lipschitz quotient is nonzero.
    const std::string reward_marker = "[reward]\nkind = constant\nvalue = 1.0\n";
    body.replace(body.find(reward_marker), reward_marker.size(),
                 "[reward]\nkind = polynomial\ncx = 1.0\n");
    // Restore a valid sigma.
    const std::string sigma_marker = "[sigma]\nkind = polynomial\ncx = 1.0\n";
    body.replace(body.find(sigma_marker), sigma_marker.size(),
                 "[sigma]\nkind = constant\nvalue = 1.0\n");
    const std::string path = write_file("tight_bounds.conf", body);
    const RunResult r = run_cli("validate " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("worst pair") != std::string::npos);
}

TEST_CASE("solve writes outputs and converges on the benchmark") {
    const std::string conf = write_file("bench.conf", kBenchmarkConfig);
    const fs::path out = scratch_dir() / "solve_out";
    const RunResult r = run_cli("solve " + conf + " --out-dir " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "value.csv"));
    CHECK(fs::exists(out / "derivative.csv"));
    CHECK(fs::exists(out / "policy.csv"));
    CHECK(fs::exists(out / "diagnostics.jsonl"));

    // Diagnostics parse as JSON lines and end below the tolerance.
    std::ifstream diag(out / "diagnostics.jsonl");
    std::string line, last;
    int lines = 0;
    while (std::getline(diag, line))
        if (!line.empty()) {
            ++lines;
            last = line;
            const auto rec = nlohmann::json::parse(line);
            CHECK(rec.contains("n"));
            CHECK(rec.contains("bielecki_diff"));
            CHECK(rec.contains("sup_diff"));
            CHECK(rec.contains("q_estimate"));
        }
    CHECK(lines >= 2);
    CHECK(nlohmann::json::parse(last).at("bielecki_diff").get<double>() <= 1e-7);

    // The exported value grid has the derivative column.
    auto [value, deriv] = halfline::read_grid_csv((out / "value.csv").string());
    CHECK(deriv.has_value());
    CHECK(value.mesh().n_x == 81);
}

TEST_CASE("solve with a one-iteration cap reports non-convergence but writes files") {
    const std::string conf = write_file("bench.conf", kBenchmarkConfig);
    const fs::path out = scratch_dir() / "solve_cap";
    const RunResult r =
        run_cli("solve " + conf + " --max-iter 1 --out-dir " + out.string());
    CHECK(r.exit_code == 2);
    CHECK(fs::exists(out / "value.csv"));
    CHECK(fs::exists(out / "policy.csv"));
}

TEST_CASE("verify passes on a fresh solve and catches tampered values") {
    const std::string conf = write_file("bench.conf", kBenchmarkConfig);
    const fs::path out = scratch_dir() / "verify_out";
    REQUIRE(run_cli("solve " + conf + " --out-dir " + out.string()).exit_code == 0);

    const RunResult good = run_cli("verify " + conf + " " + out.string() + " --points 4");
    CHECK(good.exit_code == 0);
    CHECK(good.output.find("verification passed") != std::string::npos);

    // Scale the stored solution by 1.5 and expect detection.
    auto [value, deriv] = halfline::read_grid_csv((out / "value.csv").string());
    for (double& v : value.values()) v *= 1.5;
    if (deriv)
        for (double& v : deriv->values()) v *= 1.5;
    halfline::write_grid_csv((out / "value.csv").string(), value, deriv ? &*deriv : nullptr);
    const RunResult bad = run_cli("verify " + conf + " " + out.string() + " --points 4");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("FAIL") != std::string::npos);
}

TEST_CASE("simulate emits a deterministic JSON estimate") {
    const std::string conf = write_file("bench.conf", kBenchmarkConfig);
    const RunResult a = run_cli("simulate " + conf + " --x 1.0 --paths 20000");
    const RunResult b = run_cli("simulate " + conf + " --x 1.0 --paths 20000");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    const auto rec = nlohmann::json::parse(a.output);
    CHECK(rec.contains("mean"));
    CHECK(rec.contains("stderr"));
    CHECK(rec.at("n_paths") == 20000);
}

TEST_CASE("bench produces a refinement table with a reproducible seeded row") {
    const fs::path csv1 = scratch_dir() / "bench1.csv";
    const fs::path csv2 = scratch_dir() / "bench2.csv";
    CHECK(run_cli("bench --levels 1 --seed 5 --out " + csv1.string()).exit_code == 0);
    CHECK(run_cli("bench --levels 1 --seed 5 --out " + csv2.string()).exit_code == 0);

    auto read_lines = [](const fs::path& p) {
        std::ifstream in(p);
        std::vector<std::string> ls;
        std::string l;
        while (std::getline(in, l)) ls.push_back(l);
        return ls;
    };
    const auto l1 = read_lines(csv1), l2 = read_lines(csv2);
    REQUIRE(l1.size() == l2.size());
    REQUIRE(l1.size() >= 3);  // header + pde level + mc row
    CHECK(l1[0] == "kind,level,n_x,n_t,paths,dt,value,error,seconds");
    // The value/error columns of the Monte Carlo row are seed-reproducible.
    auto strip_time = [](const std::string& row) { return row.substr(0, row.rfind(',')); };
    CHECK(strip_time(l1.back()) == strip_time(l2.back()));
}

TEST_CASE("config and usage errors exit with code 3") {
    std::string body = kBenchmarkConfig;
    body += "\n[mesh]\n";  // duplicate section
    const std::string dup = write_file("dup.conf", body);
    CHECK(run_cli("validate " + dup).exit_code == 3);

    std::string unknown = kBenchmarkConfig;
    unknown += "\n[scheme]\nwhatever = 1\n";
    CHECK(run_cli("validate " + write_file("unknown.conf", unknown)).exit_code == 3);

    CHECK(run_cli("").exit_code == 3);
    CHECK(run_cli("validate /nonexistent/path.conf").exit_code == 3);
}
