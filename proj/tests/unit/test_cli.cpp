#include <doctest.h>

#include "cli.hpp"

#include "oscdelta/serialization.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace oscdelta;
using oscdelta::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("oscdelta_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("resolve applies per-command defaults") {
    cli::RunConfig c;
    c.command = "fs";
    cli::ResolvedRun r = cli::resolve(c);
    CHECK(r.params.E() == 2.5);
    CHECK(r.params.V0() == 10.0);
    CHECK(r.params.eps() == 1.0);
    CHECK(r.params.Omega() == 1.0);
    CHECK(r.params.hbar() == 1.0);
    CHECK(r.params.mass() == 0.5);

    c.command = "sweep";
    r = cli::resolve(c);
    CHECK(r.params.eps() == 1e-3);
    REQUIRE(r.omega_grid.size() == 20);
    CHECK(r.omega_grid.front() == 0.01);
    CHECK(r.omega_grid.back() == 0.2);

    c.command = "fs";
    c.eps = 2.0;
    CHECK_THROWS_AS(cli::resolve(c), InvalidParameter);
    c.eps.reset();
    c.command = "sweep";
    c.omega_points = 0;
    CHECK_THROWS_AS(cli::resolve(c), InvalidParameter);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"bogus"}).code == cli::kUsage);
    CHECK(run({"fs", "--no-such-flag"}).code == cli::kUsage);
    CHECK(run({"fs", "--eps", "2"}).code == cli::kUsage);
    CHECK(run({"fs", "--E", "abc"}).code == cli::kUsage);
    CHECK(run({"fs", "--format", "xml"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kSuccess);

    const Result ts = run({"ts", "--eps", "0"});
    CHECK(ts.code == cli::kSolverFailure);
    CHECK_FALSE(ts.err.empty());

    const Result stiff = run({"fs", "--E", "0.01", "--omega", "0.001", "--eps", "1", "--V0", "1000"});
    CHECK(stiff.code == cli::kConvergenceFailure);
    CHECK(stiff.err.find("converge") != std::string::npos);

    CHECK(run({"fs", "--out", "/nonexistent-dir/x.csv"}).code == 1);
}

TEST_CASE("fs output") {
    SUBCASE("CSV at eps = 0 is single-channel scattering") {
        const Result r = run({"fs", "--eps", "0"});
        REQUIRE(r.code == 0);
        const Table t = parse_csv(r.out);
        CHECK(t.columns == std::vector<std::string>{"n", "re_r", "im_r", "I_n", "kind"});
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (t.number(i, "n") == 0.0) {
                CHECK(t.number(i, "I_n") == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
            } else {
                CHECK(t.number(i, "I_n") == 0.0);
            }
        }
    }
    SUBCASE("JSON is unitary") {
        const Result r = run({"fs", "--format", "json", "--E", "1.5"});
        REQUIRE(r.code == 0);
        const SidebandSolution s = parse_sideband_json(r.out);
        CHECK(s.params.E == 1.5);
        CHECK(std::abs(s.flux_sum() - 1.0) <= 1e-8);
    }
    SUBCASE("fixed window") {
        const Result r = run({"fs", "--trunc", "3"});
        REQUIRE(r.code == 0);
        CHECK(parse_csv(r.out).rows.size() == 7);
    }
    SUBCASE("repeated runs are byte-identical") {
        CHECK(run({"fs", "--format", "json"}).out == run({"fs", "--format", "json"}).out);
        CHECK(run({"ts"}).out == run({"ts"}).out);
    }
}

TEST_CASE("config file with flag overrides") {
    TempDir dir;
    const auto cfg = dir.path / "run.ini";
    {
        std::ofstream f(cfg);
        f << "E = 1.5\neps = 0.5\nV0 = 5\nformat = json\n";
    }
    const Result from_file = run({"fs", "--config", cfg.string()});
    REQUIRE(from_file.code == 0);
    SidebandSolution s = parse_sideband_json(from_file.out);
    CHECK(s.params.E == 1.5);
    CHECK(s.params.eps == 0.5);
    CHECK(s.params.V0 == 5.0);

    const Result overridden = run({"fs", "--config", cfg.string(), "--E", "2.0"});
    REQUIRE(overridden.code == 0);
    s = parse_sideband_json(overridden.out);
    CHECK(s.params.E == 2.0);
    CHECK(s.params.eps == 0.5);

    CHECK(run({"fs", "--config", (dir.path / "missing.ini").string()}).code == cli::kUsage);
}

TEST_CASE("fig2 panels") {
    for (const char* panel : {"a", "b", "c", "d"}) {
        const Result r = run({"fig2", "--panel", panel});
        REQUIRE(r.code == 0);
        const Table t = parse_csv(r.out);
        CHECK(t.columns == std::vector<std::string>{"n", "I_fs", "I_ts"});
        REQUIRE(t.rows.size() == 11);
        CHECK(t.number(0, "n") == -5.0);
        CHECK(t.number(10, "n") == 5.0);
        for (std::size_t i = 0; i < 11; ++i) {
            CHECK(t.number(i, "I_fs") >= 0.0);
            CHECK(t.number(i, "I_ts") >= 0.0);
        }
    }
    CHECK(run({"fig2", "--panel", "e"}).code == cli::kUsage);
}

TEST_CASE("sweep writes the table and a JSON sidecar") {
    TempDir dir;
    const auto csv = dir.path / "sweep.csv";
    const Result r = run({"sweep", "--out", csv.string(), "--omega-points", "8"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("slope") != std::string::npos);
    const Table t = parse_csv(slurp(csv));
    CHECK(t.columns == std::vector<std::string>{"omega", "I_m1", "I_0", "I_p1", "F", "regime"});
    CHECK(t.rows.size() == 8);
    const SweepResult side = parse_sweep_json(slurp(csv.string() + ".json"));
    REQUIRE(side.fit);
    CHECK(side.fit->slope < 0.0);
    CHECK(side.points.size() == 8);
    CHECK(side.points[3].i_plus == t.number(3, "I_p1"));

    const Result again = run({"sweep", "--omega-points", "8", "--solver", "ts"});
    REQUIRE(again.code == 0);
    CHECK(again.out == run({"sweep", "--omega-points", "8", "--solver", "ts"}).out);
    CHECK(run({"sweep", "--solver", "xx"}).code == cli::kUsage);
    CHECK(run({"sweep", "--omega-min", "0.3", "--omega-max", "0.1"}).code == cli::kUsage);
}

TEST_CASE("sweep regime (c) table") {
    const Result r = run({"sweep", "--regime-c", "--E", "0.5", "--omega-min", "1", "--omega-max", "10",
                          "--omega-points", "5"});
    REQUIRE(r.code == 0);
    const Table t = parse_csv(r.out);
    CHECK(t.columns == std::vector<std::string>{"omega", "F_amplitude", "F_flux", "reference"});
    CHECK(t.rows.size() == 5);
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.number(i, "F_flux") == 1.0);
}

TEST_CASE("short tdse run") {
    const Result r = run({"tdse", "--L", "20", "--k-mean", "3", "--omega", "2", "--t-final", "0.5"});
    REQUIRE(r.code == 0);
    const Table t = parse_csv(r.out);
    CHECK(t.columns == std::vector<std::string>{"t", "norm", "p_right"});
    CHECK(t.number(t.rows.size() - 1, "t") == doctest::Approx(0.5));
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(std::abs(t.number(i, "norm") - 1.0) <= 1e-7);
    CHECK(run({"tdse", "--L", "20", "--sigma", "5"}).code == cli::kUsage);
}
