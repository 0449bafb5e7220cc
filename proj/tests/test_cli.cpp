#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "elliptic/cli.hpp"
#include "elliptic/shooting.hpp"

using namespace elliptic;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "elliptic_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ground report for the N=3 cubic") {
    const auto r = run({"ground", "--family", "power", "--lambda", "1", "--p", "3", "--N", "3"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["config_hash"].get<std::string>().size() == 64);
    CHECK(j["tolerances"].contains("ode_tol"));

    FamilySpec spec;
    RadialProblem prob(3, builtin_model(spec));
    const auto g = find_ground_state(prob, structural_constants(*prob.model), 0.0);
    CHECK(j["ground"]["d0"].get<double>() == g.d0);
    CHECK(std::abs(j["ground"]["decay_rate"].get<double>() + 1.0) < 1e-3);
    CHECK(j["ground"]["r_delta"].is_number());
    CHECK(j["ground"]["strict_admissibility"] == "Strict");
    CHECK(r.err.find("strict=Strict") != std::string::npos);
}

TEST_CASE("check fails nagumo c = 0.6 on H3 with the integral witness") {
    const auto r = run({"check", "--family", "nagumo", "--c", "0.6"});
    CHECK(r.code == 2);
    const auto j = json::parse(r.out);
    bool found = false;
    for (const auto& c : j["report"]["conditions"]) {
        if (c["label"] != "G3") continue;
        found = true;
        CHECK(c["alias"] == "H3");
        CHECK(c["verdict"] == "fail");
        CHECK(c["witness"]["abscissa"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(c["witness"]["value"].get<double>() == doctest::Approx(1.0 / 12.0 - 0.6 / 6.0).epsilon(1e-6));
    }
    CHECK(found);
    CHECK(r.err.find("H3") != std::string::npos);
    CHECK(run({"check", "--family", "nagumo", "--c", "0.3"}).code == 0);
}

TEST_CASE("quasilinear check uses H and A labels") {
    const auto r = run({"check", "--mnls", "--family", "power", "--p", "2", "--N", "2"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    std::set<std::string> labels;
    for (const auto& c : j["report"]["conditions"]) labels.insert(c["label"]);
    CHECK(labels == std::set<std::string>{"H1", "H2", "H3", "H4", "H5", "A1", "A2", "A3", "A4"});
}

TEST_CASE("dual --mnls --spectrum gives the full kernel report") {
    const auto r = run({"dual", "--mnls", "--N", "2", "--lambda", "1", "--kappa", "1", "--p", "2", "--spectrum"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["dual"]["dual_ground"]["strict_admissibility"] == "Strict");
    CHECK(j["dual"]["dual_K_infty"].get<double>() == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(j["spectrum"]["verdicts"].size() == 3);
    for (const auto& v : j["spectrum"]["verdicts"]) CHECK(v["pass"] == true);
    CHECK(run({"dual", "--N", "2"}).code == 1);
    CHECK(run({"dual", "--diffusion", "two_power", "--N", "2", "--p", "2", "--spectrum"}).code == 1);
}

TEST_CASE("spectrum, classify and diagnose commands") {
    CHECK(run({"spectrum", "--N", "3"}).code == 0);
    const auto c = run({"classify", "--d", "5", "--N", "3"});
    CHECK(c.code == 0);
    CHECK(json::parse(c.out)["classification"]["kind"] == "CrossesZero");
    CHECK(run({"classify", "--N", "3"}).code == 1);  // --d is required
    const auto d = run({"diagnose", "--N", "3"});
    CHECK(d.code == 0);
    CHECK(json::parse(d.out)["key_lemma"]["all_pass"] == true);
}

TEST_CASE("exit codes for usage, structure and numerical failures") {
    CHECK(run({}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"ground", "--N", "1"}).code == 1);
    CHECK(run({"ground", "--ode-tol", "1e-2"}).code == 1);
    CHECK(run({"check", "--family", "nagumo", "--p", "2"}).code == 1);
    CHECK(run({"ground", "--g", "s"}).code == 1);
    CHECK(run({"--help"}).code == 0);
    // no sign change of g: the structure hypothesis fails
    CHECK(run({"ground", "--family", "cubic_quintic_focusing", "--c", "2.0"}).code == 2);
    // mesh too coarse for the decay length
    CHECK(run({"spectrum", "--mesh-n", "100"}).code == 4);
}

TEST_CASE("sweep rows, parallel determinism and empty lists") {
    const std::vector<std::string> base = {"sweep", "--mnls", "--N", "2", "--parameter", "p", "--values",
                                           "1.5,2,2.5,3,4"};
    auto serial = base, parallel = base;
    serial.insert(serial.end(), {"--jobs", "1"});
    parallel.insert(parallel.end(), {"--jobs", "4"});
    const auto a = run(serial), b = run(parallel);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    REQUIRE(j["rows"].size() == 5);
    for (const auto& row : j["rows"]) {
        CHECK(row["status"] == "ok");
        const double p = row["value"];
        CHECK(row["K_infty"].get<double>() == doctest::Approx((p - 1) / 2).epsilon(1e-4));
    }

    CHECK(run({"sweep", "--parameter", "p", "--values", ""}).code == 1);
    CHECK(run({"sweep", "--parameter", "p"}).code == 1);
    CHECK(run({"sweep", "--parameter", "zzz", "--values", "1"}).code == 1);
    CHECK(run({"sweep", "--parameter", "p", "--values", "2,x"}).code == 1);

    // A failing row is recorded and the sweep continues.
    const auto f = run({"sweep", "--family", "cubic_quintic_focusing", "--N", "3", "--parameter", "c", "--values",
                        "2.0,2.8", "--jobs", "2"});
    CHECK(f.code != 0);
    const auto fj = json::parse(f.out);
    CHECK(fj["rows"][0]["status"] == "failed");
    CHECK(fj["rows"][1]["status"] == "ok");
}

TEST_CASE("ELLIPTIC_SHOOTER_JOBS must be a positive integer") {
    ::setenv("ELLIPTIC_SHOOTER_JOBS", "zero", 1);
    CHECK(run({"sweep", "--parameter", "lambda", "--values", "1"}).code == 1);
    ::setenv("ELLIPTIC_SHOOTER_JOBS", "2", 1);
    CHECK(run({"sweep", "--parameter", "lambda", "--values", "1,4"}).code == 0);
    ::unsetenv("ELLIPTIC_SHOOTER_JOBS");
}

TEST_CASE("CSV output keeps 17 significant digits") {
    const auto j = run({"sweep", "--parameter", "lambda", "--values", "1,4", "--N", "3"});
    const auto c = run({"sweep", "--parameter", "lambda", "--values", "1,4", "--N", "3", "--format", "csv"});
    REQUIRE(c.code == 0);
    std::istringstream in(c.out);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# schema=1 config_hash=", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("lambda,status,d0", 0) == 0);
    const auto rows = json::parse(j.out)["rows"];
    for (int i = 0; i < 2; ++i) {
        std::getline(in, line);
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        CHECK(std::stod(cells[2]) == rows[i]["d0"].get<double>());
        CHECK(std::stod(cells[4]) == rows[i]["decay_rate"].get<double>());
    }
}

TEST_CASE("profile CSV and --out file") {
    const auto prof = scratch("profile.csv"), out = scratch("ground.json");
    const auto r = run({"ground", "--N", "3", "--profile", prof.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto j = json::parse(slurp(out));
    std::istringstream in(slurp(prof));
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,u,u_prime,delta");
    std::getline(in, line);
    // first node: Taylor start u(r0) = d0 - g(d0) r0^2 / (2N), g = -s + s^3
    std::vector<double> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(std::stod(cell));
    const double d0 = j["ground"]["d0"].get<double>(), r0 = cells[0];
    CHECK(cells[1] == doctest::Approx(d0 - (-d0 + d0 * d0 * d0) * r0 * r0 / 6.0).epsilon(1e-15));
}

TEST_CASE("JSON config: keys, overrides and rejection of unknown keys") {
    const auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"command": "check", "family": "nagumo", "c": 0.6, "N": 3})";
    CHECK(run({"--config", cfg.string()}).code == 2);
    CHECK(run({"check", "--config", cfg.string()}).code == 2);
    // explicit flags win over the file
    CHECK(run({"check", "--config", cfg.string(), "--c", "0.3"}).code == 0);
    CHECK(run({"ground", "--config", cfg.string()}).code == 1);

    const auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"family": "power", "tolerance": 1})";
    CHECK(run({"ground", "--config", bad.string()}).code == 1);
    const auto broken = scratch("broken.json");
    std::ofstream(broken) << "{not json";
    CHECK(run({"ground", "--config", broken.string()}).code == 1);
    CHECK(run({"ground", "--config", scratch("missing.json").string()}).code == 1);
}

TEST_CASE("identical config gives byte-identical JSON and hash") {
    const auto a = run({"dual", "--mnls", "--N", "2", "--p", "2.5"});
    const auto b = run({"dual", "--p", "2.5", "--N", "2", "--mnls"});
    CHECK(a.out == b.out);
    const auto c = run({"dual", "--mnls", "--N", "2", "--p", "2"});
    CHECK(json::parse(a.out)["config_hash"] != json::parse(c.out)["config_hash"]);
}
