#include "doctest.h"
#include "oracles.hpp"

#include "cli.hpp"
#include "relbgk/config.hpp"
#include "relbgk/errors.hpp"
#include "relbgk/io.hpp"
#include "relbgk/relaxation.hpp"
#include "relbgk/specfun.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <numbers>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace relbgk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() / ("relbgk_test_" + std::to_string(::getpid()) + "_" +
                                                      std::to_string(counter++) + "_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path &p, const std::string &text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "relbgk");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = relbgk::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const char *kMinimal = R"({
  "grid": {"q_max": 24, "nodes_per_axis": 24},
  "time": {"dt": 0.1, "t_end": 0.3},
  "initial": {"bumps": [{"n": 1, "beta": 2}]}
})";

} // namespace

TEST_CASE("minimal config fills defaults")
{
    const auto c = parse_config_text(kMinimal);
    CHECK(c.space.mode == SpatialMode::Homogeneous);
    CHECK(c.rule == QuadratureRule::GaussLegendreSinh);
    CHECK(c.interpolation == Interpolation::Linear);
    CHECK_FALSE(c.picard.enabled);
    CHECK(c.mode == OperatorMode::Exact);
    CHECK(c.threads == 1);
    REQUIRE(c.bumps.size() == 1);
    CHECK(c.bumps[0].u == Vec3{});
}

TEST_CASE("physics keys must be explicit")
{
    CHECK_THROWS_AS((void)parse_config_text(R"({"grid": {}, "time": {"t_end": 1}, "initial": {"bumps": [{"n": 1,
                    "beta": 1}]}})"),
                    ValidationError);
    try {
        (void)parse_config_text(R"({"grid": {}, "time": {"t_end": 1}, "initial": {"bumps": [{"n": 1, "beta": 1}]}})");
    } catch (const ValidationError &e) {
        std::vector<std::string> paths;
        for (const auto &v : e.violations()) {
            paths.push_back(v.path);
        }
        CHECK(std::find(paths.begin(), paths.end(), "grid.q_max") != paths.end());
        CHECK(std::find(paths.begin(), paths.end(), "time.dt") != paths.end());
    }
}

TEST_CASE("truncated operator requires a box covering 2 beta_sup^2")
{
    const std::string text = R"({"grid": {"q_max": 10}, "operator": {"kind": "truncated", "beta_sup": 3},
        "time": {"dt": 0.1, "t_end": 1}, "initial": {"bumps": [{"n": 1, "beta": 1}]}})";
    try {
        (void)parse_config_text(text);
        FAIL("expected a validation error");
    } catch (const ValidationError &e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].path == "grid.q_max");
        CHECK(e.violations()[0].constraint.find("18") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_config_text(R"({"grid": {"q_max": 10}, "operator": {"kind": "truncated"},
        "time": {"dt": 0.1, "t_end": 1}, "initial": {"bumps": [{"n": 1, "beta": 1}]}})"),
                    ValidationError);
}

TEST_CASE("unknown keys, wrong types and malformed JSON")
{
    CHECK_THROWS_AS((void)parse_config_text(R"({"grid": {"q_max": 24, "qmax": 3}, "time": {"dt": 0.1, "t_end": 1},
        "initial": {"bumps": [{"n": 1, "beta": 1}]}})"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config_text(R"({"grid": {"q_max": "24"}, "time": {"dt": 0.1, "t_end": 1},
        "initial": {"bumps": [{"n": 1, "beta": 1}]}})"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config_text(R"({"grid": {"q_max": 24}, "time": {"dt": 0.1, "t_end": 1},
        "initial": {"bumps": [{"n": 1, "beta": 1}]}, "colour": 1})"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config_text("{\"grid\": "), ParseError);
    CHECK_THROWS_AS((void)parse_config("/nonexistent/relbgk.json"), ConfigError);
}

TEST_CASE("normalized config round-trips")
{
    const std::string text = R"({"mode": {"kind": "slab", "length": 2, "cells": 16},
        "grid": {"q_max": 40, "nodes_per_axis": 24, "rule": "gauss-legendre-tensor", "force": true},
        "operator": {"kind": "truncated", "beta_sup": 3},
        "time": {"dt": 0.05, "t_end": 1, "snapshot_every": 4},
        "solver": {"interpolation": "cubic", "picard": {"enabled": true, "tol": 1e-10, "max_iter": 9}},
        "initial": {"bumps": [{"n": 1, "beta": 2, "u": [0.1, 0, 0], "profile": {"amplitude": 0.3,
                    "wavenumber": 2, "phase": 0.5}}]},
        "output": {"csv": "/tmp/a.csv", "snapshot_dir": "/tmp/snaps"},
        "seed": 42, "threads": "auto"})";
    const auto a = parse_config_text(text);
    const std::string norm = normalize_config(a);
    const auto b = parse_config_text(norm);
    CHECK(normalize_config(b) == norm);
    CHECK(b.threads == 0);
    CHECK(b.seed == 42);
    CHECK(b.picard.max_iter == 9);
    REQUIRE(b.bumps[0].profile.has_value());
    CHECK(b.bumps[0].profile->wavenumber == 2);
}

TEST_CASE("initial datum follows the bump list")
{
    auto c = parse_config_text(R"({"mode": {"kind": "slab", "length": 2, "cells": 4},
        "grid": {"q_max": 24, "nodes_per_axis": 24}, "time": {"dt": 0.1, "t_end": 1},
        "initial": {"bumps": [{"n": 1, "beta": 2, "profile": {"amplitude": 0.5}}]}})");
    const auto f = build_initial(c);
    CHECK(f.cells() == 4);
    const double m0 = integrate(f.grid(), f.cell(0));
    const double m2 = integrate(f.grid(), f.cell(2));
    CHECK(m0 > m2);
    CHECK(std::fabs(m0 - (1.0 + 0.5 * std::cos(std::numbers::pi * 0.25))) < 1e-8);
}

TEST_CASE("snapshot round trip and corruption")
{
    const auto dir = scratch("snap");
    const auto g = build_grid(24.0, 24, QuadratureRule::GaussLegendreSinh);
    Distribution f(g, SpatialGrid::slab(2.0, 3));
    for (int c = 0; c < 3; ++c) {
        fill_juttner(*g, {1.0 + c, 2.0, {0.1 * c, 0.0, 0.0}}, f.cell(c));
    }
    write_snapshot(dir / "a.relbgk", f, 1.25, "exact", 2);
    const auto s = read_snapshot(dir / "a.relbgk");
    CHECK(s.time == 1.25);
    CHECK(s.mode == "exact");
    CHECK(s.threads == 2);
    CHECK(s.f.space() == f.space());
    CHECK(s.f.values() == f.values());

    const std::string bytes = slurp(dir / "a.relbgk");
    CHECK(bytes.substr(0, 8) == "RELBGK01");
    std::string corrupt = bytes;
    corrupt[corrupt.size() - 3] ^= 0x10;
    spit(dir / "b.relbgk", corrupt);
    CHECK_THROWS_AS((void)read_snapshot(dir / "b.relbgk"), ParseError);
    spit(dir / "c.relbgk", bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS((void)read_snapshot(dir / "c.relbgk"), ParseError);
    spit(dir / "d.relbgk", "RELBGK02" + bytes.substr(8));
    CHECK_THROWS_AS((void)read_snapshot(dir / "d.relbgk"), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("number formatting and checksum")
{
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1e-300) == "1e-300");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("cli: specfun tabulate with one point")
{
    const auto r = invoke({"specfun", "tabulate", "--beta-min", "1", "--beta-max", "1", "--points", "1"});
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "beta,k1,k2,ratio,m,psi");
    std::vector<double> cols;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) {
        cols.push_back(std::stod(cell));
    }
    REQUIRE(cols.size() == 6);
    CHECK(cols[0] == 1.0);
    CHECK(std::fabs(cols[1] / oracle::bessel_k(1, 1.0) - 1.0) < 1e-10);
    CHECK(std::fabs(cols[2] / oracle::bessel_k(2, 1.0) - 1.0) < 1e-10);
    CHECK(std::fabs(cols[4] / oracle::partition_m(1.0) - 1.0) < 1e-10);
}

TEST_CASE("cli: usage and error lines")
{
    auto r = invoke({});
    CHECK(r.code == 1);
    r = invoke({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("relbgk: error[usage]:", 0) == 0);
    r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verify") != std::string::npos);

    r = invoke({"specfun", "tabulate", "--beta-min", "-1"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("relbgk: error[domain]:", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    const auto dir = scratch("err");
    spit(dir / "bad.json", "{\"grid\": {\"q_max\": 24}, \"time\": {\"dt\": -1, \"t_end\": 1}}");
    r = invoke({"run", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("relbgk: error[validation]:", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    spit(dir / "broken.json", "{");
    r = invoke({"run", "--config", (dir / "broken.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("relbgk: error[parse]:", 0) == 0);

    r = invoke({"project", "--in", (dir / "missing.relbgk").string()});
    CHECK(r.code == 1);
    fs::remove_all(dir);
}

TEST_CASE("cli: internal failures exit with 2")
{
    const auto dir = scratch("internal");
    // a Picard budget of one iteration with an unreachable tolerance
    spit(dir / "c.json", R"({"grid": {"q_max": 24, "nodes_per_axis": 24},
        "operator": {"kind": "truncated", "beta_sup": 2},
        "time": {"dt": 0.1, "t_end": 0.1},
        "solver": {"picard": {"enabled": true, "tol": 1e-300, "max_iter": 1}},
        "initial": {"bumps": [{"n": 1, "beta": 2}]},
        "output": {"snapshot_dir": ")" + (dir / "s").string() + R"("}})");
    const auto r = invoke({"run", "--config", (dir / "c.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("relbgk: error[convergence]:", 0) == 0);
    CHECK(fs::exists(dir / "s" / "failure_dump.relbgk"));
    fs::remove_all(dir);
}

TEST_CASE("cli: run then project recovers the equilibrium temperature")
{
    const auto dir = scratch("runproj");
    const std::string cfg = R"({"grid": {"q_max": 24, "nodes_per_axis": 32},
        "time": {"dt": 0.25, "t_end": 60, "snapshot_every": 40},
        "initial": {"bumps": [{"n": 0.6, "beta": 4, "u": [0.5, 0, 0]}, {"n": 0.4, "beta": 2.5, "u": [-0.4, 0.3, 0]}]},
        "output": {"csv": ")" + (dir / "d.csv").string() + R"(", "snapshot_dir": ")" + (dir / "snaps").string() +
                            R"("}})";
    spit(dir / "homog.json", cfg);
    auto r = invoke({"run", "--config", (dir / "homog.json").string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "snaps" / "step_00000040.relbgk"));
    CHECK(fs::exists(dir / "snaps" / "final.relbgk"));
    const std::string csv = slurp(dir / "d.csv");
    CHECK(csv.rfind("# relbgk threads=1\nstep,t,mass,mom_x,mom_y,mom_z,energy,entropy,mass_defect,energy_defect,"
                    "min_f,entropy_delta,clamp_events\n",
                    0) == 0);

    r = invoke({"project", "--in", (dir / "snaps" / "final.relbgk").string(), "--out", (dir / "f.csv").string()});
    REQUIRE(r.code == 0);
    std::istringstream in(slurp(dir / "f.csv"));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "x,n,ux,uy,uz,beta,e,p,sigma,vacuum");
    std::getline(in, line);
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        cols.push_back(cell);
    }
    REQUIRE(cols.size() == 10);

    // totals of the initial datum in closed form
    double m0 = 0.0, me = 0.0;
    Vec3 mv{};
    for (const JuttnerParams p : {JuttnerParams{0.6, 4.0, {0.5, 0.0, 0.0}}, JuttnerParams{0.4, 2.5, {-0.4, 0.3, 0.0}}}) {
        const double h = 4.0 / p.beta + ratio_k1k2(p.beta);
        m0 += p.n * p.u0();
        mv += p.n * h * p.u0() * p.u;
        me += p.n * (h * p.u0() * p.u0() - 1.0 / p.beta);
    }
    // nodes at |q| near q_max relax at rate 1/q0, hence the long horizon
    const auto eq = equilibrium_from_invariants(m0, mv, me);
    CHECK(std::fabs(std::stod(cols[5]) - eq.beta) < 1e-4);
    CHECK(cols[9] == "0");
    fs::remove_all(dir);
}

TEST_CASE("cli: identical runs write identical bytes")
{
    const auto dir = scratch("det");
    for (const char *name : {"a", "b"}) {
        const std::string cfg = R"({"mode": {"kind": "slab", "length": 1, "cells": 8},
            "grid": {"q_max": 24, "nodes_per_axis": 16, "force": true},
            "time": {"dt": 0.1, "t_end": 0.3}, "solver": {"interpolation": "cubic"},
            "initial": {"bumps": [{"n": 1, "beta": 2, "profile": {"amplitude": 0.4}}]},
            "threads": 2, "output": {"csv": ")" + (dir / (std::string(name) + ".csv")).string() + R"("}})";
        spit(dir / (std::string(name) + ".json"), cfg);
        REQUIRE(invoke({"run", "--config", (dir / (std::string(name) + ".json")).string()}).code == 0);
    }
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").rfind("# relbgk threads=2\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("cli: verify writes one JSON report per inequality")
{
    const auto r = invoke({"verify", "--trials", "3", "--seed", "7", "--beta-sup", "2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.is_array());
    CHECK(j.size() >= 9);
    for (const auto &rep : j) {
        CHECK(rep.contains("lemma"));
        CHECK(rep.contains("trials"));
        CHECK(rep.contains("worst_margin"));
        CHECK(rep.contains("failures"));
        CHECK(rep.at("seed") == 7);
    }
}
