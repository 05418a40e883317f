#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "chb/cli.hpp"
#include "chb/construction.hpp"
#include "chb/field_io.hpp"
#include "chb/parallel.hpp"

using namespace chb;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "chb");
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("chb_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    return rows;
}

}  // namespace

TEST_CASE("parse_config defaults and examples") {
    CHECK(parse_config("") == RunConfig{});
    CHECK(parse_config("# only a comment\n\n   \n") == RunConfig{});

    const RunConfig c = parse_config("phi=0.1\nlength=400\ndim=2");
    CHECK(c.model_params().xi == doctest::Approx(5.428835233189813).epsilon(1e-12));
    CHECK(c.model_params().xi == doctest::Approx(5.4288).epsilon(1e-4));

    CHECK_THROWS_WITH_AS(parse_config("phi=2.0"), doctest::Contains("phi"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("colour=blue"), doctest::Contains("colour"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("grid=big"), doctest::Contains("grid"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("grid=big"), doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("phi=abc"), doctest::Contains("number"), ConfigError);
    CHECK_THROWS_AS(parse_config("phi"), ConfigError);
    CHECK_THROWS_AS(parse_config("phis=0.1,0.2"), ConfigError);

    const RunConfig commented = parse_config("phi = 0.25  # trailing note\ncommand=saddle\nxi=inf\n");
    CHECK(commented.phi == 0.25);
    CHECK(commented.command == Command::saddle);
    REQUIRE(commented.xi.has_value());
    CHECK(std::isinf(*commented.xi));
}

TEST_CASE("parse_config round trip") {
    RunConfig c;
    c.command = Command::gamma;
    c.dim = 3;
    c.phi = 0.1 / 3.0;
    c.length = std::sqrt(2.0) * 100.0;
    c.xi = 2.0 / 3.0 + 1.0;
    c.grid = 96;
    c.images = 20;
    c.R = std::acos(-1.0);
    c.kappa = 0.15;
    c.samples = 17;
    c.threads = 3;
    c.out = "results/run one";
    c.input = "field.chf";
    c.step = 1e-3 / 7.0;
    c.max_iter = 123;
    c.tol = 3e-7;
    c.radius = 0.9;
    c.phis = {0.3, 0.2 / 3.0, 0.01};
    c.eps0 = 0.04;
    c.resolution = 0.2;
    CHECK(parse_config(c.to_text()) == c);
    CHECK(parse_config(RunConfig{}.to_text()) == RunConfig{});
}

TEST_CASE("model parameters from a config") {
    RunConfig c;
    CHECK_THROWS_AS(c.model_params(), ConfigError);
    c.xi = 2.0;
    CHECK(c.model_params().xi == doctest::Approx(2.0).epsilon(1e-14));
    c.length = 100.0;
    CHECK(c.model_params().length == 100.0);
}

TEST_CASE("constants") {
    const Run r = run({"constants", "--dim", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find('\n') == r.out.size() - 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["c0"].get<double>() == doctest::Approx(0.9428090415820634).epsilon(1e-14));
    CHECK(j["cbar1"].get<double>() == doctest::Approx(3.342171032841334).epsilon(1e-14));
    CHECK(j["xi_d"].get<double>() == doctest::Approx(1.6765391932197437).epsilon(1e-13));
    CHECK(j["c_star"].get<double>() == doctest::Approx(0.6981317007977318).epsilon(1e-12));
    CHECK(j["nu_m"].get<double>() == doctest::Approx(0.1745329251994330).epsilon(1e-12));
    CHECK(r.out.rfind("{\"c0\":", 0) == 0);
}

TEST_CASE("reduced curve output") {
    const fs::path dir = scratch("reduced");
    const Run r = run({"reduced", "--dim", "2", "--xi", "2.0", "--samples", "1000", "--out", (dir / "curve.csv").string()});
    REQUIRE(r.code == 0);
    const auto rows = lines(slurp(dir / "curve.csv"));
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0].rfind("# chb 1.0.0 ", 0) == 0);
    CHECK(rows[0].find("xi=2") != std::string::npos);
    CHECK(rows[1] == "nu,f");
    CHECK(rows[2] == "0,0");
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["nu_zero"].get<double>() == doctest::Approx(0.881818532706338).epsilon(1e-9));

    const Run inf = run({"reduced", "--xi", "inf", "--samples", "10"});
    CHECK(inf.code == 0);
    CHECK(inf.out.find("\"xi\":\"inf\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("usage and domain errors") {
    const Run bogus = run({"constants", "--bogus"});
    CHECK(bogus.code == 1);
    CHECK(bogus.err.find("Usage") != std::string::npos);
    CHECK(bogus.out.empty());
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"path", "--phi", "1.5", "--xi", "3"}).code == 1);
    CHECK(run({"path", "--phi", "0.2"}).code == 1);

    const Run sub = run({"path", "--dim", "2", "--phi", "0.2", "--xi", "1.2", "--grid", "128", "--images", "16"});
    CHECK(sub.code == 2);
    CHECK(sub.err.find("subcritical") != std::string::npos);

    CHECK(run({"certify", "--phi", "0.1", "--length", "40", "--grid", "64"}).code == 2);
}

TEST_CASE("path run") {
    const fs::path dir = scratch("path");
    const Run r = run({"path", "--dim", "2", "--phi", "0.3", "--length", "40", "--grid", "128", "--images", "32", "--out",
                       dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["max_gap"].get<double>() > 0.0);
    CHECK(j["end_gap"].get<double>() < 0.0);
    const auto rows = lines(slurp(dir / "path.csv"));
    REQUIRE(rows.size() == 34);
    CHECK(rows[0].rfind("# chb 1.0.0 command=path ", 0) == 0);
    CHECK(rows[1] == "t,gap,V");
    CHECK(fs::exists(dir / "image_0031.chf"));
    CHECK(read_chf(dir / "image_0000.chf").field.cells_per_axis() == 128);
    fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on runs or thread counts") {
    const fs::path dir = scratch("repro");
    std::vector<std::string> contents;
    for (const char* threads : {"1", "4", "1"}) {
        const fs::path out = dir / (std::string("t") + threads + std::to_string(contents.size()));
        const Run r = run({"path", "--phi", "0.3", "--length", "40", "--grid", "64", "--images", "16", "--threads",
                           threads, "--out", out.string()});
        REQUIRE(r.code == 0);
        contents.push_back(slurp(out / "path.csv"));
    }
    CHECK(contents[0] == contents[1]);
    CHECK(contents[0] == contents[2]);

    std::vector<std::string> sweeps;
    for (const char* threads : {"1", "3"}) {
        const fs::path out = dir / (std::string("gamma") + threads + ".csv");
        REQUIRE(run({"gamma", "--xi", "2", "--phis", "0.2,0.1", "--threads", threads, "--out", out.string()}).code == 0);
        sweeps.push_back(slurp(out));
    }
    CHECK(sweeps[0] == sweeps[1]);
    fs::remove_all(dir);
}

TEST_CASE("thread count sources") {
    ::setenv("CHB_THREADS", "3", 1);
    REQUIRE(run({"constants"}).code == 0);
    CHECK(thread_count() == 3);
    REQUIRE(run({"constants", "--threads", "2"}).code == 0);
    CHECK(thread_count() == 2);
    ::setenv("CHB_THREADS", "many", 1);
    CHECK(run({"constants"}).code == 1);
    ::unsetenv("CHB_THREADS");
    set_thread_count(0);
}

TEST_CASE("config file with flag override") {
    const fs::path dir = scratch("config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# reduced curve\nxi=3\nsamples=50\ndim=2\n";
    }
    const fs::path out = dir / "curve.csv";
    const Run r = run({"reduced", "--config", (dir / "run.cfg").string(), "--samples", "20", "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto rows = lines(slurp(out));
    CHECK(rows.size() == 22);
    CHECK(rows[0].find("xi=3") != std::string::npos);
    CHECK(rows[0].find("samples=20") != std::string::npos);

    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "shape=round\n";
    }
    CHECK(run({"reduced", "--config", (dir / "bad.cfg").string()}).code == 1);
    CHECK(run({"reduced", "--config", (dir / "missing.cfg").string()}).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("saddle run") {
    const fs::path dir = scratch("saddle");
    const Run r = run({"saddle", "--phi", "0.3", "--length", "40", "--grid", "64", "--images", "16", "--out",
                       dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["converged"].get<bool>());
    CHECK(j["residual"].get<double>() <= 1e-5);
    CHECK(r.out.rfind("{\"gap\":", 0) == 0);
    CHECK(lines(slurp(dir / "path.csv"))[1] == "t,gap,V");
    CHECK(slurp(dir / "saddle.json").rfind("{\"gap\":", 0) == 0);
    CHECK(read_chf(dir / "saddle.chf").phi == 0.3);
    fs::remove_all(dir);
}

TEST_CASE("gamma run") {
    const fs::path dir = scratch("gamma");
    const Run r = run({"gamma", "--xi", "2", "--radius", "1", "--phis", "0.2,0.1", "--out", (dir / "sweep.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("{\"fitted_exponent\":", 0) == 0);
    const auto rows = lines(slurp(dir / "sweep.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("# chb 1.0.0 command=gamma ", 0) == 0);
    CHECK(rows[1] == "phi,rescaled_gap,limit,abs_error,rel_error");
    CHECK(run({"gamma", "--xi", "2", "--phis", "0.1,0.2"}).code == 1);
    CHECK(run({"gamma", "--xi", "2", "--radius", "40", "--phis", "0.2"}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("certify a stored field") {
    const fs::path dir = scratch("certify");
    const ModelParams p(Dimension(2), 256.0, 0.001);
    const auto drop = droplet_state(1.0, 1.0, p, 512);
    write_chf(dir / "drop.chf", drop.field, p.phi);
    const Run r = run({"certify", (dir / "drop.chf").string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("bound_offcritical"));
    CHECK(run({"certify", (dir / "absent.chf").string()}).code != 0);
    fs::remove_all(dir);
}
