#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pdren/commands.hpp"
#include "support.hpp"

using namespace pdren;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pdren_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::InvalidArgument;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config defaults and overrides") {
    const RunConfig d = parse_config("");
    CHECK(d.rho == 1.75);
    CHECK(d.deg == 60);
    CHECK(d.N_head == 22);
    CHECK_FALSE(d.c0.has_value());
    CHECK(d.resolved_s0() == default_s0_path());

    const RunConfig c = parse_config("# comment\n rho = 1.5 \nhead=10  # trailing\nc0=-0.25\nekw_mode=true\n\nseed=7\n");
    CHECK(c.rho == 1.5);
    CHECK(c.N_head == 10);
    CHECK(c.c0 == -0.25);
    CHECK(c.ekw_mode);
    CHECK(c.seed == 7u);
    CHECK_FALSE(parse_config("c0=from_s0").c0.has_value());
    CHECK(parse_config("out=/tmp/x").resolved_s_star() == "/tmp/x/s_star.txt");
}

TEST_CASE("config errors") {
    CHECK(code_of([] { (void)parse_config("nonsense=1"); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("deg=sixty"); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("deg=60.5"); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("no equals sign"); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("ekw_mode=maybe"); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("rho="); }) == Errc::ParseError);
    CHECK(code_of([] { (void)parse_config("rho=-1"); }) == Errc::InvalidArgument);
    CHECK(code_of([] { (void)parse_config("head=61"); }) == Errc::InvalidArgument);
    CHECK(code_of([] { (void)parse_config("tol.eigen=0"); }) == Errc::InvalidArgument);
    CHECK(code_of([] { (void)load_config("/nonexistent/cfg"); }) == Errc::ParseError);
}

TEST_CASE("constants table") {
    CHECK(constant("delta1").lo == 8.72021484375);
    CHECK(constant("stable_radius").hi == 0.1258544921875);
    CHECK_THROWS_AS(constant("no_such_constant"), Error);
    for (const auto& c : constants_table()) CHECK(c.lo <= c.hi);

    Report r;
    r.command = "x";
    CHECK(r.check("delta1", 8.721));
    CHECK_FALSE(r.check("delta1", 8.8));
    CHECK_FALSE(r.check("alpha", NAN));
    CHECK_FALSE(r.all_pass());
    CHECK(exit_code(r) == 3);
}

TEST_CASE("report JSON layout") {
    Report r;
    r.command = "demo";
    r.inputs["b"] = 1;
    r.inputs["a"] = 2;
    r.check("alpha", 19.0);
    const Json j = r.to_json(false);
    CHECK_FALSE(j.contains("timestamp"));
    CHECK(r.to_json().contains("timestamp"));
    // insertion order is kept
    CHECK(j["inputs"].begin().key() == "b");
    const Json& c = j["constants_compared"][0];
    CHECK(c["name"] == "alpha");
    CHECK(c["interval"][0] == 1.0);
    CHECK(c["pass"] == true);
}

TEST_CASE("csv and file helpers") {
    CHECK(format_csv_number(0.1) == "0.10000000000000001");
    CHECK(to_csv({"a", "b"}, {{1.0, 2.5}}) == "a,b\n1,2.5\n");
    const fs::path dir = scratch_dir("files");
    const std::string f = (dir / "sub" / "x.txt").string();
    write_file_atomic(f, "hello");
    CHECK(slurp(f) == "hello");
    CHECK_FALSE(fs::exists(f + ".partial"));
    CHECK(file_digest(f) == "a430d84680aabd0b");
    CHECK(code_of([&] { (void)file_digest((dir / "missing").string()); }) == Errc::ParseError);
}

TEST_CASE("loading series checks the radius") {
    const fs::path dir = scratch_dir("load");
    save_series((dir / "r2.txt").string(), Poly2::x(4, 2.0));
    RunConfig cfg;
    CHECK(code_of([&] { (void)load_generating_function((dir / "r2.txt").string(), cfg); }) ==
          Errc::MismatchedDomain);
    const GenFunction s = load_generating_function(default_s0_path(), cfg);
    CHECK(s.degree() == 60);
    cfg.deg = 30;
    CHECK(load_generating_function(default_s0_path(), cfg).degree() == 30);
    CHECK(resolve_c0(RunConfig{}) == normalization_coefficient(s));
}

TEST_CASE("corrupt input leaves no output") {
    const fs::path dir = scratch_dir("corrupt");
    {
        std::ofstream f(dir / "bad.txt");
        f << "rho=1.75 deg=60 tail=0\n0 0 not-a-number\n";
    }
    RunConfig cfg;
    cfg.s0_path = (dir / "bad.txt").string();
    cfg.out_dir = (dir / "out").string();
    CHECK(code_of([&] { (void)cmd_fixpoint(cfg); }) == Errc::ParseError);
    CHECK(code_of([&] { (void)cmd_renorm(cfg); }) == Errc::ParseError);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("cascade with too few levels still writes its CSV") {
    const fs::path dir = scratch_dir("cascade");
    RunConfig cfg;
    cfg.k_max = 2;
    cfg.out_dir = dir.string();
    const Report r = cmd_cascade(cfg);
    CHECK(exit_code(r) == 3);
    CHECK(r.outputs.contains("orbit_scaling_error"));
    const std::string csv = slurp(dir / "cascade.csv");
    CHECK(csv.rfind("k,a_k,delta_k,d_ratio_k\n1,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(fs::exists(dir / "cascade.json"));
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    const fs::path dir = scratch_dir("determinism");
    RunConfig cfg;
    cfg.out_dir = dir.string();
    cfg.map_points = 20;
    const Report a = cmd_mapcheck(cfg);
    const Report b = cmd_mapcheck(cfg);
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    CHECK(exit_code(a) == 0);
    const Json j = Json::parse(slurp(dir / "mapcheck.json"));
    CHECK(j["command"] == "mapcheck");
    CHECK(j["inputs"]["series_digest"] == file_digest(default_s0_path()));
}

TEST_CASE("renorm verb reports scalings and residuals") {
    const fs::path dir = scratch_dir("renorm");
    RunConfig cfg;
    cfg.out_dir = dir.string();
    const Report r = cmd_renorm(cfg);
    CHECK(exit_code(r) == 0);
    CHECK(r.outputs["residuals"]["fixed_point"].get<double>() <= 1e-13);
    CHECK(fs::exists(dir / "renorm_out.txt"));
}

}
