#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qel/config.hpp"
#include "qel/sweep.hpp"
#include "qel/util.hpp"
#include "qel/wasserstein.hpp"

using namespace qel;

namespace {

const char* kSample = R"(
# sample experiment
[map]
id = "doubling"

[hole]
kind = "interval"
lo = 0.75
hi = 1.0

[weight]
kind = "constant"
value = 0.0

[grid]
resolution = 256
survivor_depth = 8

[sweep]
epsilons = [1e-1, 1e-2]
mode = "global"
tolerance = 1e-2

[output]
dir = "/tmp/qel_cfg_out"
)";

}  // namespace

TEST_CASE("toml subset parses sections, scalars, arrays, comments") {
    auto t = parse_toml("# top\n[a]\nx = 1.5 # trailing\ns = \"hi # not a comment\"\n"
                        "flag = true\narr = [1, 2, 3]\nnames = [\"p\", \"q\"]\n");
    CHECK(std::get<double>(t["a"]["x"]) == 1.5);
    CHECK(std::get<std::string>(t["a"]["s"]) == "hi # not a comment");
    CHECK(std::get<bool>(t["a"]["flag"]));
    CHECK(std::get<std::vector<double>>(t["a"]["arr"]).size() == 3);
    CHECK(std::get<std::vector<std::string>>(t["a"]["names"])[1] == "q");
    CHECK_THROWS(parse_toml("[bad\nx=1\n"));
    CHECK_THROWS(parse_toml("keyonly\n"));
}

TEST_CASE("config validation enforces the invariants") {
    auto cfg = parse_config_text(kSample);
    CHECK(cfg.map_id == "doubling");
    CHECK(cfg.resolution == 256);
    CHECK(cfg.epsilons == std::vector<double>{1e-1, 1e-2});

    CHECK_THROWS(parse_config_text("[grid]\nresolution = 100\n"));       // not a power of two
    CHECK_THROWS(parse_config_text("[sweep]\nepsilons = [1e-2, 1e-1]\n"));  // ascending
    CHECK_THROWS(parse_config_text("[sweep]\nepsilons = [1e-2, -1e-3]\n"));
    CHECK_THROWS(parse_config_text("[sweep]\nmode = \"sideways\"\n"));
    CHECK_THROWS(parse_config_text("[weight]\nkind = \"cubic\"\n"));
    CHECK_THROWS(parse_config_text("[hole]\nkind = \"wormhole\"\n"));
}

TEST_CASE("config digest is stable and destination-independent") {
    auto a = parse_config_text(kSample);
    auto b = parse_config_text(kSample);
    b.out_dir = "/elsewhere";
    CHECK(config_digest(a) == config_digest(b));
    b.resolution = 512;
    CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("make_map attaches the configured hole") {
    auto cfg = parse_config_text(kSample);
    auto m = make_map(cfg);
    CHECK(m.in_hole({0.8, 0}));
    CHECK_FALSE(m.in_hole({0.5, 0}));
}

TEST_CASE("fmt_double round-trips shortest form") {
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(1.0) == "1");
    double x = 0.1 + 0.2;
    CHECK(std::stod(fmt_double(x)) == x);
}

TEST_CASE("W1 in one dimension: shifted blocks") {
    StateSpace sp;  // unit interval
    CellPartition part(sp, 100);
    std::vector<double> a(100, 0.0), b(100, 0.0);
    a[10] = 1.0;
    b[30] = 1.0;  // unit mass moved by 0.2
    CHECK(w1_distance(part, a, b) == doctest::Approx(0.2).epsilon(1e-12));
    // identical measures
    CHECK(w1_distance(part, a, a) == doctest::Approx(0.0));
    // uniform vs uniform on half
    std::vector<double> u(100, 0.01), h(100, 0.0);
    for (int i = 0; i < 50; ++i) h[i] = 0.02;
    // CDF gap grows to 1/2 at x=1/2 and closes linearly: integral = 1/4
    CHECK(w1_distance(part, u, h) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("report schema validation accepts a real report and rejects a broken one") {
    std::ifstream in(std::string(QEL_SOURCE_DIR) + "/share/report.schema.json");
    REQUIRE(in.good());
    nlohmann::json schema = nlohmann::json::parse(in);

    auto cfg = parse_config_text(kSample);
    cfg.resolution = 128;
    cfg.survivor_depth = 6;
    cfg.out_dir = "/tmp/qel_cfg_out";
    auto rep = run_sweep(cfg);
    auto j = rep.to_json(cfg);
    std::string err;
    CHECK(validate_report(j, schema, &err));

    auto broken = j;
    broken.erase("rows");
    CHECK_FALSE(validate_report(broken, schema, &err));
    CHECK(err.find("rows") != std::string::npos);

    auto wrong = j;
    wrong["verdict"]["converged"] = "yes";
    CHECK_FALSE(validate_report(wrong, schema, &err));
}

TEST_CASE("sweep rows are ordered and the manifest is reproducible") {
    auto cfg = parse_config_text(kSample);
    cfg.resolution = 128;
    cfg.survivor_depth = 6;
    cfg.out_dir = "/tmp/qel_cfg_sweep1";
    auto r1 = run_sweep(cfg);
    REQUIRE(r1.rows.size() == 2);
    CHECK(r1.rows[0].epsilon > r1.rows[1].epsilon);

    cfg.out_dir = "/tmp/qel_cfg_sweep2";
    run_sweep(cfg);
    std::ifstream m1("/tmp/qel_cfg_sweep1/manifest.json"), m2("/tmp/qel_cfg_sweep2/manifest.json");
    std::stringstream s1, s2;
    s1 << m1.rdbuf();
    s2 << m2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK_FALSE(s1.str().empty());
}
