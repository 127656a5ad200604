#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcfh/config.hpp"
#include "mcfh/runner.hpp"

using namespace mcfh;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("mcfh_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string kSimulateCfg =
    "[run]\n"
    "scenario = \"simulate\"\n"
    "[forcing]\n"
    "kind = \"constant\"\n"
    "value = 1.0\n"
    "[simulate]\n"
    "dim = 2\n"
    "T = 1.0\n"
    "dx = 0.03125\n"
    "n_samples = 10\n"
    "slab_height = 6.0\n";

}  // namespace

TEST_CASE("config reader handles the supported value types") {
    auto t = Toml::parse(
        "top = 1.5        # trailing comment\n"
        "\n"
        "[section]\n"
        "name = \"hello # not a comment\"\n"
        "flag = true\n"
        "off = false\n"
        "nums = [1, 2.5, -3]\n"
        "words = [\"a\", \"b\"]\n"
        "count = 42\n");
    CHECK(t.number("top") == doctest::Approx(1.5));
    CHECK(t.str("section.name") == "hello # not a comment");
    CHECK(t.boolean_or("section.flag", false));
    CHECK_FALSE(t.boolean_or("section.off", true));
    CHECK(t.array("section.nums") == std::vector<double>{1, 2.5, -3});
    CHECK(t.integer("section.count") == 42);
    CHECK(t.number_or("section.absent", 7.0) == 7.0);
    CHECK(t.integer_or("section.absent", 3) == 3);
    CHECK(t.str_or("section.absent", "d") == "d");
    CHECK(t.has("section.flag"));
    CHECK_FALSE(t.has("flag"));
}

TEST_CASE("config reader reports the offending line") {
    CHECK_THROWS_WITH_AS(Toml::parse("a = 1\nb = 2\nc = @bad\n"),
                         doctest::Contains("line 3"), error);
    CHECK_THROWS_WITH_AS(Toml::parse("a = 1\n[broken\n"),
                         doctest::Contains("line 2"), error);
    CHECK_THROWS_WITH_AS(Toml::parse("just words\n"),
                         doctest::Contains("key = value"), error);
    CHECK_THROWS_AS(Toml::parse("x = 1").number("y"), error);
    CHECK_THROWS_AS(Toml::parse("x = 1.5").integer("x"), error);
    CHECK_THROWS_AS(Toml::parse("x = \"s\"").number("x"), error);
}

TEST_CASE("scenario names round-trip") {
    for (const char* name : {"simulate", "obstacle", "speeds", "sweep", "finger",
                             "laminar", "discrepancy", "lcp"}) {
        Scenario s = parse_scenario(name);
        CHECK(std::string(scenario_name(s)) == name);
    }
    CHECK_THROWS_WITH_AS(parse_scenario("nonsense"), doctest::Contains("nonsense"),
                         error);
}

TEST_CASE("worker count precedence: flag, then environment, then config") {
    auto dir = temp_dir("workers");
    auto cfg_path = write_file(dir, "run.toml",
                               "[run]\nscenario = \"simulate\"\nworkers = 3\n");
    unsetenv("MCFHOMOG_WORKERS");
    CHECK(RunConfig::load(cfg_path.string(), "", 0).workers == 3);
    setenv("MCFHOMOG_WORKERS", "5", 1);
    CHECK(RunConfig::load(cfg_path.string(), "", 0).workers == 5);
    CHECK(RunConfig::load(cfg_path.string(), "", 7).workers == 7);
    setenv("MCFHOMOG_WORKERS", "zero", 1);
    CHECK_THROWS_AS(RunConfig::load(cfg_path.string(), "", 0), error);
    unsetenv("MCFHOMOG_WORKERS");

    // out_dir: flag overrides the config value
    auto cfg2 = write_file(dir, "run2.toml",
                           "[run]\nscenario = \"simulate\"\nout_dir = \"cfg_dir\"\n");
    CHECK(RunConfig::load(cfg2.string(), "", 0).out_dir == "cfg_dir");
    CHECK(RunConfig::load(cfg2.string(), "flag_dir", 0).out_dir == "flag_dir");
    CHECK_THROWS_AS(RunConfig::load((dir / "missing.toml").string(), "", 0), error);
}

TEST_CASE("forcing construction from config") {
    auto c = forcing_from_config(Toml::parse("[forcing]\nkind = \"constant\"\nvalue = 2.5\n"), 2);
    CHECK(c({0.3, 0.7, 0}) == doctest::Approx(2.5));

    auto s = forcing_from_config(
        Toml::parse("[forcing]\nkind = \"sinusoidal\"\nbase = 2.0\namplitude = 0.5\n"), 2);
    CHECK(s.m0 == doctest::Approx(1.5));
    CHECK(s.M0 == doctest::Approx(2.5));

    auto dir = temp_dir("forcing");
    write_file(dir, "g.csv", "1.0, 2.0\n3.0, 4.0\n");
    auto g = forcing_from_config(Toml::parse("[forcing]\nkind = \"csv\"\npath = \"" +
                                             (dir / "g.csv").string() +
                                             "\"\nshape = [2, 2]\n"),
                                 2);
    CHECK(g({0.0, 0.0, 0}) == doctest::Approx(1.0));
    CHECK(g.M0 == doctest::Approx(4.0));

    auto lam = forcing_from_config(Toml::parse("[forcing]\nkind = \"corollary\"\n"), 3);
    CHECK(lam.dim == 3);
    // laminar: independent of the last coordinate
    CHECK(lam({0.3, 0.4, 0.1}) == doctest::Approx(lam({0.3, 0.4, 0.9})));

    CHECK_THROWS_WITH_AS(forcing_from_config(Toml::parse("[forcing]\nkind = \"x\"\n"), 2),
                         doctest::Contains("unknown forcing kind"), error);
    CHECK_THROWS_AS(
        forcing_from_config(Toml::parse("[forcing]\nkind = \"csv\"\npath = \"/nope\"\nshape = [2,2]\n"), 2),
        error);
}

TEST_CASE("simulate scenario writes its outputs and tracks the front") {
    auto dir = temp_dir("simulate");
    auto cfg_path = write_file(dir, "run.toml", kSimulateCfg);
    auto out = (dir / "out").string();
    RunConfig cfg = RunConfig::load(cfg_path.string(), out, 1);
    CHECK(run_scenario(cfg) == 0);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK(fs::exists(fs::path(out) / "front.csv"));
    CHECK(fs::exists(fs::path(out) / "final.pgm"));

    auto manifest = nlohmann::json::parse(slurp(fs::path(out) / "manifest.json"));
    CHECK(manifest["scenario"] == "simulate");
    CHECK(manifest["dry_run"] == false);
    CHECK(manifest["workers"] == 1);

    // planar front with g = 1 moves one unit over T = 1
    std::istringstream csv(slurp(fs::path(out) / "front.csv"));
    std::string line, last;
    std::getline(csv, line);
    CHECK(line == "t,head,tail,spread");
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    double t, head, tail, spread;
    char comma;
    std::istringstream(last) >> t >> comma >> head >> comma >> tail >> comma >> spread;
    CHECK(t == doctest::Approx(1.0));
    CHECK(head == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("explain produces the same manifest as run, minus execution state") {
    auto dir = temp_dir("explain");
    auto cfg_path = write_file(dir, "run.toml", kSimulateCfg);
    auto run_out = (dir / "run").string(), dry_out = (dir / "dry").string();
    CHECK(run_scenario(RunConfig::load(cfg_path.string(), run_out, 1)) == 0);
    CHECK(explain_scenario(RunConfig::load(cfg_path.string(), dry_out, 1)) == 0);
    CHECK_FALSE(fs::exists(fs::path(dry_out) / "front.csv"));

    auto a = nlohmann::json::parse(slurp(fs::path(run_out) / "manifest.json"));
    auto b = nlohmann::json::parse(slurp(fs::path(dry_out) / "manifest.json"));
    CHECK(a["dry_run"] == false);
    CHECK(b["dry_run"] == true);
    for (auto* j : {&a, &b}) {
        j->erase("dry_run");
        j->erase("wall_time_s");
    }
    CHECK(a == b);
}

TEST_CASE("scenario outputs are byte-identical across worker counts") {
    auto dir = temp_dir("determinism");
    auto cfg_path = write_file(dir, "run.toml", kSimulateCfg);
    std::vector<std::string> fronts;
    for (int workers : {1, 2, 8}) {
        auto out = (dir / ("w" + std::to_string(workers))).string();
        CHECK(run_scenario(RunConfig::load(cfg_path.string(), out, workers)) == 0);
        fronts.push_back(slurp(fs::path(out) / "front.csv"));
    }
    CHECK(fronts[0] == fronts[1]);
    CHECK(fronts[0] == fronts[2]);
}

TEST_CASE("invalid scenario configuration is rejected before any output") {
    auto dir = temp_dir("invalid");
    auto bad = write_file(dir, "bad.toml",
                          "[run]\nscenario = \"obstacle\"\n[obstacle]\ns = -1.0\n");
    CHECK_THROWS_AS(run_scenario(RunConfig::load(bad.string(), (dir / "o").string(), 1)),
                    error);
    CHECK_FALSE(fs::exists(dir / "o" / "obstacle.csv"));

    auto bad2 = write_file(dir, "bad2.toml", "[run]\nscenario = \"warp\"\n");
    CHECK_THROWS_AS(RunConfig::load(bad2.string(), "", 0), error);
}

TEST_CASE("discrepancy scenario writes the direction report") {
    auto dir = temp_dir("disc");
    auto cfg_path = write_file(dir, "run.toml",
                               "[run]\nscenario = \"discrepancy\"\n"
                               "[discrepancy]\nnu = [3, 4]\nN_max = 100\n"
                               "threshold = 0.5\n");
    auto out = (dir / "out").string();
    CHECK(run_scenario(RunConfig::load(cfg_path.string(), out, 1)) == 0);
    auto j = nlohmann::json::parse(slurp(fs::path(out) / "discrepancy.json"));
    CHECK(j["rationality"] == "rational");
    CHECK(fs::exists(fs::path(out) / "discrepancy.csv"));
}
