#include "sigp/cli.hpp"
#include "sigp/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = sigp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sigp_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("help and version") {
    CHECK(run({"--help"}).code == 0);
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("1.0.0") != std::string::npos);
    CHECK(run({}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"simulate", "--no-such-flag", "1"}).code == 2);
}

TEST_CASE("simulate ball design is reproducible") {
    const std::vector<std::string> args{"simulate", "--design", "ball", "--seed", "5"};
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto l = lines(a.out);
    REQUIRE(l.size() == 2 + 50);
    CHECK(l[0].rfind("# config: {\"tool\":\"sigp\"", 0) == 0);
    std::istringstream in(a.out);
    const auto path = sigp::read_path_csv(in);
    CHECK(path.replicates == 50);
    CHECK(path.seed == 5);
    CHECK(run({"simulate", "--design", "ball", "--seed", "6"}).out != a.out);
}

TEST_CASE("simulate rejects bad parameters") {
    const auto r = run({"simulate", "--H", "0.7"});
    CHECK(r.code == 2);
    CHECK(r.err.find("H must lie in (0, 0.5]") != std::string::npos);
    CHECK(run({"simulate", "--design", "star"}).code == 2);
    CHECK(run({"simulate", "--reps", "0"}).code == 2);
    CHECK(run({"simulate", "--reps", "abc"}).code == 2);
    CHECK(run({"simulate", "--format", "json"}).code == 2);
}

TEST_CASE("simulate writes atomically to --out") {
    const auto f = scratch("grid.bin");
    std::filesystem::remove(f);
    REQUIRE(run({"simulate", "--level", "2", "--reps", "3", "--format", "binary", "--out", f.string()}).code == 0);
    std::ifstream in(f, std::ios::binary);
    const auto path = sigp::read_path_binary(in);
    CHECK(path.sets.size() == 25);
    CHECK(path.replicates == 3);
    CHECK_FALSE(std::filesystem::exists(f.string() + ".tmp"));

    CHECK(run({"simulate", "--out", (scratch("missing-dir") / "x" / "y.csv").string()}).code == 2);
}

TEST_CASE("estimate pc for the Brownian sheet targets one half") {
    const auto r = run({"estimate", "--model", "sibm", "--kind", "pc,detPc", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = sigp::Json::parse(r.out);
    REQUIRE(j["reports"].size() == 2);
    CHECK(j["reports"][0]["target"] == 0.5);
    CHECK(j["reports"][1]["estimate"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(j["config"]["model"] == "sibm");
}

TEST_CASE("estimate reads a simulated path") {
    const auto f = scratch("ball.csv");
    REQUIRE(run({"simulate", "--design", "ball", "--reps", "20", "--out", f.string()}).code == 0);
    const auto summary = scratch("summary.json");
    const auto r = run({"estimate", "--input", f.string(), "--kind", "pointwise", "--reps", "20", "--summary", summary.string()});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 2 + 20);
    CHECK(l[1] == "kind,replicate,estimate,target");
    CHECK(l[2].rfind("pointwise,0,", 0) == 0);
    const auto j = sigp::Json::parse(slurp(summary));
    CHECK(j["reports"][0]["kind"] == "pointwise");

    CHECK(run({"estimate", "--input", scratch("absent.csv").string()}).code == 2);
    CHECK(run({"estimate", "--kind", "wobbly"}).code == 2);
}

TEST_CASE("check prints a table and a verdict") {
    const auto r = run({"check", "--collection", "rectangles", "--dim", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("level") != std::string::npos);
    CHECK(r.out.find("verdict: ") != std::string::npos);
    CHECK(r.out.find("verdict: VIOLATED") == std::string::npos);

    const auto ll = run({"check", "--collection", "lower-layers"});
    REQUIRE(ll.code == 0);
    CHECK(ll.out.find("verdict: VIOLATED") != std::string::npos);
    CHECK(ll.out.find("witness: level 5") != std::string::npos);

    CHECK(run({"check", "--collection", "spheres"}).code == 2);
    CHECK(run({"check", "--collection", "lower-layers", "--levels", "0:9"}).code == 2);
}

TEST_CASE("check file output") {
    const auto f = scratch("check.csv");
    REQUIRE(run({"check", "--dim", "1", "--q", "1", "--out", f.string()}).code == 0);
    const auto l = lines(slurp(f));
    REQUIRE(l.size() == 2 + 7 + 1);
    CHECK(l.back().rfind("# verdict: ", 0) == 0);
    CHECK(l[2].rfind("2,5,0.125,", 0) == 0);

    const auto g = scratch("check.json");
    REQUIRE(run({"check", "--dim", "1", "--format", "json", "--out", g.string()}).code == 0);
    const auto j = sigp::Json::parse(slurp(g));
    CHECK(j["config"]["command"] == "check");
    CHECK(j["report"]["levels"].size() == 7);
}

TEST_CASE("flow reproduces fractional Brownian covariance") {
    const auto r = run({"flow", "--grid", "8", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = sigp::Json::parse(r.out);
    CHECK(j["max_absdiff"].get<double>() <= 1e-12);
    CHECK(j["table"].size() == 64);

    const auto b = run({"flow", "--model", "sibm", "--grid", "4"});
    REQUIRE(b.code == 0);
    for (const auto& line : lines(b.out)) {
        if (line[0] == '#' || line[0] == 's') continue;
        double s, t, proj;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &s, &t, &proj) == 3);
        CHECK(proj == doctest::Approx(std::min(s, t)).epsilon(1e-12));
    }
    CHECK(run({"flow", "--flow", scratch("absent.json").string()}).code == 2);
}

TEST_CASE("flow from a file and sampled paths") {
    const auto f = scratch("flow.json");
    std::ofstream(f) << R"({"breakpoints":[{"t":0,"corner":[0,0]},{"t":1,"corner":[1,0.5]},{"t":2,"corner":[1,1]}]})";
    const auto paths = scratch("flow_paths.csv");
    const auto r = run({"flow", "--flow", f.string(), "--grid", "4", "--reps", "2", "--paths-out", paths.string(), "--out",
                        scratch("flow.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("max |projected - fbm|") != std::string::npos);
    std::ifstream in(paths);
    CHECK(sigp::read_path_csv(in).sets.size() == 4);
}

TEST_CASE("demo-unbounded") {
    CHECK(run({"demo-unbounded", "--k", "100"}).code == 2);
    const auto r = run({"demo-unbounded", "--k", "256", "--reps", "50", "--kmax-log2", "8", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = sigp::Json::parse(r.out);
    CHECK(j["growth"]["rows"].size() == 3);
    CHECK(j["config"]["h"] == 0.01);
}

TEST_CASE("entropy stays under the volume bound") {
    const auto r = run({"entropy", "--dim", "1", "--eps", "0.25,0.125"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 4);
    CHECK(l[2] == "0.25,4,4,true");
    CHECK(l[3] == "0.125,8,8,true");
    CHECK(run({"entropy", "--eps", "0"}).code == 2);
}

TEST_CASE("flags override the config file, which overrides defaults") {
    const auto cfg = scratch("config.json");
    std::ofstream(cfg) << R"({"dim": 1, "eps": [0.25, 0.125], "seed": 9})";
    const auto fromFile = run({"entropy", "--config", cfg.string()});
    REQUIRE(fromFile.code == 0);
    CHECK(fromFile.out.find("\"dim\":1") != std::string::npos);
    CHECK(fromFile.out.find("\"seed\":9") != std::string::npos);
    CHECK(lines(fromFile.out).size() == 4);

    const auto flag = run({"entropy", "--config", cfg.string(), "--dim", "2"});
    REQUIRE(flag.code == 0);
    CHECK(flag.out.find("\"dim\":2") != std::string::npos);
    CHECK(flag.out.find("\"seed\":9") != std::string::npos);

    std::ofstream(scratch("broken.json")) << "{not json";
    CHECK(run({"entropy", "--config", scratch("broken.json").string()}).code == 2);
}
