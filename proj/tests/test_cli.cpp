#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = GEOPLAN_CLI;
const fs::path kScenarios = GEOPLAN_SCENARIOS;

int run(const std::string& args)
{
    const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "geoplan_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string read(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("check passes")
{
    CHECK(run("check") == 0);
}

TEST_CASE("plan writes CSV and a report")
{
    const fs::path csv = scratch("plan.csv"), report = scratch("plan.json");
    REQUIRE(run("plan " + (kScenarios / "so3_default.json").string() + " --output " + csv.string()
                + " --report " + report.string())
            == 0);
    const std::string text = read(csv);
    CHECK(text.rfind("t,h00,", 0) == 0);
    const auto summary = nlohmann::json::parse(read(report));
    CHECK(summary["converged"] == true);
    CHECK(summary["min_distance"][0].get<double>() > summary["baseline_min_distance"][0].get<double>());
}

TEST_CASE("plan output is byte-identical across runs")
{
    const fs::path a = scratch("a.csv"), b = scratch("b.csv");
    const std::string s = (kScenarios / "s2_default.json").string();
    REQUIRE(run("plan " + s + " -q -o " + a.string()) == 0);
    REQUIRE(run("plan " + s + " -q -o " + b.string()) == 0);
    CHECK(read(a) == read(b));
}

TEST_CASE("JSON trajectory format")
{
    const fs::path out = scratch("plan_traj.json");
    REQUIRE(run("plan " + (kScenarios / "so3_default.json").string() + " -q --format json -o "
                + out.string())
            == 0);
    const auto doc = nlohmann::json::parse(read(out));
    CHECK(doc.size() == 201);
    CHECK(doc[0].contains("etadot_z"));
}

TEST_CASE("exit codes")
{
    const fs::path bad = scratch("bad.json");
    write(bad, "{ \"boundary\": ");
    CHECK(run("plan " + bad.string()) == 2);

    const fs::path invalid = scratch("invalid.json");
    write(invalid, R"({"obstacles": [{"pose": [0,0,0], "n_exp": 0}],
                      "boundary": {"start": {"pose": [0,0,0]}, "end": {"pose": [0.1,0,0]}}})");
    CHECK(run("plan " + invalid.string()) == 2);

    const fs::path stuck = scratch("stuck.json");
    write(stuck, R"({"metric": "mixed", "inertia": [1, 2, 3], "seed": 1,
                    "obstacles": [{"pose": [0, 0.05, 0]}],
                    "solver": {"max_iters": 0},
                    "boundary": {"start": {"pose": [-0.6, 0, 0], "velocity": [1.2, 0, 0]},
                                 "end": {"pose": [0.6, 0, 0], "velocity": [1.2, 0, 0]}}})");
    const fs::path report = scratch("stuck_report.json");
    CHECK(run("plan " + stuck.string() + " --report " + report.string()) == 1);
    CHECK(nlohmann::json::parse(read(report))["converged"] == false);

    CHECK(run("simulate " + (kScenarios / "so3_default.json").string()
              + " --unknowns 1e300,1e300,1e300,1e300,1e300,1e300")
          == 3);
    CHECK(run("simulate " + (kScenarios / "so3_default.json").string() + " --unknowns 1,2") == 2);
    CHECK(run("plan") == 2);
}

TEST_CASE("simulate and sweep")
{
    const fs::path out = scratch("sim.csv");
    CHECK(run("simulate " + (kScenarios / "so3_default.json").string() + " -q -o " + out.string())
          == 0);
    CHECK(!read(out).empty());

    const fs::path summary = scratch("sweep.json");
    REQUIRE(run("sweep " + (kScenarios / "so3_default.json").string()
                + " --param tau --values 0,1,10,50 --jobs 2 -o " + summary.string())
            == 0);
    const auto doc = nlohmann::json::parse(read(summary));
    REQUIRE(doc.size() == 4);
    double prev = 0.0;
    for (const auto& row : doc)
    {
        const double d = row["report"]["min_distance"][0].get<double>();
        CHECK(d >= prev);
        prev = d;
    }
}
