#include <geoplan/errors.hpp>
#include <geoplan/scenario.hpp>

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace geoplan;

namespace {

const char* kMinimal = R"({
  "boundary": {
    "start": {"pose": [0, 0, 0], "velocity": [0.5, 0, 0]},
    "end":   {"pose": [0.5, 0, 0], "velocity": [0.5, 0, 0]}
  }
})";

const char* kSphere = R"({
  "space": "S2",
  "metric": "bi_invariant",
  "obstacles": [{"point": [0, 0, 1]}],
  "boundary": {
    "start": {"point": [1, 0, 0], "velocity": [0, 1, 0]},
    "end":   {"point": [0, 1, 0], "velocity": [-1, 0, 0]}
  },
  "time": {"a": 0, "b": 1.5707963267948966}
})";

std::string with_obstacle(const std::string& obstacle, const std::string& metric = "mixed")
{
    return R"({"metric": ")" + metric + R"(", "inertia": [1, 2, 3], "obstacles": [)" + obstacle
           + R"(], "boundary": {"start": {"pose": [-0.6, 0, 0], "velocity": [1.2, 0, 0]},
                                "end": {"pose": [0.6, 0, 0], "velocity": [1.2, 0, 0]}}})";
}

std::vector<TrajectorySample> two_samples(bool sphere)
{
    std::vector<TrajectorySample> out(2);
    out[1].t = 0.5;
    out[1].h = exp_so3(Vec3(0.1, 0.2, 0.3));
    out[1].xi = Vec3(1, 2, 3);
    for (auto& s : out)
    {
        s.dist = rotation_angle(s.h);
        if (sphere)
            s.q = s.h.matrix().col(2);
    }
    return out;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("minimal scenario gets defaults")
{
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.space == Space::SO3);
    CHECK(s.metric == MetricKind::BiInvariant);
    CHECK(s.obstacles.empty());
    CHECK(s.bc.t_a == 0.0);
    CHECK(s.bc.t_b == 1.0);
    CHECK(s.controls.n_steps == 0);
    CHECK(to_problem(s).steps() == 200);
    CHECK(s.solver.tol == 1e-6);
    CHECK(s.solver.max_iters == 100);
    CHECK(s.solver.homotopy_stages == 8);
    CHECK((s.bc.g_b.matrix() - exp_so3(Vec3(0.5, 0, 0)).matrix()).norm() == 0.0);
}

TEST_CASE("obstacle defaults")
{
    const Scenario s = parse_scenario(with_obstacle(R"({"pose": [0, 0.05, 0]})"));
    REQUIRE(s.obstacles.size() == 1);
    CHECK(s.obstacles[0].tau == 50.0);
    CHECK(s.obstacles[0].d_scale == 0.2);
    CHECK(s.obstacles[0].n_exp == 2);
    CHECK(s.obstacles[0].metric_mode == MetricMode::LeftWithBiDistance);
    CHECK(to_problem(s).dynamics == Dynamics::Mixed);
}

TEST_CASE("sphere scenario")
{
    const Scenario s = parse_scenario(kSphere);
    CHECK(s.space == Space::S2);
    REQUIRE(s.obstacles.size() == 1);
    CHECK(s.obstacles[0].g0.matrix().isIdentity(0.0));
    CHECK(to_problem(s).dynamics == Dynamics::Sphere);
    CHECK(s.potential_mode == SpherePotentialMode::Local);
}

TEST_CASE("rotation and inertia forms")
{
    const Scenario s = parse_scenario(R"({
      "metric": "mixed",
      "inertia": [[2, 0.1, 0], [0.1, 3, 0], [0, 0, 4]],
      "boundary": {"start": {"pose": [[1, 0, 0], [0, 0, -1], [0, 1, 0]]},
                   "end": {"pose": [0, 0, 1]}}})");
    CHECK(s.inertia.matrix()(0, 1) == 0.1);
    CHECK((s.bc.g_a.matrix() - exp_so3(Vec3(std::acos(-1.0) / 2, 0, 0)).matrix()).norm() < 1e-15);
    CHECK(s.bc.xi_a.isZero(0.0));
}

TEST_CASE("validation errors")
{
    CHECK_THROWS_AS(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0], "n_exp": 0})")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0], "d_scale": 0})")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0], "tau": -1})")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0]})", "left_invariant")),
                    ValidationError);
    CHECK_NOTHROW(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0], "tau": 0})", "left_invariant")));
    CHECK_THROWS_AS(parse_scenario(with_obstacle(R"({"pose": [0, 0, 0]})", "bi_invariant")),
                    ValidationError);

    std::string sphere_mixed = kSphere;
    sphere_mixed.replace(sphere_mixed.find("bi_invariant"), 12, "mixed");
    CHECK_THROWS_AS(parse_scenario(sphere_mixed), ValidationError);

    CHECK_THROWS_AS(parse_scenario(R"({"space": "SE3", "boundary": {}})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"boundary": {"start": {"pose": [[2,0,0],[0,1,0],[0,0,1]]},
                                                    "end": {"pose": [0,0,0]}}})"),
                    ValidationError);
}

TEST_CASE("parse errors name the location")
{
    try
    {
        parse_scenario("{\n  \"space\": \"SO3\",\n  \"metric\" \"mixed\"\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e)
    {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try
    {
        parse_scenario(R"({"boundary": {"start": {"pose": [0, "x", 0]}, "end": {"pose": [0,0,0]}}})");
        FAIL("expected ParseError");
    } catch (const ParseError& e)
    {
        CHECK(std::string(e.what()).find("$.boundary.start.pose[1]") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario(R"({"bondary": {}})"), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"space": "SO3"})"), ParseError);
}

TEST_CASE("run_scenario on a geodesic")
{
    const Report r = run_scenario(parse_scenario(kMinimal));
    CHECK(r.converged);
    CHECK(r.residual_norm < 1e-6);
    CHECK(r.min_distance.empty());
    CHECK(r.samples.size() == 201);
    CHECK(r.wall_time >= 0.0);
}

TEST_CASE("run_scenario with an obstacle reports the baseline")
{
    const Report r = run_scenario(parse_scenario(with_obstacle(R"({"pose": [0, 0.05, 0]})")));
    REQUIRE(r.converged);
    REQUIRE(r.min_distance.size() == 1);
    REQUIRE(r.baseline_min_distance.size() == 1);
    CHECK(r.min_distance[0] > r.baseline_min_distance[0]);
    const auto summary = nlohmann::json::parse(report_json(r));
    CHECK(summary["converged"] == true);
    CHECK(summary["min_distance"][0].get<double>() == r.min_distance[0]);
}

TEST_CASE("run_scenario folds NoConvergence into the report")
{
    std::string text = with_obstacle(R"({"pose": [0, 0.05, 0]})");
    text.insert(1, R"("solver": {"max_iters": 0},)");
    const Report r = run_scenario(parse_scenario(text));
    CHECK_FALSE(r.converged);
    CHECK(r.message.find("NoConvergence") != std::string::npos);
}

TEST_CASE("simulate_scenario uses the given unknowns")
{
    std::string text = kMinimal;
    text.insert(1, R"("unknowns": [0, 0, 0, 0, 0, 0],)");
    const Report r = simulate_scenario(parse_scenario(text));
    CHECK(r.samples.size() == 201);
    CHECK(r.converged);
}

TEST_CASE("CSV layout")
{
    std::ostringstream out;
    write_trajectory(two_samples(false), TrajectoryFormat::Csv, out);
    const auto rows = lines(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]
          == "t,h00,h01,h02,h10,h11,h12,h20,h21,h22,xi_x,xi_y,xi_z,eta_x,eta_y,eta_z,"
             "etadot_x,etadot_y,etadot_z,dist,V");
    CHECK(std::count(rows[1].begin(), rows[1].end(), ',') == 20);

    std::ostringstream sphere;
    write_trajectory(two_samples(true), TrajectoryFormat::Csv, sphere);
    CHECK(lines(sphere.str())[0].find("etadot_z,qx,qy,qz,dist,V") != std::string::npos);

    // 17 significant digits round-trip exactly
    const double h01 = two_samples(false)[1].h(0, 1);
    std::istringstream row(lines(out.str())[2]);
    std::string cell;
    for (int i = 0; i < 3; ++i)
        std::getline(row, cell, ',');
    CHECK(std::stod(cell) == h01);

    CHECK_THROWS_AS(write_trajectory({}, TrajectoryFormat::Csv, out), InvalidArgument);
}

TEST_CASE("JSON output round-trips")
{
    const auto samples = two_samples(true);
    std::ostringstream out;
    write_trajectory(samples, TrajectoryFormat::Json, out);
    const auto doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.size() == 2);
    for (std::size_t k = 0; k < 2; ++k)
    {
        Mat3 h;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                h(r, c) = doc[k]["h" + std::to_string(r) + std::to_string(c)].get<double>();
        const double dist = rotation_angle(Rotation::from_matrix(h));
        CHECK(std::abs(dist - doc[k]["dist"].get<double>()) < 1e-12);
        const Vec3 q(doc[k]["qx"].get<double>(), doc[k]["qy"].get<double>(), doc[k]["qz"].get<double>());
        CHECK(std::abs(q.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("sphere runs write unit q and are byte-identical when repeated")
{
    const Scenario s = parse_scenario(kSphere);
    const Report a = run_scenario(s);
    const Report b = run_scenario(s);
    REQUIRE(a.converged);
    std::ostringstream ca, cb;
    write_trajectory(a.samples, TrajectoryFormat::Csv, ca);
    write_trajectory(b.samples, TrajectoryFormat::Csv, cb);
    CHECK(ca.str() == cb.str());
    for (const auto& smp : a.samples)
    {
        REQUIRE(smp.q.has_value());
        CHECK(std::abs(smp.q->norm() - 1.0) < 1e-9);
        CHECK((*smp.q - smp.h.matrix().col(2)).norm() < 1e-15);
    }
}

TEST_CASE("unwritable paths raise IoError")
{
    const std::filesystem::path bad = "/nonexistent-dir/traj.csv";
    try
    {
        write_trajectory(two_samples(false), TrajectoryFormat::Csv, bad);
        FAIL("expected IoError");
    } catch (const IoError& e)
    {
        CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario("/nonexistent-dir/s.json"), IoError);
}
