#include <geoplan/errors.hpp>
#include <geoplan/scenario.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace geoplan {

namespace {

using nlohmann::json;

/// Cursor into the document that knows its own path for error messages.
class Field
{
public:
    Field(const json& node, std::string path)
        : node_(node)
        , path_(std::move(path))
    {}

    const json& node() const { return node_; }
    const std::string& path() const { return path_; }

    bool has(const char* key) const { return node_.contains(key); }

    Field at(const char* key) const
    {
        if (!node_.contains(key))
            fail("missing required field");
        return child(key);
    }

    Field child(const char* key) const { return {node_.at(key), path_ + "." + key}; }

    Field element(std::size_t i) const
    {
        return {node_.at(i), path_ + "[" + std::to_string(i) + "]"};
    }

    void require_object(std::initializer_list<const char*> allowed) const
    {
        if (!node_.is_object())
            fail("expected an object");
        for (const auto& [key, value] : node_.items())
        {
            (void)value;
            if (std::none_of(allowed.begin(), allowed.end(),
                             [&key](const char* a) { return key == a; }))
                throw ParseError(path_ + "." + key + ": unknown field");
        }
    }

    std::size_t array_size() const
    {
        if (!node_.is_array())
            fail("expected an array");
        return node_.size();
    }

    double number() const
    {
        if (!node_.is_number())
            fail("expected a number");
        const double v = node_.get<double>();
        if (!std::isfinite(v))
            fail("must be finite");
        return v;
    }

    long long integer() const
    {
        if (!node_.is_number_integer())
            fail("expected an integer");
        return node_.get<long long>();
    }

    std::string string() const
    {
        if (!node_.is_string())
            fail("expected a string");
        return node_.get<std::string>();
    }

    Vec3 vec3() const
    {
        if (array_size() != 3)
            fail("expected 3 numbers");
        return {element(0).number(), element(1).number(), element(2).number()};
    }

    Mat3 mat3() const
    {
        if (array_size() != 3)
            fail("expected a 3x3 array");
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            m.row(r) = element(r).vec3().transpose();
        return m;
    }

    /// Either an axis-angle triple or a row-major 3x3 matrix.
    Rotation rotation() const
    {
        if (array_size() == 3 && node_.at(0).is_array())
        {
            try
            {
                return Rotation::from_matrix(mat3());
            } catch (const NotARotation& e)
            {
                throw ValidationError(path_ + ": " + e.what());
            }
        }
        return exp_so3(vec3());
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_ + ": " + msg); }

private:
    const json& node_;
    std::string path_;
};

json parse_json(std::string_view text)
{
    try
    {
        return json::parse(text);
    } catch (const json::parse_error& e)
    {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        const std::string_view head = text.substr(0, byte);
        const auto line = 1 + std::count(head.begin(), head.end(), '\n');
        const auto last_nl = head.rfind('\n');
        const auto column = last_nl == std::string_view::npos ? byte : byte - last_nl - 1;
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column)
                         + ": " + e.what());
    }
}

int positive_int(const Field& f, long long min_value)
{
    const long long v = f.integer();
    if (v < min_value || v > 100000000)
        throw ValidationError(f.path() + " must be >= " + std::to_string(min_value));
    return static_cast<int>(v);
}

ObstacleSpec parse_obstacle(const Field& f, Space space, const std::optional<Vec3>& hint)
{
    f.require_object({"pose", "point", "tau", "d_scale", "n_exp"});
    ObstacleSpec o;
    if (space == Space::S2)
    {
        if (f.has("pose"))
            throw ValidationError(f.path() + ": sphere obstacles are given by a point, not a pose");
        const Vec3 q = f.at("point").vec3();
        try
        {
            const SpherePoint p(q);
            o.q0 = p.vector();
            o.g0 = lift_point(p, hint);
        } catch (const GeoplanError& e)
        {
            throw ValidationError(f.path() + ".point: " + e.what());
        }
    } else
    {
        if (f.has("point"))
            throw ValidationError(f.path() + ": SO3 obstacles are given by a pose, not a point");
        o.g0 = f.at("pose").rotation();
    }
    if (f.has("tau"))
        o.tau = f.child("tau").number();
    if (f.has("d_scale"))
        o.d_scale = f.child("d_scale").number();
    if (f.has("n_exp"))
    {
        const long long n = f.child("n_exp").integer();
        if (n < 1 || n > 1000)
            throw ValidationError(f.path() + ".n_exp must be an integer >= 1");
        o.n_exp = static_cast<int>(n);
    }
    try
    {
        o.validate();
    } catch (const InvalidObstacle& e)
    {
        throw ValidationError(f.path() + ": " + e.what());
    }
    return o;
}

void parse_endpoint(const Field& f, Scenario& s, bool start)
{
    if (s.space == Space::S2)
    {
        f.require_object({"point", "velocity"});
        const Vec3 q = f.at("point").vec3();
        const Vec3 v = f.has("velocity") ? f.child("velocity").vec3() : Vec3::Zero();
        try
        {
            SphereBoundary b(SpherePoint(q), v);
            (start ? s.bc.sphere_a : s.bc.sphere_b) = b;
        } catch (const NotOnSphere& e)
        {
            throw ValidationError(f.path() + ": " + e.what());
        }
        return;
    }
    f.require_object({"pose", "velocity"});
    const Rotation g = f.at("pose").rotation();
    const Vec3 xi = f.has("velocity") ? f.child("velocity").vec3() : Vec3::Zero();
    (start ? s.bc.g_a : s.bc.g_b) = g;
    (start ? s.bc.xi_a : s.bc.xi_b) = xi;
}

InertiaTensor parse_inertia(const Field& f)
{
    try
    {
        if (f.array_size() == 3 && !f.node().at(0).is_array())
            return InertiaTensor::diagonal(f.vec3());
        return InertiaTensor(f.mat3());
    } catch (const NotPositiveDefinite& e)
    {
        throw ValidationError(f.path() + ": " + e.what());
    }
}

void validate_scenario(const Scenario& s, bool inertia_given)
{
    if (s.space == Space::S2 && s.metric != MetricKind::BiInvariant)
        throw ValidationError("space S2 requires the bi_invariant metric");
    if (s.metric == MetricKind::BiInvariant && inertia_given && !s.inertia.is_identity())
        throw ValidationError("the bi_invariant metric requires the identity inertia; use "
                              "metric = mixed for a general inertia");
    if (s.metric == MetricKind::LeftInvariant)
        for (const auto& o : s.obstacles)
            if (o.tau > 0.0)
                throw ValidationError(
                    "left_invariant distance mode is not supported for obstacles: the "
                    "distance of a general left-invariant metric has no closed form; use "
                    "metric = mixed");
    if (!(s.bc.t_b > s.bc.t_a))
        throw ValidationError("time.b must exceed time.a");
    if (!(s.solver.tol > 0.0))
        throw ValidationError("solver.tol must be positive");
    if (s.unknowns)
    {
        const Eigen::Index expected = s.space == Space::S2 ? 4 : 6;
        if (s.unknowns->size() != expected)
            throw ValidationError("unknowns must have " + std::to_string(expected) + " entries");
    }
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_number(double v)
{
    return std::isfinite(v) ? fmt17(v) : "null";
}

std::vector<double> sample_row(const TrajectorySample& s)
{
    std::vector<double> row{s.t};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            row.push_back(s.h(r, c));
    for (const Vec3* v : {&s.xi, &s.eta, &s.eta_dot})
        row.insert(row.end(), {v->x(), v->y(), v->z()});
    if (s.q)
        row.insert(row.end(), {s.q->x(), s.q->y(), s.q->z()});
    row.push_back(s.dist);
    row.push_back(s.v_pot);
    return row;
}

Report report_from_plan(const PlannedTrajectory& plan)
{
    Report r;
    r.converged = plan.converged;
    r.residual_norm = plan.residual_norm;
    r.iterations = plan.iterations;
    r.homotopy_stages_completed = plan.homotopy_stages_completed;
    r.unknowns = plan.unknowns;
    r.min_distance = plan.min_distance;
    r.baseline_min_distance = plan.baseline_min_distance;
    r.samples = plan.samples;
    return r;
}

void append_array(std::ostringstream& out, const std::vector<double>& v)
{
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i)
        out << (i ? ", " : "") << json_number(v[i]);
    out << ']';
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    const json doc = parse_json(text);
    const Field root(doc, "$");
    root.require_object({"space", "metric", "inertia", "obstacles", "boundary", "time", "solver",
                         "potential_mode", "antipode_hint", "seed", "unknowns"});

    Scenario s;
    if (root.has("space"))
    {
        const std::string space = root.child("space").string();
        if (space == "SO3")
            s.space = Space::SO3;
        else if (space == "S2")
            s.space = Space::S2;
        else
            throw ValidationError("$.space must be SO3 or S2, got '" + space + "'");
    }

    if (root.has("metric"))
    {
        const std::string metric = root.child("metric").string();
        if (metric == "left_invariant")
            s.metric = MetricKind::LeftInvariant;
        else if (metric == "bi_invariant")
            s.metric = MetricKind::BiInvariant;
        else if (metric == "mixed")
            s.metric = MetricKind::Mixed;
        else
            throw ValidationError("$.metric must be left_invariant, bi_invariant or mixed, got '"
                                  + metric + "'");
    }

    const bool inertia_given = root.has("inertia");
    if (inertia_given)
        s.inertia = parse_inertia(root.child("inertia"));

    if (root.has("antipode_hint"))
        s.antipode_hint = root.child("antipode_hint").vec3();

    if (root.has("potential_mode"))
    {
        const std::string mode = root.child("potential_mode").string();
        if (mode == "local")
            s.potential_mode = SpherePotentialMode::Local;
        else if (mode == "exact_theta")
            s.potential_mode = SpherePotentialMode::ExactTheta;
        else
            throw ValidationError("$.potential_mode must be local or exact_theta, got '" + mode
                                  + "'");
        if (s.space != Space::S2)
            throw ValidationError("$.potential_mode applies to S2 scenarios only");
    }

    if (root.has("obstacles"))
    {
        const Field list = root.child("obstacles");
        for (std::size_t i = 0; i < list.array_size(); ++i)
        {
            ObstacleSpec o = parse_obstacle(list.element(i), s.space, s.antipode_hint);
            if (s.metric == MetricKind::Mixed)
                o.metric_mode = MetricMode::LeftWithBiDistance;
            s.obstacles.push_back(o);
        }
    }

    const Field boundary = root.at("boundary");
    boundary.require_object({"start", "end"});
    parse_endpoint(boundary.at("start"), s, true);
    parse_endpoint(boundary.at("end"), s, false);

    if (root.has("time"))
    {
        const Field time = root.child("time");
        time.require_object({"a", "b", "n_steps", "record_every"});
        if (time.has("a"))
            s.bc.t_a = time.child("a").number();
        if (time.has("b"))
            s.bc.t_b = time.child("b").number();
        if (time.has("n_steps"))
            s.controls.n_steps = positive_int(time.child("n_steps"), 1);
        if (time.has("record_every"))
            s.controls.record_every = positive_int(time.child("record_every"), 1);
    }

    if (root.has("solver"))
    {
        const Field solver = root.child("solver");
        solver.require_object({"tol", "max_iters", "homotopy_stages"});
        if (solver.has("tol"))
            s.solver.tol = solver.child("tol").number();
        if (solver.has("max_iters"))
            s.solver.max_iters = positive_int(solver.child("max_iters"), 0);
        if (solver.has("homotopy_stages"))
            s.solver.homotopy_stages = positive_int(solver.child("homotopy_stages"), 1);
    }

    if (root.has("seed"))
    {
        const long long seed = root.child("seed").integer();
        if (seed < 0)
            throw ValidationError("$.seed must be non-negative");
        s.solver.seed = static_cast<std::uint64_t>(seed);
    }

    if (root.has("unknowns"))
    {
        const Field u = root.child("unknowns");
        Eigen::VectorXd v(static_cast<Eigen::Index>(u.array_size()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = u.element(static_cast<std::size_t>(i)).number();
        s.unknowns = v;
    }

    validate_scenario(s, inertia_given);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

ShootingProblem to_problem(const Scenario& s)
{
    ShootingProblem p;
    if (s.space == Space::S2)
        p.dynamics = Dynamics::Sphere;
    else if (s.metric == MetricKind::LeftInvariant)
        p.dynamics = Dynamics::LeftInvariant;
    else if (s.metric == MetricKind::Mixed)
        p.dynamics = Dynamics::Mixed;
    else
        p.dynamics = Dynamics::BiInvariant;
    p.inertia = s.inertia;
    p.obstacles = s.obstacles;
    p.bc = s.bc;
    p.controls = s.controls;
    p.sphere_mode = s.potential_mode;
    p.antipode_hint = s.antipode_hint;
    p.validate();
    return p;
}

Report run_scenario(const Scenario& s)
{
    const auto start = std::chrono::steady_clock::now();
    const ShootingProblem p = to_problem(s);
    Report r;
    try
    {
        r = report_from_plan(solve(p, s.unknowns, s.solver));
    } catch (const NoConvergence& e)
    {
        r = report_from_plan(e.best());
        r.converged = false;
        r.message = e.what();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Report simulate_scenario(const Scenario& s)
{
    const auto start = std::chrono::steady_clock::now();
    const ShootingProblem p = to_problem(s);
    const Eigen::VectorXd u = s.unknowns ? *s.unknowns : Eigen::VectorXd::Zero(p.unknown_count());
    Report r;
    r.unknowns = u;
    r.samples = simulate(p, u);
    r.min_distance = min_obstacle_distances(p, r.samples);
    try
    {
        const Eigen::VectorXd res = residual(p, u);
        r.residual_norm = res.cwiseAbs().maxCoeff();
        r.converged = r.residual_norm < s.solver.tol;
    } catch (const AntipodalSingularity& e)
    {
        r.residual_norm = std::numeric_limits<double>::infinity();
        r.message = e.what();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<std::string> trajectory_columns(bool with_sphere_point)
{
    std::vector<std::string> cols{"t"};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            cols.push_back("h" + std::to_string(r) + std::to_string(c));
    for (const char* name : {"xi", "eta", "etadot"})
        for (const char* axis : {"_x", "_y", "_z"})
            cols.push_back(std::string(name) + axis);
    if (with_sphere_point)
        cols.insert(cols.end(), {"qx", "qy", "qz"});
    cols.insert(cols.end(), {"dist", "V"});
    return cols;
}

void write_trajectory(const std::vector<TrajectorySample>& samples,
                      TrajectoryFormat format,
                      std::ostream& out)
{
    if (samples.empty())
        throw InvalidArgument("cannot write an empty trajectory");
    const bool sphere = samples.front().q.has_value();
    const std::vector<std::string> cols = trajectory_columns(sphere);

    if (format == TrajectoryFormat::Csv)
    {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << (i ? "," : "") << cols[i];
        out << '\n';
        for (const auto& s : samples)
        {
            const std::vector<double> row = sample_row(s);
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << fmt17(row[i]);
            out << '\n';
        }
        return;
    }

    out << "[\n";
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        const std::vector<double> row = sample_row(samples[k]);
        out << "  {";
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? ", " : "") << '"' << cols[i] << "\": " << json_number(row[i]);
        out << (k + 1 < samples.size() ? "},\n" : "}\n");
    }
    out << "]\n";
}

void write_trajectory(const std::vector<TrajectorySample>& samples,
                      TrajectoryFormat format,
                      const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    write_trajectory(samples, format, out);
    out.flush();
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::string report_json(const Report& r)
{
    std::ostringstream out;
    out << "{\n  \"converged\": " << (r.converged ? "true" : "false")
        << ",\n  \"residual_norm\": " << json_number(r.residual_norm)
        << ",\n  \"iterations\": " << r.iterations
        << ",\n  \"homotopy_stages_completed\": " << r.homotopy_stages_completed
        << ",\n  \"unknowns\": ";
    append_array(out, std::vector<double>(r.unknowns.data(), r.unknowns.data() + r.unknowns.size()));
    out << ",\n  \"min_distance\": ";
    append_array(out, r.min_distance);
    out << ",\n  \"baseline_min_distance\": ";
    append_array(out, r.baseline_min_distance);
    out << ",\n  \"samples\": " << r.samples.size()
        << ",\n  \"wall_time\": " << json_number(r.wall_time)
        << ",\n  \"message\": " << json(r.message).dump() << "\n}\n";
    return out.str();
}

} // namespace geoplan
