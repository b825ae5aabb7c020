// geoplan: command-line front end for the trajectory planner.
#include <geoplan/check.hpp>
#include <geoplan/errors.hpp>
#include <geoplan/scenario.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace geoplan;

namespace {

enum ExitCode
{
    kOk = 0,
    kNoConvergence = 1,
    kBadInput = 2,
    kRuntime = 3,
};

struct OutputOptions
{
    std::string output;
    std::string format = "csv";
    std::string report;
    bool quiet = false;
};

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("geoplan");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GEOPLAN_LOG"))
        spdlog::set_level(spdlog::level::from_str(env));
}

std::string join(const std::vector<double>& v)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out << (i ? " " : "") << v[i];
    return v.empty() ? "-" : out.str();
}

void print_summary(const Report& r)
{
    std::cout << "converged:      " << (r.converged ? "yes" : "no") << '\n'
              << "residual (inf): " << r.residual_norm << '\n'
              << "iterations:     " << r.iterations << '\n'
              << "min distance:   " << join(r.min_distance) << '\n'
              << "baseline (tau=0): " << join(r.baseline_min_distance) << '\n'
              << "samples:        " << r.samples.size() << '\n'
              << "wall time [s]:  " << r.wall_time << '\n';
    if (!r.message.empty())
        std::cout << "diagnostics:    " << r.message << '\n';
}

void write_outputs(const Report& r, const OutputOptions& o)
{
    if (!o.output.empty() && !r.samples.empty())
        write_trajectory(r.samples, o.format == "json" ? TrajectoryFormat::Json : TrajectoryFormat::Csv,
                         std::filesystem::path(o.output));
    if (!o.report.empty())
    {
        std::ofstream out(o.report);
        out << report_json(r);
        if (!out)
            throw IoError("failed writing " + o.report);
    }
    if (!o.quiet)
        print_summary(r);
}

int cmd_plan(const std::string& path, const OutputOptions& o)
{
    const Report r = run_scenario(load_scenario(path));
    write_outputs(r, o);
    if (!r.converged)
        std::cerr << r.message << '\n';
    return r.converged ? kOk : kNoConvergence;
}

int cmd_simulate(const std::string& path, const std::vector<double>& unknowns, const OutputOptions& o)
{
    Scenario s = load_scenario(path);
    if (!unknowns.empty())
    {
        const Eigen::Index expected = s.space == Space::S2 ? 4 : 6;
        if (static_cast<Eigen::Index>(unknowns.size()) != expected)
            throw ValidationError("--unknowns needs " + std::to_string(expected) + " values");
        s.unknowns = Eigen::Map<const Eigen::VectorXd>(unknowns.data(), expected);
    }
    write_outputs(simulate_scenario(s), o);
    return kOk;
}

int cmd_sweep(const std::string& path,
              const std::string& param,
              const std::vector<double>& values,
              int jobs,
              const OutputOptions& o)
{
    if (param != "tau" && param != "d_scale")
        throw ValidationError("--param must be tau or d_scale");
    const Scenario base = load_scenario(path);
    if (base.obstacles.empty())
        throw ValidationError("sweep needs at least one obstacle");

    std::vector<Scenario> runs;
    for (double v : values)
    {
        Scenario s = base;
        for (auto& ob : s.obstacles)
        {
            (param == "tau" ? ob.tau : ob.d_scale) = v;
            try
            {
                ob.validate();
            } catch (const InvalidObstacle& e)
            {
                throw ValidationError(e.what());
            }
        }
        runs.push_back(std::move(s));
    }

    std::vector<Report> reports(runs.size());
    std::vector<std::string> errors(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++)
        {
            try
            {
                reports[i] = run_scenario(runs[i]);
            } catch (const std::exception& e)
            {
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(runs.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    bool all_ok = true;
    std::ostringstream json;
    json << "[\n";
    if (!o.quiet)
        std::printf("%-12s %-9s %-12s %-6s %s\n", param.c_str(), "converged", "residual", "iters",
                    "min distance");
    for (std::size_t i = 0; i < runs.size(); ++i)
    {
        const Report& r = reports[i];
        const bool ok = errors[i].empty() && r.converged;
        all_ok = all_ok && ok;
        if (!o.quiet)
        {
            if (!errors[i].empty())
                std::printf("%-12g error     %s\n", values[i], errors[i].c_str());
            else
                std::printf("%-12g %-9s %-12.3e %-6d %s\n", values[i], r.converged ? "yes" : "no",
                            r.residual_norm, r.iterations, join(r.min_distance).c_str());
        }
        std::string body = errors[i].empty() ? report_json(r) : "{\"error\": \"failed\"}\n";
        body.pop_back();
        json << "  {\"" << param << "\": " << values[i] << ", \"report\": " << body << "}"
             << (i + 1 < runs.size() ? ",\n" : "\n");
    }
    json << "]\n";
    if (!o.output.empty())
    {
        std::ofstream out(o.output);
        out << json.str();
        if (!out)
            throw IoError("failed writing " + o.output);
    }
    return all_ok ? kOk : kNoConvergence;
}

int cmd_check(std::uint64_t seed, bool quiet)
{
    const std::vector<CheckResult> results = run_identity_checks(seed);
    bool all = true;
    if (!quiet)
        std::printf("%-42s %6s %12s %10s  %s\n", "identity", "cases", "worst", "tol", "status");
    for (const auto& r : results)
    {
        all = all && r.passed;
        if (!quiet)
            std::printf("%-42s %6d %12.3e %10.1e  %s\n", r.name.c_str(), r.cases, r.worst,
                        r.tolerance, r.passed ? "PASS" : "FAIL");
    }
    if (!quiet)
        std::printf("%s\n", all ? "all identity checks passed" : "identity checks FAILED");
    return all ? kOk : kRuntime;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Obstacle-avoiding trajectory planning on SO(3) and S^2"};
    app.require_subcommand(1);

    OutputOptions out;
    std::string scenario_path;
    std::vector<double> unknowns;
    std::string param = "tau";
    std::vector<double> values{0.0, 1.0, 10.0, 50.0};
    int jobs = 1;
    std::uint64_t seed = 0;

    auto add_output = [&out](CLI::App* cmd) {
        cmd->add_option("--output,-o", out.output, "trajectory output path");
        cmd->add_option("--format", out.format, "trajectory format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--report", out.report, "write the run report as JSON");
        cmd->add_flag("--quiet,-q", out.quiet, "suppress the summary");
    };

    auto* plan = app.add_subcommand("plan", "solve the boundary-value problem");
    plan->add_option("scenario", scenario_path)->required();
    add_output(plan);

    auto* sim = app.add_subcommand("simulate", "integrate the initial-value problem");
    sim->add_option("scenario", scenario_path)->required();
    sim->add_option("--unknowns", unknowns, "eta(a), eta'(a); comma separated")->delimiter(',');
    add_output(sim);

    auto* sweep = app.add_subcommand("sweep", "re-plan over a range of one obstacle parameter");
    sweep->add_option("scenario", scenario_path)->required();
    sweep->add_option("--param", param, "tau or d_scale");
    sweep->add_option("--values", values, "comma separated values")->delimiter(',');
    sweep->add_option("--jobs,-j", jobs, "concurrent runs")->check(CLI::PositiveNumber);
    sweep->add_option("--output,-o", out.output, "summary JSON path");
    sweep->add_flag("--quiet,-q", out.quiet, "suppress the table");

    auto* check = app.add_subcommand("check", "run the built-in identity suite");
    check->add_option("--seed", seed);
    check->add_flag("--quiet,-q", out.quiet, "suppress the table");

    try
    {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    setup_logging();
    try
    {
        if (*plan)
            return cmd_plan(scenario_path, out);
        if (*sim)
            return cmd_simulate(scenario_path, unknowns, out);
        if (*sweep)
            return cmd_sweep(scenario_path, param, values, jobs, out);
        return cmd_check(seed, out.quiet);
    } catch (const ParseError& e)
    {
        std::cerr << e.what() << '\n';
        return kBadInput;
    } catch (const ValidationError& e)
    {
        std::cerr << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e)
    {
        std::cerr << e.what() << '\n';
        return kRuntime;
    }
}
