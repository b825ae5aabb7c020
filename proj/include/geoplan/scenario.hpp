#pragma once

#include <geoplan/shooting.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoplan {

enum class Space
{
    SO3,
    S2,
};

enum class MetricKind
{
    LeftInvariant,
    BiInvariant,
    Mixed,
};

/// A planning problem as read from a scenario document. Angles are radians.
struct Scenario
{
    Space space = Space::SO3;
    MetricKind metric = MetricKind::BiInvariant;
    InertiaTensor inertia;
    std::vector<ObstacleSpec> obstacles;
    BoundaryConditions bc;
    IntegrationControls controls;
    SolverOptions solver;
    SpherePotentialMode potential_mode = SpherePotentialMode::Local;
    std::optional<Vec3> antipode_hint = Vec3::UnitX();
    /// Shooting unknowns for `simulate`; optional initial guess for `plan`.
    std::optional<Eigen::VectorXd> unknowns;
};

/**
 * Parses a JSON scenario and fills defaults. Throws ParseError (syntax,
 * with line and column, or a malformed field, with its path) and
 * ValidationError for documents that parse but violate an invariant.
 */
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

ShootingProblem to_problem(const Scenario& s);

struct Report
{
    bool converged = false;
    double residual_norm = 0.0;
    int iterations = 0;
    int homotopy_stages_completed = 0;
    Eigen::VectorXd unknowns;
    std::vector<double> min_distance;
    std::vector<double> baseline_min_distance;
    std::vector<TrajectorySample> samples;
    double wall_time = 0.0; ///< seconds
    std::string message;    ///< solver diagnostics on failure
};

/// Solves the scenario. NoConvergence is folded into a Report with
/// converged = false; every other error propagates.
Report run_scenario(const Scenario& s);

/// Integrates from the scenario's unknowns without solving.
Report simulate_scenario(const Scenario& s);

enum class TrajectoryFormat
{
    Csv,
    Json,
};

/// Column names of the CSV output, in order.
std::vector<std::string> trajectory_columns(bool with_sphere_point);

void write_trajectory(const std::vector<TrajectorySample>& samples,
                      TrajectoryFormat format,
                      std::ostream& out);
/// Throws IoError naming the path when it cannot be written.
void write_trajectory(const std::vector<TrajectorySample>& samples,
                      TrajectoryFormat format,
                      const std::filesystem::path& path);

/// Report summary as JSON; samples are left out.
std::string report_json(const Report& r);

} // namespace geoplan
