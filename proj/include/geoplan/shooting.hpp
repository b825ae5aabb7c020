#pragma once

#include <geoplan/errors.hpp>
#include <geoplan/integrator.hpp>
#include <geoplan/metric.hpp>
#include <geoplan/potential.hpp>
#include <geoplan/sphere.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace geoplan {

/// Which reduced system the planner integrates.
enum class Dynamics
{
    LeftInvariant, ///< left-invariant metric, no obstacle potential allowed
    BiInvariant,   ///< bi-invariant metric (J = I)
    Mixed,         ///< left-invariant metric with bi-invariant obstacle distance
    Sphere,        ///< horizontal lift to SO(3) of a curve on S^2
};

/// Endpoint data on [t_a, t_b]. SO(3) runs use the poses and body
/// velocities; sphere runs use sphere_a / sphere_b instead.
struct BoundaryConditions
{
    double t_a = 0.0;
    double t_b = 1.0;
    Rotation g_a;
    Rotation g_b;
    AlgebraVector xi_a = AlgebraVector::Zero();
    AlgebraVector xi_b = AlgebraVector::Zero();
    std::optional<SphereBoundary> sphere_a;
    std::optional<SphereBoundary> sphere_b;
};

struct IntegrationControls
{
    /// Total RK4 steps; 0 selects 200 steps per unit time.
    int n_steps = 0;
    int record_every = 1;
};

struct ShootingProblem
{
    Dynamics dynamics = Dynamics::BiInvariant;
    InertiaTensor inertia;
    std::vector<ObstacleSpec> obstacles;
    BoundaryConditions bc;
    IntegrationControls controls;
    SpherePotentialMode sphere_mode = SpherePotentialMode::Local;
    std::optional<Vec3> antipode_hint = Vec3::UnitX();

    /// 6 for SO(3) systems, 4 for the sphere (horizontal components only).
    int unknown_count() const { return dynamics == Dynamics::Sphere ? 4 : 6; }
    int steps() const;

    /// Throws ValidationError on inconsistent fields.
    void validate() const;
};

struct SolverOptions
{
    double tol = 1e-6;
    int max_iters = 100;
    int homotopy_stages = 8;
    double lambda_init = 1e-3;
    double lambda_max = 1e8;
    double fd_eps = 1e-6;
    /// Extra seeded initial guesses tried after a NoConvergence.
    int fallback_guesses = 8;
    std::uint64_t seed = 0;
};

struct PlannedTrajectory
{
    Eigen::VectorXd unknowns;
    Eigen::VectorXd residual;
    double residual_norm = 0.0; ///< infinity norm
    int iterations = 0;
    bool converged = false;
    int homotopy_stages_completed = 0;
    std::vector<TrajectorySample> samples;
    /// Minimum over the trajectory of the distance to each obstacle.
    std::vector<double> min_distance;
    /// Same quantity for the zero-potential (first homotopy stage) solution.
    std::vector<double> baseline_min_distance;
};

/// Shooting failed; carries the best iterate found.
class NoConvergence : public GeoplanError
{
public:
    NoConvergence(const std::string& what, PlannedTrajectory best)
        : NoConvergence("NoConvergence: ", what, std::move(best))
    {}

    const PlannedTrajectory& best() const { return best_; }

protected:
    NoConvergence(const std::string& prefix, const std::string& what, PlannedTrajectory best)
        : GeoplanError(prefix + what)
        , best_(std::move(best))
    {}

private:
    PlannedTrajectory best_;
};

/// A homotopy stage beyond the first failed with the damping exhausted.
class HomotopyStall : public NoConvergence
{
public:
    HomotopyStall(const std::string& what, PlannedTrajectory best)
        : NoConvergence("HomotopyStall: ", what, std::move(best))
    {}
};

/// Initial reduced state for the given unknowns (eta(a), eta'(a)).
ReducedState initial_state(const ShootingProblem& p, const Eigen::VectorXd& unknowns);

/// Right-hand side of the selected reduced system.
RhsFunction make_rhs(const ShootingProblem& p);

/// Endpoint mismatch: position error in a log chart followed by the
/// velocity error. Zero iff both endpoint conditions hold.
Eigen::VectorXd residual(const ShootingProblem& p, const Eigen::VectorXd& unknowns);

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian with componentwise step eps.
Eigen::MatrixXd fd_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double eps = 1e-6);
Eigen::MatrixXd fd_jacobian(const ShootingProblem& p,
                            const Eigen::VectorXd& unknowns,
                            double eps = 1e-6);

/// Integrates the problem from the given unknowns and records samples.
std::vector<TrajectorySample> simulate(const ShootingProblem& p,
                                       const Eigen::VectorXd& unknowns,
                                       int steps_multiplier = 1);

/// Minimum distance to each obstacle along the samples.
std::vector<double> min_obstacle_distances(const ShootingProblem& p,
                                           const std::vector<TrajectorySample>& samples);

/// Rotation g(t) = g_ref h(t) of a sample.
Rotation absolute_pose(const ShootingProblem& p, const TrajectorySample& sample);

/**
 * Levenberg-Marquardt shooting with tau-homotopy when obstacles are active.
 * Throws NoConvergence / HomotopyStall carrying the best iterate.
 */
PlannedTrajectory solve(const ShootingProblem& p,
                        const std::optional<Eigen::VectorXd>& guess = std::nullopt,
                        const SolverOptions& opts = {});

/// Re-integrates at refine x resolution and returns the maximum pointwise
/// mismatch between a central difference of the top slot and the equation.
double equation_residual(const ShootingProblem& p, const Eigen::VectorXd& unknowns, int refine = 10);

} // namespace geoplan
