#include <geoplan/shooting.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace geoplan {

namespace {

/// Quantities derived once per problem: reference pose, obstacle offsets,
/// start state and targets, all relative to the reference pose.
struct Setup
{
    Rotation reference;
    std::vector<PlacedObstacle> placed;
    ReducedState start;
    Rotation h_target;
    AlgebraVector xi_target = AlgebraVector::Zero();
    // sphere targets, expressed in the world frame
    Vec3 q_target = Vec3::Zero();
    Vec3 v_target = Vec3::Zero();
};

Setup make_setup(const ShootingProblem& p)
{
    Setup s;
    if (!p.obstacles.empty())
        s.reference = p.obstacles.front().g0;
    for (const auto& o : p.obstacles)
        s.placed.push_back({o, o.g0.inverse() * s.reference});

    const Rotation ref_inv = s.reference.inverse();
    if (p.dynamics == Dynamics::Sphere)
    {
        const auto [r_a, omega_a] = lift_boundary(*p.bc.sphere_a, p.antipode_hint);
        s.start.h = ref_inv * r_a;
        s.start.xi = omega_a;
        s.q_target = p.bc.sphere_b->q.vector();
        s.v_target = p.bc.sphere_b->v;
    } else
    {
        s.start.h = ref_inv * p.bc.g_a;
        s.start.xi = p.bc.xi_a;
        s.h_target = ref_inv * p.bc.g_b;
        s.xi_target = p.bc.xi_b;
    }
    return s;
}

RhsFunction make_rhs(const ShootingProblem& p, const Setup& setup)
{
    switch (p.dynamics)
    {
    case Dynamics::LeftInvariant:
    case Dynamics::Mixed:
        return [j = p.inertia, placed = setup.placed](const ReducedState& s) {
            return rhs_left_invariant(j, placed, s);
        };
    case Dynamics::BiInvariant:
        return [placed = setup.placed](const ReducedState& s) {
            return rhs_bi_invariant(placed, s);
        };
    case Dynamics::Sphere:
        return [placed = setup.placed, mode = p.sphere_mode](const ReducedState& s) {
            return rhs_sphere(placed, s, mode);
        };
    }
    throw InvalidArgument("unknown dynamics selector");
}

ReducedState initial_state(const ShootingProblem& p, const Setup& setup, const Eigen::VectorXd& u)
{
    if (u.size() != p.unknown_count())
        throw InvalidArgument("expected " + std::to_string(p.unknown_count()) + " unknowns, got "
                              + std::to_string(u.size()));
    if (!u.allFinite())
        throw InvalidArgument("unknowns must be finite");
    ReducedState s = setup.start;
    if (p.dynamics == Dynamics::Sphere)
    {
        s.eta = Vec3(u[0], u[1], 0.0);
        s.eta_dot = Vec3(u[2], u[3], 0.0);
    } else
    {
        s.eta = u.segment<3>(0);
        s.eta_dot = u.segment<3>(3);
    }
    return s;
}

Eigen::VectorXd endpoint_residual(const ShootingProblem& p, const Setup& setup, const ReducedState& end)
{
    if (p.dynamics == Dynamics::Sphere)
    {
        const Rotation r_b = setup.reference * end.h;
        const Vec3 u = r_b.inverse() * setup.q_target;
        const Vec3 axis = Vec3::UnitZ().cross(u);
        const double s = axis.norm();
        const double angle = std::atan2(s, u.z());
        if (s < 1e-12 && u.z() < 0.0)
            throw AntipodalSingularity("sphere endpoint is antipodal to the target");
        const Vec3 pos = s < 1e-300 ? Vec3::Zero() : Vec3(angle / s * axis);
        const Vec3 vel = end.xi - Vec3::UnitZ().cross(r_b.inverse() * setup.v_target);
        Eigen::VectorXd r(4);
        r << pos.x(), pos.y(), vel.x(), vel.y();
        return r;
    }
    Eigen::VectorXd r(6);
    r.segment<3>(0) = log_so3(end.h.inverse() * setup.h_target);
    r.segment<3>(3) = end.xi - setup.xi_target;
    return r;
}

SampleAnnotator make_annotator(const ShootingProblem& p, const Setup& setup)
{
    return [&p, &setup](TrajectorySample& sample) {
        if (p.dynamics == Dynamics::Sphere)
            sample.q = (setup.reference * sample.h).matrix().col(2);
        if (setup.placed.empty())
        {
            sample.dist = distance_to_obstacle(sample.h);
            sample.v_pot = 0.0;
            return;
        }
        double dist = std::numeric_limits<double>::infinity();
        double v = 0.0;
        for (const auto& o : setup.placed)
        {
            const Rotation rel = o.offset * sample.h;
            const double d = p.dynamics == Dynamics::Sphere
                                 ? sphere_obstacle_distance(rel, p.sphere_mode)
                                 : distance_to_obstacle(rel);
            dist = std::min(dist, d);
            v += potential_of_distance(o.spec, d);
        }
        sample.dist = dist;
        sample.v_pot = v;
    };
}

double inf_norm(const Eigen::VectorXd& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

enum class LmStatus
{
    Converged,
    MaxIterations,
    Stalled,
};

struct LmResult
{
    Eigen::VectorXd x;
    Eigen::VectorXd r;
    int iterations = 0;
    LmStatus status = LmStatus::MaxIterations;
};

LmResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd x, const SolverOptions& opts)
{
    LmResult out;
    Eigen::VectorXd r = f(x);
    double lambda = opts.lambda_init;
    const Eigen::Index n = x.size();

    for (int it = 0;; ++it)
    {
        out.x = x;
        out.r = r;
        out.iterations = it;
        if (inf_norm(r) < opts.tol)
        {
            out.status = LmStatus::Converged;
            return out;
        }
        if (it >= opts.max_iters)
        {
            out.status = LmStatus::MaxIterations;
            return out;
        }

        const Eigen::MatrixXd jac = fd_jacobian(f, x, opts.fd_eps);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        const double cost = r.squaredNorm();

        bool accepted = false;
        while (!accepted)
        {
            const Eigen::MatrixXd a = jtj + lambda * Eigen::MatrixXd::Identity(n, n);
            const Eigen::VectorXd step = a.ldlt().solve(-jtr);
            const Eigen::VectorXd trial = x + step;
            Eigen::VectorXd r_trial;
            bool ok = step.allFinite();
            if (ok)
            {
                try
                {
                    r_trial = f(trial);
                    ok = r_trial.allFinite();
                } catch (const GeoplanError& e)
                {
                    spdlog::debug("LM trial rejected: {}", e.what());
                    ok = false;
                }
            }
            if (ok && r_trial.squaredNorm() < cost)
            {
                x = trial;
                r = r_trial;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
            } else
            {
                lambda *= 10.0;
                if (lambda > opts.lambda_max)
                {
                    out.status = LmStatus::Stalled;
                    out.iterations = it + 1;
                    return out;
                }
            }
        }
        spdlog::debug("LM iteration {}: |r|_inf = {:.3e}, lambda = {:.1e}", it + 1, inf_norm(r), lambda);
    }
}

ShootingProblem scaled_potential(const ShootingProblem& p, double factor)
{
    ShootingProblem q = p;
    for (auto& o : q.obstacles)
        o.tau *= factor;
    return q;
}

PlannedTrajectory make_plan(const ShootingProblem& p, const LmResult& lm)
{
    PlannedTrajectory plan;
    plan.unknowns = lm.x;
    plan.residual = lm.r;
    plan.residual_norm = inf_norm(lm.r);
    plan.iterations = lm.iterations;
    plan.converged = lm.status == LmStatus::Converged;
    try
    {
        plan.samples = simulate(p, lm.x);
        plan.min_distance = min_obstacle_distances(p, plan.samples);
    } catch (const GeoplanError& e)
    {
        spdlog::warn("could not record trajectory of the best iterate: {}", e.what());
    }
    return plan;
}

PlannedTrajectory solve_from(const ShootingProblem& p,
                             const Eigen::VectorXd& guess,
                             const SolverOptions& opts)
{
    const bool active = std::any_of(p.obstacles.begin(), p.obstacles.end(),
                                    [](const ObstacleSpec& o) { return o.tau > 0.0; });
    const int stages = active ? std::max(opts.homotopy_stages, 1) : 0;

    Eigen::VectorXd x = guess;
    int total_iterations = 0;
    std::vector<double> baseline;
    for (int k = 0; k <= stages; ++k)
    {
        const ShootingProblem stage = active ? scaled_potential(p, double(k) / stages) : p;
        const LmResult lm = levenberg_marquardt(
            [&stage](const Eigen::VectorXd& u) { return residual(stage, u); }, x, opts);
        total_iterations += lm.iterations;
        spdlog::debug("stage {}/{}: {} iterations, |r|_inf = {:.3e}", k, stages, lm.iterations,
                      inf_norm(lm.r));

        if (lm.status != LmStatus::Converged)
        {
            PlannedTrajectory best = make_plan(stage, lm);
            best.iterations = total_iterations;
            best.homotopy_stages_completed = k;
            best.baseline_min_distance = baseline;
            const std::string msg = "stage " + std::to_string(k) + "/" + std::to_string(stages)
                                    + " ended with |r|_inf = " + std::to_string(best.residual_norm)
                                    + " after " + std::to_string(lm.iterations) + " iterations";
            if (lm.status == LmStatus::Stalled && k > 0)
                throw HomotopyStall(msg, std::move(best));
            throw NoConvergence(msg, std::move(best));
        }
        x = lm.x;
        if (active && k == 0)
            baseline = min_obstacle_distances(p, simulate(stage, x));
        if (k == stages)
        {
            PlannedTrajectory plan = make_plan(stage, lm);
            plan.iterations = total_iterations;
            plan.homotopy_stages_completed = stages;
            plan.baseline_min_distance = active ? baseline : plan.min_distance;
            return plan;
        }
    }
    throw InvalidArgument("unreachable");
}

} // namespace

int ShootingProblem::steps() const
{
    if (controls.n_steps > 0)
        return controls.n_steps;
    return std::max(1, static_cast<int>(std::lround(200.0 * (bc.t_b - bc.t_a))));
}

void ShootingProblem::validate() const
{
    if (!(bc.t_b > bc.t_a) || !std::isfinite(bc.t_a) || !std::isfinite(bc.t_b))
        throw ValidationError("time span requires finite a < b");
    if (controls.n_steps < 0 || controls.record_every < 1)
        throw ValidationError("n_steps must be >= 0 and record_every >= 1");
    for (const auto& o : obstacles)
    {
        try
        {
            o.validate();
        } catch (const InvalidObstacle& e)
        {
            throw ValidationError(e.what());
        }
    }
    if (dynamics == Dynamics::LeftInvariant)
    {
        for (const auto& o : obstacles)
            if (o.tau > 0.0)
                throw ValidationError(
                    "a purely left-invariant obstacle distance is not computable; use the mixed "
                    "metric (bi-invariant distance) for obstacles");
    }
    if (dynamics == Dynamics::Sphere)
    {
        if (!bc.sphere_a || !bc.sphere_b)
            throw ValidationError("sphere dynamics needs sphere boundary data");
        for (const auto& o : obstacles)
        {
            if (!o.q0)
                throw ValidationError("sphere obstacles need a point q0");
            if ((o.g0 * Vec3::UnitZ() - *o.q0).norm() > 1e-9)
                throw ValidationError("sphere obstacle pose must project onto q0");
        }
    } else
    {
        if (!bc.xi_a.allFinite() || !bc.xi_b.allFinite())
            throw ValidationError("boundary velocities must be finite");
    }
}

ReducedState initial_state(const ShootingProblem& p, const Eigen::VectorXd& unknowns)
{
    return initial_state(p, make_setup(p), unknowns);
}

RhsFunction make_rhs(const ShootingProblem& p)
{
    return make_rhs(p, make_setup(p));
}

Eigen::VectorXd residual(const ShootingProblem& p, const Eigen::VectorXd& unknowns)
{
    const Setup setup = make_setup(p);
    const ReducedState s0 = initial_state(p, setup, unknowns);
    const ReducedState end = integrate_endpoint(make_rhs(p, setup), s0, p.bc.t_a, p.bc.t_b, p.steps());
    return endpoint_residual(p, setup, end);
}

Eigen::MatrixXd fd_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double eps)
{
    Eigen::MatrixXd jac;
    for (Eigen::Index k = 0; k < x.size(); ++k)
    {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[k] += eps;
        xm[k] -= eps;
        const Eigen::VectorXd col = (f(xp) - f(xm)) / (2.0 * eps);
        if (k == 0)
            jac.resize(col.size(), x.size());
        jac.col(k) = col;
    }
    return jac;
}

Eigen::MatrixXd fd_jacobian(const ShootingProblem& p, const Eigen::VectorXd& unknowns, double eps)
{
    return fd_jacobian([&p](const Eigen::VectorXd& u) { return residual(p, u); }, unknowns, eps);
}

std::vector<TrajectorySample> simulate(const ShootingProblem& p,
                                       const Eigen::VectorXd& unknowns,
                                       int steps_multiplier)
{
    const Setup setup = make_setup(p);
    const ReducedState s0 = initial_state(p, setup, unknowns);
    const int multiplier = std::max(steps_multiplier, 1);
    return integrate(make_rhs(p, setup), s0, p.bc.t_a, p.bc.t_b, p.steps() * multiplier,
                     p.controls.record_every, make_annotator(p, setup));
}

std::vector<double> min_obstacle_distances(const ShootingProblem& p,
                                           const std::vector<TrajectorySample>& samples)
{
    const Setup setup = make_setup(p);
    std::vector<double> result(setup.placed.size(), std::numeric_limits<double>::infinity());
    for (const auto& sample : samples)
    {
        for (std::size_t i = 0; i < setup.placed.size(); ++i)
        {
            const Rotation rel = setup.placed[i].offset * sample.h;
            const double d = p.dynamics == Dynamics::Sphere
                                 ? sphere_obstacle_distance(rel, p.sphere_mode)
                                 : distance_to_obstacle(rel);
            result[i] = std::min(result[i], d);
        }
    }
    return result;
}

Rotation absolute_pose(const ShootingProblem& p, const TrajectorySample& sample)
{
    return (p.obstacles.empty() ? Rotation::identity() : p.obstacles.front().g0) * sample.h;
}

PlannedTrajectory solve(const ShootingProblem& p,
                        const std::optional<Eigen::VectorXd>& guess,
                        const SolverOptions& opts)
{
    p.validate();
    const int n = p.unknown_count();
    const Eigen::VectorXd x0 = guess ? *guess : Eigen::VectorXd::Zero(n);
    if (x0.size() != n)
        throw InvalidArgument("initial guess has the wrong dimension");

    try
    {
        return solve_from(p, x0, opts);
    } catch (const NoConvergence& first)
    {
        spdlog::info("shooting failed from the initial guess ({}); trying {} seeded guesses",
                     first.what(), opts.fallback_guesses);
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        for (int attempt = 0; attempt < opts.fallback_guesses; ++attempt)
        {
            Eigen::VectorXd trial(n);
            for (int i = 0; i < n; ++i)
                trial[i] = uniform(rng);
            try
            {
                return solve_from(p, trial, opts);
            } catch (const NoConvergence& e)
            {
                spdlog::debug("seeded guess {} failed: {}", attempt, e.what());
            } catch (const GeoplanError& e)
            {
                spdlog::debug("seeded guess {} hit a numerical error: {}", attempt, e.what());
            }
        }
        throw;
    }
}

double equation_residual(const ShootingProblem& p, const Eigen::VectorXd& unknowns, int refine)
{
    ShootingProblem fine = p;
    fine.controls.record_every = 1;
    const std::vector<TrajectorySample> samples = simulate(fine, unknowns, refine);
    const RhsFunction rhs = make_rhs(fine);
    double worst = 0.0;
    // fourth-order central differences; near an obstacle eta_dot varies fast
    // enough that the three-point stencil error dominates
    for (std::size_t i = 2; i + 2 < samples.size(); ++i)
    {
        const double h = samples[i + 1].t - samples[i].t;
        const Vec3 fd = (samples[i - 2].eta_dot - 8.0 * samples[i - 1].eta_dot
                         + 8.0 * samples[i + 1].eta_dot - samples[i + 2].eta_dot)
                        / (12.0 * h);
        const ReducedState s{samples[i].h, samples[i].xi, samples[i].eta, samples[i].eta_dot};
        worst = std::max(worst, (fd - rhs(s).deta_dot).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace geoplan
