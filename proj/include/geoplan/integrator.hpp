#pragma once

#include <geoplan/dynamics.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace geoplan {

using RhsFunction = std::function<StateDerivative(const ReducedState&)>;

/// Output record of an integrated trajectory.
struct TrajectorySample
{
    double t = 0.0;
    Rotation h;
    AlgebraVector xi = AlgebraVector::Zero();
    AlgebraVector eta = AlgebraVector::Zero();
    AlgebraVector eta_dot = AlgebraVector::Zero();
    std::optional<Vec3> q; ///< sphere point, S^2 runs only
    double dist = 0.0;     ///< distance to the nearest obstacle
    double v_pot = 0.0;    ///< total potential
};

/// Fills the derived fields (q, dist, v_pot) of a sample. The default
/// annotation sets dist = distance_to_obstacle(h) and v_pot = 0.
using SampleAnnotator = std::function<void(TrajectorySample&)>;

/// Classical RK4 on (h as 9 flat reals, xi, eta, eta_dot) followed by
/// re-orthonormalization of h. Throws NonFiniteState.
ReducedState rk4_step(const RhsFunction& rhs, const ReducedState& s, double dt);

/**
 * n_steps uniform RK4 steps over [a, b]. Samples are recorded at the start,
 * every record_every steps, and at the end. Errors raised by a step are
 * rethrown with the failing time attached.
 */
std::vector<TrajectorySample> integrate(const RhsFunction& rhs,
                                        const ReducedState& s0,
                                        double a,
                                        double b,
                                        int n_steps,
                                        int record_every = 1,
                                        const SampleAnnotator& annotate = {});

/// Endpoint only, without recording samples.
ReducedState integrate_endpoint(const RhsFunction& rhs,
                                const ReducedState& s0,
                                double a,
                                double b,
                                int n_steps);

} // namespace geoplan
