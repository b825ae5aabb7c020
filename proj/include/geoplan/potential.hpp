#pragma once

#include <geoplan/metric.hpp>
#include <geoplan/so3.hpp>

#include <optional>

namespace geoplan {

/// Metric pairing used to turn dV into a body-frame vector.
enum class MetricMode
{
    /// Gradient taken w.r.t. the bi-invariant metric, returned as-is.
    BiInvariant,
    /// Left-invariant dynamics with bi-invariant distance: gradient composed with beta = J^{-1}.
    LeftWithBiDistance,
};

/**
 * Point obstacle with the potential V = tau / (1 + (d / D)^{2N}).
 *
 * The distance d is the bi-invariant distance between the agent and g0.
 * On the sphere, q0 records the obstacle point and g0 is a lift of it.
 */
struct ObstacleSpec
{
    Rotation g0;
    std::optional<Vec3> q0;
    double tau = 50.0;
    double d_scale = 0.2;
    int n_exp = 2;
    MetricMode metric_mode = MetricMode::BiInvariant;

    /// Throws InvalidObstacle when an invariant is violated.
    void validate() const;
};

/// d_bi(g, g0) expressed through H = g0^{-1} g.
double distance_to_obstacle(const Rotation& h);

/// V as a function of the distance alone.
double potential_of_distance(const ObstacleSpec& spec, double distance);

double potential_value(const ObstacleSpec& spec, const Rotation& h);

/// dV/dd as a function of the distance; negative for d > 0.
double potential_slope(const ObstacleSpec& spec, double distance);

/**
 * Body-frame gradient of the potential at H, i.e. the vector g with
 * d/de V(H exp(e w)) = <g, w>_bi. This is the exact term the reduced
 * equations add to their left-hand side.
 *
 * In LeftWithBiDistance mode the result is beta(g) = J^{-1} g, so that
 * <result, w>_left is the directional derivative.
 *
 * Throws AntipodalSingularity near tr(H) = -1.
 */
AlgebraVector reduced_gradient(const ObstacleSpec& spec,
                               const Rotation& h,
                               const InertiaTensor& j,
                               MetricMode mode);

/// Same as above with the mode taken from the spec.
AlgebraVector reduced_gradient(const ObstacleSpec& spec, const Rotation& h, const InertiaTensor& j);

} // namespace geoplan
