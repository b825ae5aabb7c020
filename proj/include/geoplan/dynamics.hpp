#pragma once

#include <geoplan/metric.hpp>
#include <geoplan/potential.hpp>
#include <geoplan/so3.hpp>

#include <span>

namespace geoplan {

/**
 * First-order shooting state (h, xi, eta, eta_dot).
 *
 * h = g_ref^{-1} g is the pose relative to the reference obstacle pose.
 * For bi-invariant and sphere systems the slots hold (h, xi, xi', xi'').
 */
struct ReducedState
{
    Rotation h;
    AlgebraVector xi = AlgebraVector::Zero();
    AlgebraVector eta = AlgebraVector::Zero();
    AlgebraVector eta_dot = AlgebraVector::Zero();
};

struct StateDerivative
{
    Mat3 dh = Mat3::Zero();
    AlgebraVector dxi = AlgebraVector::Zero();
    AlgebraVector deta = AlgebraVector::Zero();
    AlgebraVector deta_dot = AlgebraVector::Zero();
};

/// Obstacle together with the fixed offset g0^{-1} g_ref, so that its
/// relative pose is offset * h.
struct PlacedObstacle
{
    ObstacleSpec spec;
    Rotation offset;
};

/// Sum of the gradient terms of all obstacles at relative pose h.
AlgebraVector total_gradient(std::span<const PlacedObstacle> obstacles,
                             const Rotation& h,
                             const InertiaTensor& j,
                             MetricMode mode);

/// Geodesic Euler-Poincare equation: xi' = -nabla_xi xi.
AlgebraVector rhs_geodesic(const InertiaTensor& j, const AlgebraVector& xi);

/// Euler's rigid body equation J Omega' = J Omega x Omega.
AlgebraVector rhs_euler(const InertiaTensor& j, const AlgebraVector& omega);

/// Modified cubic on SO(3) with a left-invariant metric and bi-invariant
/// obstacle distance.
StateDerivative rhs_left_invariant(const InertiaTensor& j,
                                   std::span<const PlacedObstacle> obstacles,
                                   const ReducedState& s);
StateDerivative rhs_left_invariant(const InertiaTensor& j,
                                   const ObstacleSpec& spec,
                                   const ReducedState& s);

/// Modified cubic on SO(3) with the bi-invariant metric:
/// xi''' + [xi, xi''] + grad = 0.
StateDerivative rhs_bi_invariant(std::span<const PlacedObstacle> obstacles, const ReducedState& s);
StateDerivative rhs_bi_invariant(const ObstacleSpec& spec, const ReducedState& s);

} // namespace geoplan
