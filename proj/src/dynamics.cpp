#include <geoplan/dynamics.hpp>

namespace geoplan {

AlgebraVector total_gradient(std::span<const PlacedObstacle> obstacles,
                             const Rotation& h,
                             const InertiaTensor& j,
                             MetricMode mode)
{
    AlgebraVector sum = AlgebraVector::Zero();
    for (const auto& obstacle : obstacles)
    {
        if (obstacle.spec.tau == 0.0)
            continue;
        sum += reduced_gradient(obstacle.spec, obstacle.offset * h, j, mode);
    }
    return sum;
}

AlgebraVector rhs_geodesic(const InertiaTensor& j, const AlgebraVector& xi)
{
    return -g_connection(j, xi, xi);
}

AlgebraVector rhs_euler(const InertiaTensor& j, const AlgebraVector& omega)
{
    return j.inverse() * (j.matrix() * omega).cross(omega);
}

StateDerivative rhs_left_invariant(const InertiaTensor& j,
                                   std::span<const PlacedObstacle> obstacles,
                                   const ReducedState& s)
{
    const auto nabla = [&j](const AlgebraVector& a, const AlgebraVector& b) {
        return g_connection(j, a, b);
    };

    const AlgebraVector& xi = s.xi;
    const AlgebraVector& eta = s.eta;
    const AlgebraVector& eta_dot = s.eta_dot;
    const AlgebraVector drift = ad_dagger(j, xi, xi);

    StateDerivative d;
    d.dh = s.h.matrix() * hat(xi);
    d.dxi = eta + drift;
    d.deta = eta_dot;
    d.deta_dot = -(2.0 * nabla(xi, eta_dot) + nabla(eta, eta) + nabla(drift, eta)
                   + nabla(xi, nabla(xi, eta)) + curvature(j, eta, xi, xi)
                   + total_gradient(obstacles, s.h, j, MetricMode::LeftWithBiDistance));
    return d;
}

StateDerivative rhs_left_invariant(const InertiaTensor& j,
                                   const ObstacleSpec& spec,
                                   const ReducedState& s)
{
    const PlacedObstacle placed{spec, Rotation::identity()};
    return rhs_left_invariant(j, std::span(&placed, 1), s);
}

StateDerivative rhs_bi_invariant(std::span<const PlacedObstacle> obstacles, const ReducedState& s)
{
    StateDerivative d;
    d.dh = s.h.matrix() * hat(s.xi);
    d.dxi = s.eta;
    d.deta = s.eta_dot;
    d.deta_dot = -bracket(s.xi, s.eta_dot)
                 - total_gradient(obstacles, s.h, InertiaTensor::identity(), MetricMode::BiInvariant);
    return d;
}

StateDerivative rhs_bi_invariant(const ObstacleSpec& spec, const ReducedState& s)
{
    const PlacedObstacle placed{spec, Rotation::identity()};
    return rhs_bi_invariant(std::span(&placed, 1), s);
}

} // namespace geoplan
