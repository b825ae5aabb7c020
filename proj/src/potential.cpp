#include <geoplan/errors.hpp>
#include <geoplan/potential.hpp>

#include <cmath>
#include <string>

namespace geoplan {

void ObstacleSpec::validate() const
{
    if (!std::isfinite(tau) || tau < 0.0)
        throw InvalidObstacle("tau must be finite and >= 0, got " + std::to_string(tau));
    if (!std::isfinite(d_scale) || d_scale <= 0.0)
        throw InvalidObstacle("d_scale must be finite and > 0, got " + std::to_string(d_scale));
    if (n_exp < 1)
        throw InvalidObstacle("n_exp must be >= 1, got " + std::to_string(n_exp));
    if (q0 && std::abs(q0->norm() - 1.0) > 1e-12)
        throw InvalidObstacle("q0 must be a unit vector");
}

double distance_to_obstacle(const Rotation& h)
{
    return rotation_angle(h);
}

double potential_of_distance(const ObstacleSpec& spec, double distance)
{
    const double ratio = std::pow(distance / spec.d_scale, 2 * spec.n_exp);
    return spec.tau / (1.0 + ratio);
}

double potential_value(const ObstacleSpec& spec, const Rotation& h)
{
    return potential_of_distance(spec, distance_to_obstacle(h));
}

double potential_slope(const ObstacleSpec& spec, double distance)
{
    const int two_n = 2 * spec.n_exp;
    const double denom = 1.0 + std::pow(distance / spec.d_scale, two_n);
    return -two_n * spec.tau * std::pow(distance, two_n - 1)
           / (std::pow(spec.d_scale, two_n) * denom * denom);
}

AlgebraVector reduced_gradient(const ObstacleSpec& spec,
                               const Rotation& h,
                               const InertiaTensor& j,
                               MetricMode mode)
{
    if (spec.tau == 0.0)
        return AlgebraVector::Zero();

    // grad V = V'(phi) Log(H) / phi; the phi^{2N-1} / phi quotient is folded
    // into the prefactor so the N = 1 limit at H = I stays finite.
    const AlgebraVector log_h = log_so3(h);
    const double phi = log_h.norm();
    const int two_n = 2 * spec.n_exp;
    const double denom = 1.0 + std::pow(phi / spec.d_scale, two_n);
    const double prefactor = two_n * spec.tau * std::pow(phi, two_n - 2)
                             / (std::pow(spec.d_scale, two_n) * denom * denom);
    const AlgebraVector grad = -prefactor * log_h;

    return mode == MetricMode::LeftWithBiDistance ? beta(j, grad) : grad;
}

AlgebraVector reduced_gradient(const ObstacleSpec& spec, const Rotation& h, const InertiaTensor& j)
{
    return reduced_gradient(spec, h, j, spec.metric_mode);
}

} // namespace geoplan
