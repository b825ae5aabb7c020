#include <geoplan/errors.hpp>
#include <geoplan/sphere.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace geoplan {

namespace {

constexpr double kHorizontalTol = 1e-12;
constexpr int kFiberGrid = 64;
constexpr double kGoldenTol = 1e-10;
constexpr double kFdStep = 1e-6;

void require_horizontal(const AlgebraVector& v, const char* name)
{
    if (!v.allFinite() || std::abs(v.z()) > kHorizontalTol)
        throw NotHorizontal(std::string(name) + " has vertical component "
                            + std::to_string(v.z()));
}

/// rotation_angle(H Rz(alpha)) without forming the product; only the first
/// two columns of H mix with alpha.
struct FiberProfile
{
    explicit FiberProfile(const Rotation& h)
        : m(h.matrix())
    {}

    double operator()(double alpha) const
    {
        const double c = std::cos(alpha), s = std::sin(alpha);
        const Vec3 c0 = c * m.col(0) + s * m.col(1);
        const Vec3 c1 = c * m.col(1) - s * m.col(0);
        const Vec3& c2 = m.col(2);
        const double tr = c0.x() + c1.y() + c2.z();
        const Vec3 axis_sin(c1.z() - c2.y(), c2.x() - c0.z(), c0.y() - c1.x());
        return std::atan2(0.5 * axis_sin.norm(), std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
    }

    Mat3 m;
};

double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0)
        a += two_pi;
    return a - std::numbers::pi;
}

} // namespace

SpherePoint::SpherePoint(const Vec3& q)
    : q_(q)
{
    if (!q.allFinite() || std::abs(q.norm() - 1.0) > 1e-9)
        throw NotOnSphere("||q|| must be 1 within 1e-9");
}

SphereBoundary::SphereBoundary(const SpherePoint& point, const Vec3& velocity)
    : q(point)
    , v(velocity)
{
    if (!velocity.allFinite() || std::abs(point.vector().dot(velocity)) > 1e-9)
        throw NotOnSphere("boundary velocity is not tangent to the sphere");
}

AlgebraVector project_horizontal(const AlgebraVector& xi)
{
    return {xi.x(), xi.y(), 0.0};
}

AlgebraVector project_vertical(const AlgebraVector& xi)
{
    return {0.0, 0.0, xi.z()};
}

AlgebraVector h_connection(const AlgebraVector& xi, const AlgebraVector& eta)
{
    require_horizontal(xi, "xi");
    require_horizontal(eta, "eta");
    return 0.5 * project_horizontal(bracket(xi, eta));
}

AlgebraVector q_tilde(const AlgebraVector& xi, const AlgebraVector& eta, const AlgebraVector& sigma)
{
    require_horizontal(xi, "xi");
    require_horizontal(eta, "eta");
    require_horizontal(sigma, "sigma");
    const AlgebraVector sum = project_horizontal(bracket(sigma, bracket(xi, eta)))
                              - bracket(xi, project_vertical(bracket(eta, sigma)))
                              + bracket(eta, project_vertical(bracket(xi, sigma)))
                              + 2.0 * bracket(sigma, project_vertical(bracket(xi, eta)));
    return 0.25 * sum;
}

FiberMinimum theta_fiber_search(const Rotation& h)
{
    constexpr double pi = std::numbers::pi;
    constexpr double step = 2.0 * pi / kFiberGrid;

    const FiberProfile fiber_angle(h);
    std::array<double, kFiberGrid> values{};
    for (int i = 0; i < kFiberGrid; ++i)
        values[i] = fiber_angle(-pi + i * step);

    int best = 0;
    for (int i = 1; i < kFiberGrid; ++i)
        if (values[i] < values[best])
            best = i;

    for (int i = 0; i < kFiberGrid; ++i)
    {
        const double prev = values[(i + kFiberGrid - 1) % kFiberGrid];
        const double next = values[(i + 1) % kFiberGrid];
        const bool local_min = values[i] <= prev && values[i] <= next;
        const int gap = std::abs(i - best);
        const double separation = std::min(gap, kFiberGrid - gap) * step;
        if (local_min && separation > 0.1 && values[i] - values[best] < 1e-6)
            throw FiberDegenerate("fiber distance has competing minima at alpha = "
                                  + std::to_string(-pi + best * step) + " and "
                                  + std::to_string(-pi + i * step));
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -pi + (best - 1) * step;
    double hi = -pi + (best + 1) * step;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = fiber_angle(x1);
    double f2 = fiber_angle(x2);
    while (hi - lo > kGoldenTol)
    {
        if (f1 <= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = fiber_angle(x1);
        } else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = fiber_angle(x2);
        }
    }

    FiberMinimum result;
    result.alpha = wrap_angle(0.5 * (lo + hi));
    result.rotation = h * exp_so3(Vec3(0.0, 0.0, result.alpha));
    result.distance = rotation_angle(result.rotation);
    return result;
}

Rotation theta_fiber(const Rotation& h)
{
    return theta_fiber_search(h).rotation;
}

SpherePoint project_sphere(const Rotation& r)
{
    return SpherePoint(r.matrix().col(2));
}

Rotation lift_point(const SpherePoint& q, const std::optional<Vec3>& antipode_hint)
{
    const Vec3 e3 = Vec3::UnitZ();
    const Vec3& p = q.vector();
    if ((p + e3).norm() <= 1e-9)
    {
        if (!antipode_hint)
            throw AntipodalLiftAmbiguity("q = -e3 requires an antipode hint axis");
        const Vec3 axis = project_horizontal(*antipode_hint);
        if (axis.norm() < 1e-12)
            throw AntipodalLiftAmbiguity("antipode hint must have a horizontal component");
        return exp_so3(std::numbers::pi * axis.normalized());
    }
    const Vec3 axis = e3.cross(p);
    const double s = axis.norm();
    if (s < 1e-300)
        return Rotation::identity();
    return exp_so3(std::atan2(s, e3.dot(p)) / s * axis);
}

std::pair<Rotation, AlgebraVector> lift_boundary(const SphereBoundary& b,
                                                 const std::optional<Vec3>& antipode_hint)
{
    const Rotation r = lift_point(b.q, antipode_hint);
    const AlgebraVector omega = Vec3::UnitZ().cross(r.inverse() * b.v);
    return {r, omega};
}

double sphere_obstacle_distance(const Rotation& h, SpherePotentialMode mode)
{
    return mode == SpherePotentialMode::Local ? rotation_angle(h) : theta_fiber_search(h).distance;
}

AlgebraVector sphere_gradient(std::span<const PlacedObstacle> obstacles,
                              const Rotation& h,
                              SpherePotentialMode mode)
{
    AlgebraVector sum = AlgebraVector::Zero();
    for (const auto& obstacle : obstacles)
    {
        if (obstacle.spec.tau == 0.0)
            continue;
        const Rotation rel = obstacle.offset * h;
        if (mode == SpherePotentialMode::Local)
        {
            sum += reduced_gradient(obstacle.spec, rel, InertiaTensor::identity(),
                                    MetricMode::BiInvariant);
            continue;
        }
        // No closed form for the derivative of theta: central differences
        // along the body directions.
        for (int k = 0; k < 3; ++k)
        {
            const Vec3 dir = kFdStep * Vec3::Unit(k);
            const double plus = potential_of_distance(
                obstacle.spec, theta_fiber_search(rel * exp_so3(dir)).distance);
            const double minus = potential_of_distance(
                obstacle.spec, theta_fiber_search(rel * exp_so3(-dir)).distance);
            sum[k] += (plus - minus) / (2.0 * kFdStep);
        }
    }
    return project_horizontal(sum);
}

StateDerivative rhs_sphere(std::span<const PlacedObstacle> obstacles,
                           const ReducedState& s,
                           SpherePotentialMode mode)
{
    require_horizontal(s.xi, "Omega");
    require_horizontal(s.eta, "Omega'");
    require_horizontal(s.eta_dot, "Omega''");

    StateDerivative d;
    d.dh = s.h.matrix() * hat(s.xi);
    d.dxi = s.eta;
    d.deta = s.eta_dot;
    d.deta_dot = project_horizontal(-s.xi.cross(s.eta.cross(s.xi))
                                    - sphere_gradient(obstacles, s.h, mode));
    return d;
}

StateDerivative rhs_sphere(const ObstacleSpec& spec,
                           const ReducedState& s,
                           SpherePotentialMode mode)
{
    const PlacedObstacle placed{spec, Rotation::identity()};
    return rhs_sphere(std::span(&placed, 1), s, mode);
}

} // namespace geoplan
