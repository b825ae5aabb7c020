#include <geoplan/check.hpp>
#include <geoplan/dynamics.hpp>
#include <geoplan/errors.hpp>
#include <geoplan/integrator.hpp>
#include <geoplan/sphere.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace geoplan {

namespace {

class Sampler
{
public:
    explicit Sampler(std::uint64_t seed)
        : rng_(seed)
    {}

    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    Vec3 vec() { return {uniform(), uniform(), uniform()}; }

    Vec3 horizontal() { return {uniform(), uniform(), 0.0}; }

    InertiaTensor inertia()
    {
        Mat3 a;
        for (int i = 0; i < 9; ++i)
            a(i / 3, i % 3) = uniform();
        Mat3 j = a.transpose() * a + 0.1 * Mat3::Identity();
        j = 0.5 * (j + j.transpose());
        return InertiaTensor(j);
    }

    /// Rotation with angle in [lo, hi] about a uniformly random axis.
    Rotation rotation(double lo, double hi)
    {
        Vec3 axis;
        do
            axis = vec();
        while (axis.norm() < 1e-3 || axis.norm() > 1.0);
        return exp_so3(uniform(lo, hi) * axis.normalized());
    }

    ReducedState state()
    {
        return {rotation(0.0, 3.0), vec(), vec(), vec()};
    }

private:
    std::mt19937_64 rng_;
};

CheckResult run(const std::string& name, int cases, double tol, const std::function<double()>& one)
{
    CheckResult r{name, cases, 0.0, tol, false};
    try
    {
        for (int i = 0; i < cases; ++i)
            r.worst = std::max(r.worst, one());
        r.passed = r.worst <= tol;
    } catch (const GeoplanError&)
    {
        r.worst = std::numeric_limits<double>::infinity();
    }
    return r;
}

double state_gap(const StateDerivative& a, const StateDerivative& b)
{
    return std::max({(a.dh - b.dh).cwiseAbs().maxCoeff(), (a.dxi - b.dxi).cwiseAbs().maxCoeff(),
                     (a.deta - b.deta).cwiseAbs().maxCoeff(),
                     (a.deta_dot - b.deta_dot).cwiseAbs().maxCoeff()});
}

/// Relative error of the reduced gradient against central differences of V.
double gradient_error(Sampler& rnd, MetricMode mode)
{
    ObstacleSpec spec;
    spec.tau = 1.0 + 49.0 * 0.5 * (rnd.uniform() + 1.0);
    spec.d_scale = 0.5;
    const InertiaTensor j = rnd.inertia();
    const Rotation h = rnd.rotation(0.1, 2.8);
    const AlgebraVector g = reduced_gradient(spec, h, j, mode);
    const Vec3 pairing = mode == MetricMode::LeftWithBiDistance ? Vec3(j.matrix() * g) : g;
    constexpr double eps = 1e-6;
    Vec3 fd;
    for (int k = 0; k < 3; ++k)
    {
        const Vec3 d = eps * Vec3::Unit(k);
        fd[k] = (potential_value(spec, h * exp_so3(d)) - potential_value(spec, h * exp_so3(-d)))
                / (2.0 * eps);
    }
    return (pairing - fd).norm() / std::max(fd.norm(), 1e-12);
}

} // namespace

std::vector<CheckResult> run_identity_checks(std::uint64_t seed)
{
    Sampler rnd(seed);
    std::vector<CheckResult> out;

    out.push_back(run("exp/log roundtrip", 1000, 1e-9, [&] {
        Vec3 w;
        do
            w = std::numbers::pi * rnd.vec();
        while (w.norm() > std::numbers::pi - 0.1);
        return (log_so3(exp_so3(w)) - w).norm();
    }));

    out.push_back(run("hat/vee inverse", 1000, 1e-15, [&] {
        const Vec3 v = rnd.vec();
        return (vee(hat(v)) - v).norm();
    }));

    out.push_back(run("connection torsion-free", 1000, 1e-12, [&] {
        const InertiaTensor j = rnd.inertia();
        const Vec3 a = rnd.vec(), b = rnd.vec();
        return (g_connection(j, a, b) - g_connection(j, b, a) - bracket(a, b)).norm();
    }));

    out.push_back(run("connection metric compatibility", 1000, 1e-12, [&] {
        const InertiaTensor j = rnd.inertia();
        const Vec3 a = rnd.vec(), b = rnd.vec(), c = rnd.vec();
        return std::abs(inner_left(j, g_connection(j, c, a), b)
                        + inner_left(j, a, g_connection(j, c, b)));
    }));

    out.push_back(run("bi-invariant connection is half bracket", 1000, 1e-15, [&] {
        const Vec3 a = rnd.vec(), b = rnd.vec();
        return (g_connection(InertiaTensor::identity(), a, b) - 0.5 * bracket(a, b)).norm();
    }));

    out.push_back(run("curvature Bianchi identity", 1000, 1e-11, [&] {
        const InertiaTensor j = rnd.inertia();
        const Vec3 a = rnd.vec(), b = rnd.vec(), c = rnd.vec();
        return (curvature(j, a, b, c) + curvature(j, b, c, a) + curvature(j, c, a, b)).norm();
    }));

    out.push_back(run("left-invariant equation at J = I", 1000, 1e-12, [&] {
        ObstacleSpec spec;
        spec.tau = 10.0;
        const ReducedState s = rnd.state();
        return state_gap(rhs_left_invariant(InertiaTensor::identity(), spec, s),
                         rhs_bi_invariant(spec, s));
    }));

    out.push_back(run("potential gradient (bi-invariant)", 500, 1e-5,
                      [&] { return gradient_error(rnd, MetricMode::BiInvariant); }));
    out.push_back(run("potential gradient (mixed)", 500, 1e-5,
                      [&] { return gradient_error(rnd, MetricMode::LeftWithBiDistance); }));

    out.push_back(run("sphere sectional curvature", 1000, 1e-12, [&] {
        const Vec3 x = rnd.horizontal(), y = rnd.horizontal();
        const double expected = x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2);
        return std::abs(q_tilde(x, y, y).dot(x) - expected);
    }));

    out.push_back(run("fiber distance equals sphere distance", 500, 1e-6, [&] {
        const Rotation h = rnd.rotation(0.0, 3.0);
        const double exact = std::acos(std::clamp(h(2, 2), -1.0, 1.0));
        return std::abs(theta_fiber_search(h).distance - exact);
    }));

    out.push_back(run("Euler equation invariants", 5, 1e-8, [&] {
        const InertiaTensor j = InertiaTensor::diagonal({1.0, 2.0, 3.0});
        const Vec3 w0 = rnd.vec();
        const RhsFunction rhs = [&j](const ReducedState& s) {
            StateDerivative d;
            d.dh = s.h.matrix() * hat(s.xi);
            d.dxi = rhs_euler(j, s.xi);
            return d;
        };
        const ReducedState end = integrate_endpoint(rhs, {Rotation(), w0, {}, {}}, 0.0, 1.0, 1000);
        const double energy = std::abs(end.xi.dot(j.matrix() * end.xi) - w0.dot(j.matrix() * w0));
        const double momentum
            = std::abs((j.matrix() * end.xi).squaredNorm() - (j.matrix() * w0).squaredNorm());
        return std::max(energy, momentum);
    }));

    return out;
}

} // namespace geoplan
