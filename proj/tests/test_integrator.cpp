#include "helpers.hpp"

#include <geoplan/dynamics.hpp>
#include <geoplan/errors.hpp>
#include <geoplan/integrator.hpp>

#include <doctest.h>

#include <limits>

using namespace geoplan;
using testing::Random;

namespace {

StateDerivative zero_rhs(const ReducedState&)
{
    return {};
}

RhsFunction geodesic_rhs(const InertiaTensor& j)
{
    return [j](const ReducedState& s) {
        StateDerivative d;
        d.dh = s.h.matrix() * hat(s.xi);
        d.dxi = rhs_geodesic(j, s.xi);
        return d;
    };
}

} // namespace

TEST_CASE("zero right-hand side leaves the state unchanged")
{
    Random rnd;
    const ReducedState s{rnd.rotation(), rnd.vec(), rnd.vec(), rnd.vec()};
    const ReducedState n = rk4_step(zero_rhs, s, 0.1);
    CHECK((n.h.matrix() - s.h.matrix()).norm() < 1e-15);
    CHECK(n.xi == s.xi);
    CHECK(n.eta == s.eta);
    CHECK(n.eta_dot == s.eta_dot);
}

TEST_CASE("scalar exponential in one slot")
{
    const RhsFunction rhs = [](const ReducedState& s) {
        StateDerivative d;
        d.dxi.x() = s.xi.x();
        return d;
    };
    ReducedState s;
    s.xi.x() = 1.0;
    const ReducedState n = rk4_step(rhs, s, 0.1);
    CHECK(std::abs(n.xi.x() - std::exp(0.1)) < 1e-7);
}

TEST_CASE("one-parameter subgroup")
{
    const ReducedState s0{Rotation::identity(), Vec3(0, 0, 1), Vec3::Zero(), Vec3::Zero()};
    const auto samples = integrate(geodesic_rhs(InertiaTensor()), s0, 0.0, 1.0, 100);
    CHECK(samples.size() == 101);
    CHECK((samples.back().h.matrix() - exp_so3(Vec3(0, 0, 1)).matrix()).norm() < 1e-7);
    CHECK(samples.back().t == 1.0);
}

TEST_CASE("one step of integrate equals rk4_step")
{
    Random rnd;
    const InertiaTensor j = rnd.inertia();
    const ReducedState s0{rnd.rotation(), rnd.vec(), Vec3::Zero(), Vec3::Zero()};
    const auto samples = integrate(geodesic_rhs(j), s0, 0.0, 0.05, 1);
    const ReducedState one = rk4_step(geodesic_rhs(j), s0, 0.05);
    REQUIRE(samples.size() == 2);
    CHECK(samples[1].h.matrix() == one.h.matrix());
    CHECK(samples[1].xi == one.xi);
}

TEST_CASE("recording schedule")
{
    const ReducedState s0;
    CHECK(integrate(zero_rhs, s0, 0.0, 1.0, 10, 3).size() == 5); // 0, 3, 6, 9, 10
    CHECK(integrate(zero_rhs, s0, 0.0, 1.0, 10, 5).size() == 3);
    CHECK_THROWS_AS(integrate(zero_rhs, s0, 1.0, 1.0, 10), InvalidArgument);
    CHECK_THROWS_AS(integrate(zero_rhs, s0, 0.0, 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(rk4_step(zero_rhs, s0, 0.0), InvalidArgument);
}

TEST_CASE("Euler rigid body conserves energy and momentum")
{
    const InertiaTensor j = InertiaTensor::diagonal({1.0, 2.0, 3.0});
    const RhsFunction rhs = [&j](const ReducedState& s) {
        StateDerivative d;
        d.dh = s.h.matrix() * hat(s.xi);
        d.dxi = rhs_euler(j, s.xi);
        return d;
    };
    const ReducedState s0{Rotation::identity(), Vec3(0.3, 1.0, -0.5), Vec3::Zero(), Vec3::Zero()};
    const double e0 = s0.xi.dot(j.matrix() * s0.xi);
    const double m0 = (j.matrix() * s0.xi).squaredNorm();
    double worst_drift = 0.0;
    double worst_orth = 0.0;
    for (const auto& smp : integrate(rhs, s0, 0.0, 10.0, 10000))
    {
        worst_drift = std::max({worst_drift, std::abs(smp.xi.dot(j.matrix() * smp.xi) - e0),
                                std::abs((j.matrix() * smp.xi).squaredNorm() - m0)});
        worst_orth = std::max(worst_orth,
                              (smp.h.matrix().transpose() * smp.h.matrix() - Mat3::Identity()).norm());
    }
    CHECK(worst_drift < 1e-8);
    CHECK(worst_orth <= 1e-11);
}

TEST_CASE("self-convergence ratio of a smooth problem")
{
    const InertiaTensor j = InertiaTensor::diagonal({1.0, 2.0, 3.0});
    const ReducedState s0{Rotation::identity(), Vec3(0.3, 1.0, -0.5), Vec3::Zero(), Vec3::Zero()};
    auto endpoint = [&](int n) { return integrate_endpoint(geodesic_rhs(j), s0, 0.0, 2.0, n); };
    const ReducedState ref = endpoint(6400);
    auto err = [&](int n) {
        const ReducedState e = endpoint(n);
        return (e.h.matrix() - ref.h.matrix()).norm() + (e.xi - ref.xi).norm();
    };
    const double ratio = err(50) / err(100);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("non-finite right-hand sides are reported with their time")
{
    const RhsFunction rhs = [](const ReducedState& s) {
        StateDerivative d;
        d.dxi.x() = s.xi.x() > 1.55 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        return d;
    };
    try
    {
        integrate(rhs, ReducedState{}, 0.0, 3.0, 30);
        FAIL("expected NonFiniteState");
    } catch (const NonFiniteState& e)
    {
        REQUIRE(e.time().has_value());
        CHECK(*e.time() == doctest::Approx(1.5).epsilon(1e-12));
    }
}

TEST_CASE("integration is deterministic")
{
    Random rnd;
    const InertiaTensor j = rnd.inertia();
    const ReducedState s0{rnd.rotation(), rnd.vec(), Vec3::Zero(), Vec3::Zero()};
    const auto a = integrate(geodesic_rhs(j), s0, 0.0, 1.0, 200);
    const auto b = integrate(geodesic_rhs(j), s0, 0.0, 1.0, 200);
    CHECK(a.back().h.matrix() == b.back().h.matrix());
    CHECK(a.back().xi == b.back().xi);
}
