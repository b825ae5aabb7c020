#include <geoplan/errors.hpp>
#include <geoplan/integrator.hpp>

#include <string>

namespace geoplan {

namespace {

/// Unconstrained Euclidean image of ReducedState used inside a step.
struct FlatState
{
    Mat3 h;
    Vec3 xi, eta, eta_dot;
};

FlatState axpy(const FlatState& s, double c, const StateDerivative& d)
{
    return {s.h + c * d.dh, s.xi + c * d.dxi, s.eta + c * d.deta, s.eta_dot + c * d.deta_dot};
}

ReducedState stage_state(const FlatState& f)
{
    // Stage points stay in the ambient 9-dimensional space; projecting them
    // would cost two orders of accuracy.
    return {Rotation::unchecked(f.h), f.xi, f.eta, f.eta_dot};
}

void check_finite(const StateDerivative& d)
{
    if (!d.dh.allFinite() || !d.dxi.allFinite() || !d.deta.allFinite() || !d.deta_dot.allFinite())
        throw NonFiniteState("right-hand side produced non-finite values");
}

void default_annotation(TrajectorySample& sample)
{
    sample.dist = distance_to_obstacle(sample.h);
    sample.v_pot = 0.0;
}

TrajectorySample make_sample(double t, const ReducedState& s, const SampleAnnotator& annotate)
{
    TrajectorySample sample;
    sample.t = t;
    sample.h = s.h;
    sample.xi = s.xi;
    sample.eta = s.eta;
    sample.eta_dot = s.eta_dot;
    if (annotate)
        annotate(sample);
    else
        default_annotation(sample);
    return sample;
}

void validate_span(double a, double b, int n_steps)
{
    if (!(b > a) || n_steps < 1)
        throw InvalidArgument("integration needs b > a and n_steps >= 1");
}

} // namespace

ReducedState rk4_step(const RhsFunction& rhs, const ReducedState& s, double dt)
{
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");

    const FlatState y{s.h.matrix(), s.xi, s.eta, s.eta_dot};

    const StateDerivative k1 = rhs(s);
    check_finite(k1);
    const StateDerivative k2 = rhs(stage_state(axpy(y, 0.5 * dt, k1)));
    check_finite(k2);
    const StateDerivative k3 = rhs(stage_state(axpy(y, 0.5 * dt, k2)));
    check_finite(k3);
    const StateDerivative k4 = rhs(stage_state(axpy(y, dt, k3)));
    check_finite(k4);

    const double w = dt / 6.0;
    FlatState next = y;
    next.h += w * (k1.dh + 2.0 * k2.dh + 2.0 * k3.dh + k4.dh);
    next.xi += w * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
    next.eta += w * (k1.deta + 2.0 * k2.deta + 2.0 * k3.deta + k4.deta);
    next.eta_dot += w * (k1.deta_dot + 2.0 * k2.deta_dot + 2.0 * k3.deta_dot + k4.deta_dot);

    if (!next.h.allFinite() || !next.xi.allFinite() || !next.eta.allFinite()
        || !next.eta_dot.allFinite())
        throw NonFiniteState("step produced non-finite state");

    return {orthonormalize(next.h), next.xi, next.eta, next.eta_dot};
}

std::vector<TrajectorySample> integrate(const RhsFunction& rhs,
                                        const ReducedState& s0,
                                        double a,
                                        double b,
                                        int n_steps,
                                        int record_every,
                                        const SampleAnnotator& annotate)
{
    validate_span(a, b, n_steps);
    if (record_every < 1)
        record_every = 1;

    const double dt = (b - a) / n_steps;
    std::vector<TrajectorySample> samples;
    samples.reserve(static_cast<std::size_t>(n_steps / record_every + 2));
    samples.push_back(make_sample(a, s0, annotate));

    ReducedState s = s0;
    for (int i = 1; i <= n_steps; ++i)
    {
        const double t = a + (i - 1) * dt;
        try
        {
            s = rk4_step(rhs, s, dt);
        } catch (GeoplanError& e)
        {
            e.set_time(t);
            throw;
        }
        if (i % record_every == 0 || i == n_steps)
            samples.push_back(make_sample(i == n_steps ? b : a + i * dt, s, annotate));
    }
    return samples;
}

ReducedState integrate_endpoint(const RhsFunction& rhs,
                                const ReducedState& s0,
                                double a,
                                double b,
                                int n_steps)
{
    validate_span(a, b, n_steps);
    const double dt = (b - a) / n_steps;
    ReducedState s = s0;
    for (int i = 0; i < n_steps; ++i)
    {
        try
        {
            s = rk4_step(rhs, s, dt);
        } catch (GeoplanError& e)
        {
            e.set_time(a + i * dt);
            throw;
        }
    }
    return s;
}

} // namespace geoplan
