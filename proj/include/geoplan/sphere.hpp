#pragma once

#include <geoplan/dynamics.hpp>
#include <geoplan/so3.hpp>

#include <optional>
#include <span>
#include <utility>

namespace geoplan {

// S^2 = SO(3)/SO(2) with projection pi(R) = R e3. The isotropy algebra is
// span{e3} (vertical), its orthogonal complement span{e1, e2} is horizontal.

/// Unit vector in R^3; ||q|| = 1 within 1e-9.
class SpherePoint
{
public:
    /// Throws NotOnSphere.
    explicit SpherePoint(const Vec3& q);

    const Vec3& vector() const { return q_; }

private:
    Vec3 q_;
};

/// Point on the sphere with a tangent velocity (|q . v| <= 1e-9).
struct SphereBoundary
{
    SphereBoundary(const SpherePoint& point, const Vec3& velocity);

    SpherePoint q;
    Vec3 v;
};

/// How the obstacle distance on the sphere is measured.
enum class SpherePotentialMode
{
    /// Distance on SO(3) between the lifted pose and the obstacle lift.
    Local,
    /// Quotient distance through the fiber-optimal representative theta.
    ExactTheta,
};

AlgebraVector project_horizontal(const AlgebraVector& xi);
AlgebraVector project_vertical(const AlgebraVector& xi);

/// Horizontal connection (1/2) H([xi, eta]); identically zero on S^2.
/// Throws NotHorizontal.
AlgebraVector h_connection(const AlgebraVector& xi, const AlgebraVector& eta);

/// Curvature-like tensor Q~(xi, eta) sigma of the horizontal connection for
/// a bi-invariant metric on G. Throws NotHorizontal.
AlgebraVector q_tilde(const AlgebraVector& xi, const AlgebraVector& eta, const AlgebraVector& sigma);

struct FiberMinimum
{
    Rotation rotation; ///< H exp(alpha e3)
    double alpha = 0.0;
    double distance = 0.0; ///< rotation_angle(rotation)
};

/// Minimizes rotation_angle(H exp(alpha e3)) over alpha in [-pi, pi):
/// 64-point grid followed by golden-section refinement.
/// Throws FiberDegenerate when two well-separated grid minima tie.
FiberMinimum theta_fiber_search(const Rotation& h);

Rotation theta_fiber(const Rotation& h);

SpherePoint project_sphere(const Rotation& r);

/// Rotation taking e3 to q along the great-circle arc. For q = -e3 the
/// horizontal hint axis u gives exp(pi u); without a hint
/// AntipodalLiftAmbiguity is thrown.
Rotation lift_point(const SpherePoint& q, const std::optional<Vec3>& antipode_hint);

/// Horizontal lift of boundary data: R e3 = q and R hat(Omega) e3 = v with
/// Omega horizontal.
std::pair<Rotation, AlgebraVector> lift_boundary(const SphereBoundary& b,
                                                 const std::optional<Vec3>& antipode_hint);

/// Obstacle distance seen by the potential for relative pose h.
double sphere_obstacle_distance(const Rotation& h, SpherePotentialMode mode);

/// Horizontal gradient term added by the sphere equations.
AlgebraVector sphere_gradient(std::span<const PlacedObstacle> obstacles,
                              const Rotation& h,
                              SpherePotentialMode mode);

/// Symmetric-space reduced dynamics on the horizontal lift:
/// Omega''' + Omega x (Omega' x Omega) + H(grad) = 0, H' = H hat(Omega).
StateDerivative rhs_sphere(std::span<const PlacedObstacle> obstacles,
                           const ReducedState& s,
                           SpherePotentialMode mode = SpherePotentialMode::Local);
StateDerivative rhs_sphere(const ObstacleSpec& spec,
                           const ReducedState& s,
                           SpherePotentialMode mode = SpherePotentialMode::Local);

} // namespace geoplan
