#pragma once

#include <Eigen/Dense>

namespace geoplan {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Element of so(3) identified with R^3 through the hat map.
using AlgebraVector = Vec3;

/// Default cutoff on tr(R) + 1 below which the logarithm is refused.
inline constexpr double kAntipodeEps = 1e-8;

/**
 * A 3x3 special orthogonal matrix.
 *
 * Constructed either through the validating factory from_matrix() or by the
 * group operations of this module, which preserve the invariants
 * (||R^T R - I||_F <= 1e-9, |det R - 1| <= 1e-9).
 */
class Rotation
{
public:
    Rotation()
        : m_(Mat3::Identity())
    {}

    static Rotation identity() { return Rotation(); }

    /// Validates the matrix and throws NotARotation on failure.
    static Rotation from_matrix(const Mat3& m);

    /// Wraps m without validation. Only for Runge-Kutta stage points, which
    /// leave the group by O(dt^2) and are never stored.
    static Rotation unchecked(const Mat3& m) { return Rotation(m, Trusted{}); }

    const Mat3& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    Rotation inverse() const { return Rotation(m_.transpose(), Trusted{}); }
    Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_, Trusted{}); }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }

private:
    struct Trusted
    {};
    Rotation(const Mat3& m, Trusted)
        : m_(m)
    {}

    friend Rotation exp_so3(const AlgebraVector& omega);
    friend Rotation orthonormalize(const Mat3& m);

    Mat3 m_;
};

/// Skew matrix with hat(v) * w = v x w.
Mat3 hat(const AlgebraVector& v);

/// Inverse of hat on the skew part. Throws NonSkewInput if ||M + M^T||_F > 1e-6.
AlgebraVector vee(const Mat3& m);

/// Lie bracket on so(3) under the hat isomorphism.
inline AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b) { return a.cross(b); }

/// Rodrigues exponential.
Rotation exp_so3(const AlgebraVector& omega);

/// Principal logarithm, ||log_so3(R)|| = rotation_angle(R).
/// Throws AntipodalSingularity when tr(R) <= -1 + eps_antipode.
AlgebraVector log_so3(const Rotation& r, double eps_antipode = kAntipodeEps);

/// phi(R) = arccos((tr R - 1) / 2) in [0, pi].
double rotation_angle(const Rotation& r);

/// Projects a near-orthogonal matrix back onto SO(3) with the iterative
/// polar correction M <- M (3I - M^T M) / 2.
/// Throws TooFarFromGroup when ||M^T M - I||_F >= 0.5 or det M < 0.
Rotation orthonormalize(const Mat3& m);

} // namespace geoplan
