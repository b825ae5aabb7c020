#pragma once

#include <geoplan/so3.hpp>

namespace geoplan {

/**
 * Symmetric positive-definite inertia tensor J. Defines the left-invariant
 * metric <xi, eta> = xi^T J eta on so(3). Immutable after construction.
 */
class InertiaTensor
{
public:
    /// Identity inertia, i.e. the bi-invariant metric.
    InertiaTensor();

    /// Throws NotPositiveDefinite if j is not symmetric (1e-12) or not SPD.
    explicit InertiaTensor(const Mat3& j);

    static InertiaTensor identity() { return InertiaTensor(); }
    static InertiaTensor diagonal(const Vec3& principal);

    const Mat3& matrix() const { return j_; }
    const Mat3& inverse() const { return j_inv_; }

    bool is_identity() const { return j_.isIdentity(0.0); }

private:
    Mat3 j_;
    Mat3 j_inv_;
};

double inner_left(const InertiaTensor& j, const AlgebraVector& xi, const AlgebraVector& eta);

/// Euclidean product, the bi-invariant metric on so(3).
double inner_bi(const AlgebraVector& xi, const AlgebraVector& eta);

/// Metric adjoint of ad: J^{-1}(J eta x xi).
AlgebraVector ad_dagger(const InertiaTensor& j, const AlgebraVector& xi, const AlgebraVector& eta);

/// Algebra-level Levi-Civita connection
/// nabla_xi eta = ([xi, eta] - ad^dagger_xi eta - ad^dagger_eta xi) / 2.
AlgebraVector g_connection(const InertiaTensor& j,
                           const AlgebraVector& xi,
                           const AlgebraVector& eta);

/// R(eta, xi) sigma = nabla_eta nabla_xi sigma - nabla_xi nabla_eta sigma - nabla_[eta, xi] sigma.
AlgebraVector curvature(const InertiaTensor& j,
                        const AlgebraVector& eta,
                        const AlgebraVector& xi,
                        const AlgebraVector& sigma);

/// Map with <xi, eta>_bi = <beta(xi), eta>_left, i.e. J^{-1} xi.
AlgebraVector beta(const InertiaTensor& j, const AlgebraVector& xi);

} // namespace geoplan
