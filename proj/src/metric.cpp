#include <geoplan/errors.hpp>
#include <geoplan/metric.hpp>

#include <string>

namespace geoplan {

InertiaTensor::InertiaTensor()
    : j_(Mat3::Identity())
    , j_inv_(Mat3::Identity())
{}

InertiaTensor::InertiaTensor(const Mat3& j)
    : j_(j)
{
    if (!j.allFinite())
        throw NotPositiveDefinite("inertia has non-finite entries");
    const double asym = (j - j.transpose()).norm();
    if (asym > 1e-12)
        throw NotPositiveDefinite("inertia is not symmetric, ||J - J^T||_F = "
                                  + std::to_string(asym));
    const Eigen::LLT<Mat3> llt(j);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("Cholesky factorization failed");
    j_inv_ = llt.solve(Mat3::Identity());
    j_inv_ = 0.5 * (j_inv_ + j_inv_.transpose()).eval();
    const double defect = (j_ * j_inv_ - Mat3::Identity()).norm();
    if (defect > 1e-10)
        throw NotPositiveDefinite("inertia is too ill-conditioned, ||J J^-1 - I||_F = "
                                  + std::to_string(defect));
}

InertiaTensor InertiaTensor::diagonal(const Vec3& principal)
{
    return InertiaTensor(Mat3(principal.asDiagonal()));
}

double inner_left(const InertiaTensor& j, const AlgebraVector& xi, const AlgebraVector& eta)
{
    return xi.dot(j.matrix() * eta);
}

double inner_bi(const AlgebraVector& xi, const AlgebraVector& eta)
{
    return xi.dot(eta);
}

AlgebraVector ad_dagger(const InertiaTensor& j, const AlgebraVector& xi, const AlgebraVector& eta)
{
    return j.inverse() * (j.matrix() * eta).cross(xi);
}

AlgebraVector g_connection(const InertiaTensor& j,
                           const AlgebraVector& xi,
                           const AlgebraVector& eta)
{
    return 0.5 * (bracket(xi, eta) - ad_dagger(j, xi, eta) - ad_dagger(j, eta, xi));
}

AlgebraVector curvature(const InertiaTensor& j,
                        const AlgebraVector& eta,
                        const AlgebraVector& xi,
                        const AlgebraVector& sigma)
{
    return g_connection(j, eta, g_connection(j, xi, sigma))
           - g_connection(j, xi, g_connection(j, eta, sigma))
           - g_connection(j, bracket(eta, xi), sigma);
}

AlgebraVector beta(const InertiaTensor& j, const AlgebraVector& xi)
{
    return j.inverse() * xi;
}

} // namespace geoplan
