#include <geoplan/errors.hpp>
#include <geoplan/so3.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace geoplan {

namespace {

constexpr double kSmallAngle = 1e-4;
constexpr double kRotationTol = 1e-9;
constexpr double kSkewTol = 1e-6;

constexpr double kPolarTol = 1e-13;
constexpr int kPolarMaxIters = 20;

} // namespace

Rotation Rotation::from_matrix(const Mat3& m)
{
    if (!m.allFinite())
        throw NotARotation("matrix has non-finite entries");
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    if (ortho > kRotationTol)
        throw NotARotation("||R^T R - I||_F = " + std::to_string(ortho));
    const double det = m.determinant();
    if (std::abs(det - 1.0) > kRotationTol)
        throw NotARotation("det R = " + std::to_string(det));
    return Rotation(m, Trusted{});
}

Mat3 hat(const AlgebraVector& v)
{
    Mat3 k;
    // clang-format off
    k <<     0.0, -v.z(),  v.y(),
           v.z(),    0.0, -v.x(),
          -v.y(),  v.x(),    0.0;
    // clang-format on
    return k;
}

AlgebraVector vee(const Mat3& m)
{
    const double asym = (m + m.transpose()).norm();
    if (asym > kSkewTol)
        throw NonSkewInput("||M + M^T||_F = " + std::to_string(asym));
    const Mat3 skew = 0.5 * (m - m.transpose());
    return {skew(2, 1), skew(0, 2), skew(1, 0)};
}

Rotation exp_so3(const AlgebraVector& omega)
{
    const double theta2 = omega.squaredNorm();
    const double theta = std::sqrt(theta2);

    double a; // sin(theta) / theta
    double b; // (1 - cos(theta)) / theta^2
    if (theta < kSmallAngle)
    {
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else
    {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }

    const Mat3 k = hat(omega);
    return Rotation(Mat3::Identity() + a * k + b * k * k, Rotation::Trusted{});
}

double rotation_angle(const Rotation& r)
{
    const Mat3& m = r.matrix();
    const double cos_phi = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
    const Vec3 axis_sin(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    // atan2 form of arccos((tr R - 1)/2); keeps full precision near 0 and pi.
    return std::atan2(0.5 * axis_sin.norm(), cos_phi);
}

AlgebraVector log_so3(const Rotation& r, double eps_antipode)
{
    const Mat3& m = r.matrix();
    if (m.trace() <= -1.0 + eps_antipode)
        throw AntipodalSingularity("tr(R) + 1 = " + std::to_string(m.trace() + 1.0));

    const double phi = rotation_angle(r);
    const double phi_over_sin = phi < kSmallAngle ? 1.0 + phi * phi / 6.0 : phi / std::sin(phi);
    const Vec3 skew_vee(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    return 0.5 * phi_over_sin * skew_vee;
}

Rotation orthonormalize(const Mat3& m)
{
    if (!m.allFinite())
        throw TooFarFromGroup("matrix has non-finite entries");
    double defect = (m.transpose() * m - Mat3::Identity()).norm();
    if (defect >= 0.5)
        throw TooFarFromGroup("||M^T M - I||_F = " + std::to_string(defect));
    if (m.determinant() <= 0.0)
        throw TooFarFromGroup("det M <= 0");

    Mat3 x = m;
    for (int it = 0; it < kPolarMaxIters && defect >= kPolarTol; ++it)
    {
        x = 0.5 * x * (3.0 * Mat3::Identity() - x.transpose() * x);
        defect = (x.transpose() * x - Mat3::Identity()).norm();
    }
    return Rotation(x, Rotation::Trusted{});
}

} // namespace geoplan
