#pragma once

#include <geoplan/metric.hpp>
#include <geoplan/so3.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace testing {

using geoplan::InertiaTensor;
using geoplan::Mat3;
using geoplan::Rotation;
using geoplan::Vec3;

class Random
{
public:
    explicit Random(std::uint64_t seed = 12345)
        : rng_(seed)
    {}

    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    Vec3 vec() { return {uniform(), uniform(), uniform()}; }
    Vec3 horizontal() { return {uniform(), uniform(), 0.0}; }

    Vec3 unit()
    {
        Vec3 v;
        do
            v = vec();
        while (v.norm() < 1e-3 || v.norm() > 1.0);
        return v.normalized();
    }

    Mat3 matrix()
    {
        Mat3 m;
        for (int i = 0; i < 9; ++i)
            m(i / 3, i % 3) = uniform();
        return m;
    }

    /// J = A^T A + 0.1 I
    InertiaTensor inertia()
    {
        const Mat3 a = matrix();
        Mat3 j = a.transpose() * a + 0.1 * Mat3::Identity();
        j = 0.5 * (j + j.transpose());
        return InertiaTensor(j);
    }

    /// Rotation by an angle uniform in [lo, hi] about a random axis, built
    /// from the Rodrigues formula directly.
    Rotation rotation(double lo = 0.0, double hi = 3.0)
    {
        return Rotation::from_matrix(rodrigues(unit(), uniform(lo, hi)));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;

public:
    static Mat3 rodrigues(const Vec3& axis, double angle)
    {
        Mat3 k;
        k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
        return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
    }
};

inline Mat3 rz(double a)
{
    Mat3 m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return m;
}

/// Orthogonal polar factor through an SVD.
inline Mat3 polar_svd(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

inline double max_abs(const Vec3& v)
{
    return v.cwiseAbs().maxCoeff();
}

} // namespace testing
