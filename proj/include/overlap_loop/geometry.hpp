#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "overlap_loop/errors.hpp"

namespace overlap_loop {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Rigid transform as a 4x4 homogeneous matrix. Row-major semantics in file
/// formats; Eigen storage order is an internal detail.
struct Pose {
  Mat4 matrix = Mat4::Identity();

  Pose() = default;
  explicit Pose(const Mat4& m) : matrix(m) {}

  Mat3 rotation() const { return matrix.block<3, 3>(0, 0); }
  Vec3 translation() const { return matrix.block<3, 1>(0, 3); }

  Pose inverse() const {
    const Mat3 rt = rotation().transpose();
    Mat4 inv = Mat4::Identity();
    inv.block<3, 3>(0, 0) = rt;
    inv.block<3, 1>(0, 3) = -rt * translation();
    return Pose(inv);
  }

  Pose operator*(const Pose& other) const { return Pose(matrix * other.matrix); }

  Vec3 apply(const Vec3& p) const { return rotation() * p + translation(); }

  bool is_valid(double tol = 1e-6) const {
    if ((matrix.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() > tol)
      return false;
    const Mat3 r = rotation();
    if ((r * r.transpose() - Mat3::Identity()).norm() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
  }

  void validate(double tol = 1e-6) const {
    if (!is_valid(tol))
      throw ValidationError("pose is not a rigid transform");
  }
};

inline Pose make_pose(const Mat3& r, const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = r;
  m.block<3, 1>(0, 3) = t;
  return Pose(m);
}

inline Mat3 rot_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

inline Pose pose_rot_z(double rad) { return make_pose(rot_z(rad), Vec3::Zero()); }

inline Pose pose_translation(const Vec3& t) {
  return make_pose(Mat3::Identity(), t);
}

/// Heading angle of a rotation, in radians in (-pi, pi].
inline double yaw_of(const Mat3& r) { return std::atan2(r(1, 0), r(0, 0)); }

}  // namespace overlap_loop
