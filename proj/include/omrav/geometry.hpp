#pragma once

#include <Eigen/Dense>

namespace omrav {

class Rng;

/// World frame is right-handed with z up; positions in metres.
using Vec3 = Eigen::Vector3d;

inline constexpr double kGravity = 9.81;

/// A direction of Euclidean norm 1 (within 1e-9).
class UnitVec3 {
public:
  /// Wraps `v` without renormalizing. Throws DomainError if |v| is not 1.
  static UnitVec3 from_unit(const Vec3& v);

  double x() const noexcept { return v_.x(); }
  double y() const noexcept { return v_.y(); }
  double z() const noexcept { return v_.z(); }
  const Vec3& vec() const noexcept { return v_; }
  UnitVec3 operator-() const noexcept { return UnitVec3(-v_); }

private:
  friend UnitVec3 unit(const Vec3& v);
  explicit UnitVec3(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Normalizes `v`. Throws ZeroVector when |v| <= 1e-12.
UnitVec3 unit(const Vec3& v);

/// Angle in [0, pi] between two directions; the dot product is clipped to
/// [-1, 1] before arccos.
double angle_between(const UnitVec3& a, const UnitVec3& b) noexcept;

struct Link {
  UnitVec3 direction;
  double distance_m;
};

/// Direction and distance from `from` to `to`. Throws CoincidentPoints when
/// the points are within 1e-9 m.
Link link(const Vec3& from, const Vec3& to);

/// Body-to-world rotation, stored as an orthonormal matrix whose columns are
/// the body axes expressed in the world frame.
class Rotation {
public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws DomainError unless `m` is orthonormal with det +1 within 1e-9.
  static Rotation from_matrix(const Eigen::Matrix3d& m);

  /// Rotation by `angle_rad` about `axis` (right-hand rule).
  static Rotation from_axis_angle(const UnitVec3& axis, double angle_rad);

  /// Rotation whose body z-axis is exactly `axis`, with zero roll: the body
  /// x-axis is world x projected onto the plane normal to `axis` (world y when
  /// `axis` is parallel to world x).
  static Rotation aligning_z_to(const UnitVec3& axis);

  /// Uniformly distributed rotation (Shoemake's quaternion method).
  static Rotation random(Rng& rng);

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }

  Vec3 apply(const Vec3& v) const { return m_ * v; }
  Vec3 apply_inverse(const Vec3& v) const { return m_.transpose() * v; }
  UnitVec3 apply(const UnitVec3& v) const;

  /// Body z-axis in world coordinates.
  UnitVec3 z_axis() const { return UnitVec3::from_unit(m_.col(2)); }

  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }

  bool operator==(const Rotation& other) const { return m_ == other.m_; }

private:
  explicit Rotation(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Rotation orientation;

  /// Antenna axis is the body z-axis.
  UnitVec3 antenna_axis() const { return orientation.z_axis(); }
};

}  // namespace omrav
