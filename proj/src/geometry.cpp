#include "omrav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "omrav/error.hpp"
#include "omrav/random.hpp"

namespace omrav {

UnitVec3 UnitVec3::from_unit(const Vec3& v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "vector (" << v.x() << ", " << v.y() << ", " << v.z() << ") is not unit";
    throw Error(ErrorKind::DomainError, os.str());
  }
  return UnitVec3(v);
}

UnitVec3 unit(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 1e-12)) throw Error(ErrorKind::ZeroVector, "cannot normalize a zero vector");
  return UnitVec3(v / n);
}

double angle_between(const UnitVec3& a, const UnitVec3& b) noexcept {
  return std::acos(std::clamp(a.vec().dot(b.vec()), -1.0, 1.0));
}

Link link(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double dist = d.norm();
  if (!(dist > 1e-9)) throw Error(ErrorKind::CoincidentPoints, "link endpoints coincide");
  return Link{unit(d), dist};
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  const double ortho = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!m.allFinite() || ortho > 1e-9 || std::abs(m.determinant() - 1.0) > 1e-9)
    throw Error(ErrorKind::DomainError, "matrix is not a proper rotation");
  return Rotation(m);
}

Rotation Rotation::from_axis_angle(const UnitVec3& axis, double angle_rad) {
  return Rotation(Eigen::AngleAxisd(angle_rad, axis.vec()).toRotationMatrix());
}

Rotation Rotation::aligning_z_to(const UnitVec3& axis) {
  const Vec3& a = axis.vec();
  Vec3 ref = Vec3::UnitX();
  if (std::abs(a.x()) > 1.0 - 1e-12) ref = Vec3::UnitY();
  const Vec3 bx = (ref - ref.dot(a) * a).normalized();
  const Vec3 by = a.cross(bx);
  Eigen::Matrix3d m;
  m.col(0) = bx;
  m.col(1) = by;
  m.col(2) = a;
  return Rotation(m);
}

Rotation Rotation::random(Rng& rng) {
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(two_pi * u3), a * std::sin(two_pi * u2),
                       a * std::cos(two_pi * u2), b * std::sin(two_pi * u3));
  q.normalize();
  return Rotation(q.toRotationMatrix());
}

UnitVec3 Rotation::apply(const UnitVec3& v) const {
  return UnitVec3::from_unit(m_ * v.vec());
}

}  // namespace omrav
