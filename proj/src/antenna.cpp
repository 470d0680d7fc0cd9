#include "omrav/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "omrav/error.hpp"

namespace omrav {

namespace {

constexpr double kPi = std::numbers::pi;

// (cos(pi/2 cos t) / sin t)^2, evaluated as sin(pi/2 (1 - |c|)) / s with
// 1 - |c| = s^2 / (1 + |c|) so the ratio keeps full precision near the nulls.
double half_wave_shape(double c, double s) noexcept {
  if (s == 0.0) return 0.0;
  const double one_minus = s * s / (1.0 + std::abs(c));
  const double r = std::sin(0.5 * kPi * one_minus) / s;
  return r * r;
}

// 4*pi / integral of the unnormalized half-wave shape. Composite Simpson in
// theta; the shape is smooth on [0, pi] once the removable endpoints are 0.
double half_wave_peak() {
  static const double peak = [] {
    constexpr int n = 200000;
    const double h = kPi / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = i * h;
      const double s = std::sin(t);
      const double f = half_wave_shape(std::cos(t), s) * s;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * f;
    }
    const double integral = 2.0 * kPi * acc * h / 3.0;
    return 4.0 * kPi / integral;
  }();
  return peak;
}

// Integral over the sphere of max(g0 c^q, floor) on c >= 0 and floor on
// c < 0, divided by 2*pi.
double lobe_mass(double g0, double q, double floor) {
  const double c_star = floor > 0.0 ? std::min(1.0, std::pow(floor / g0, 1.0 / q)) : 0.0;
  return floor + floor * c_star + g0 * (1.0 - std::pow(c_star, q + 1.0)) / (q + 1.0);
}

double solve_lobe_peak(double q, double floor) {
  if (floor == 0.0) return 2.0 * (q + 1.0);
  // lobe_mass is increasing in g0; bracket then bisect to full precision.
  double lo = 1.0;
  double hi = 2.0 * (q + 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lobe_mass(mid, q, floor) < 2.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::Isotropic: return "isotropic";
    case PatternKind::ShortDipole: return "short_dipole";
    case PatternKind::HalfWaveDipole: return "half_wave_dipole";
    case PatternKind::AxialLobe: return "axial_lobe";
  }
  return "unknown";
}

PatternKind pattern_kind_from_string(std::string_view name) {
  for (auto k : {PatternKind::Isotropic, PatternKind::ShortDipole, PatternKind::HalfWaveDipole,
                 PatternKind::AxialLobe})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::ParseError, "unknown pattern kind '" + std::string(name) + "'");
}

RadiationPattern RadiationPattern::isotropic() { return {PatternKind::Isotropic, 0.0, 0.0, 1.0}; }

RadiationPattern RadiationPattern::short_dipole() {
  return {PatternKind::ShortDipole, 0.0, 0.0, 1.5};
}

RadiationPattern RadiationPattern::half_wave_dipole() {
  return {PatternKind::HalfWaveDipole, 0.0, 0.0, half_wave_peak()};
}

RadiationPattern RadiationPattern::axial_lobe(double q, double backlobe_floor) {
  if (!(q >= 1.0) || !std::isfinite(q))
    throw Error(ErrorKind::DomainError, "axial lobe exponent must be >= 1");
  if (!(backlobe_floor >= 0.0 && backlobe_floor < 1.0))
    throw Error(ErrorKind::DomainError, "axial lobe backlobe_floor must be in [0, 1)");
  return {PatternKind::AxialLobe, q, backlobe_floor, solve_lobe_peak(q, backlobe_floor)};
}

double RadiationPattern::gain(double theta_rad) const {
  if (!(theta_rad >= 0.0 && theta_rad <= kPi))
    throw Error(ErrorKind::DomainError, "off-axis angle outside [0, pi]");
  // sin(pi) is not exactly zero in floating point; pin the poles.
  const double s = (theta_rad == 0.0 || theta_rad == kPi) ? 0.0 : std::sin(theta_rad);
  return gain_cs(std::cos(theta_rad), s);
}

double RadiationPattern::gain_cs(double c, double s) const noexcept {
  switch (kind_) {
    case PatternKind::Isotropic:
      return 1.0;
    case PatternKind::ShortDipole:
      return 1.5 * s * s;
    case PatternKind::HalfWaveDipole:
      return peak_ * half_wave_shape(c, s);
    case PatternKind::AxialLobe:
      if (c <= 0.0) return floor_;
      return std::max(peak_ * std::pow(c, q_), floor_);
  }
  return 0.0;
}

double solid_angle_integral(const RadiationPattern& pattern, int theta_nodes) {
  const double h = kPi / theta_nodes;
  double acc = 0.0;
  for (int i = 0; i < theta_nodes; ++i) {
    const double t = (i + 0.5) * h;
    acc += pattern.gain(t) * std::sin(t);
  }
  return 2.0 * kPi * acc * h;
}

double gain_toward(const RadiationPattern& pattern, const Vec3& position, const UnitVec3& axis,
                   const Vec3& target) {
  const Link l = link(position, target);
  const double c = std::clamp(axis.vec().dot(l.direction.vec()), -1.0, 1.0);
  const double s = axis.vec().cross(l.direction.vec()).norm();
  return pattern.gain_cs(c, s);
}

double gain_toward(const RadiationPattern& pattern, const Pose& pose, const Vec3& target) {
  return gain_toward(pattern, pose.position, pose.antenna_axis(), target);
}

}  // namespace omrav
