#pragma once

#include <string_view>

#include "omrav/geometry.hpp"

namespace omrav {

enum class PatternKind { Isotropic, ShortDipole, HalfWaveDipole, AxialLobe };

std::string_view to_string(PatternKind kind) noexcept;
/// Accepts the config spellings "isotropic", "short_dipole",
/// "half_wave_dipole" and "axial_lobe". Throws ParseError otherwise.
PatternKind pattern_kind_from_string(std::string_view name);

/// Axisymmetric antenna gain about the body z-axis, normalized so that the
/// gain integrates to 4*pi over the sphere.
///
/// AxialLobe is max(G0 cos^q(theta), floor) in the forward hemisphere and
/// `floor` behind it; G0 is solved from the normalization.
class RadiationPattern {
public:
  static RadiationPattern isotropic();
  static RadiationPattern short_dipole();
  static RadiationPattern half_wave_dipole();
  /// Requires q >= 1 and floor in [0, 1); throws DomainError otherwise.
  static RadiationPattern axial_lobe(double q, double backlobe_floor);

  PatternKind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return q_; }
  double backlobe_floor() const noexcept { return floor_; }
  /// Maximum linear gain over the sphere.
  double peak_gain() const noexcept { return peak_; }

  /// Gain at off-axis angle theta in [0, pi]; DomainError outside.
  double gain(double theta_rad) const;

  /// Gain from the cosine and sine of the off-axis angle. Dipoles return an
  /// exact 0 when `sin_theta` is 0, which keeps steered nulls exact.
  double gain_cs(double cos_theta, double sin_theta) const noexcept;

  /// Returns true for patterns with gain(theta) == gain(pi - theta).
  bool is_mirror_symmetric() const noexcept { return kind_ != PatternKind::AxialLobe; }

  bool operator==(const RadiationPattern&) const = default;

private:
  RadiationPattern(PatternKind kind, double q, double floor, double peak)
      : kind_(kind), q_(q), floor_(floor), peak_(peak) {}

  PatternKind kind_;
  double q_ = 0.0;
  double floor_ = 0.0;
  double peak_ = 1.0;
};

/// Solid-angle integral of the gain by midpoint quadrature in theta
/// (azimuthal symmetry integrates phi exactly).
double solid_angle_integral(const RadiationPattern& pattern, int theta_nodes = 20000);

/// Gain of an antenna at `pose` in the direction of `target`.
/// Throws CoincidentPoints when target is at the antenna position.
double gain_toward(const RadiationPattern& pattern, const Pose& pose, const Vec3& target);

/// Same, for a bare world-frame antenna axis.
double gain_toward(const RadiationPattern& pattern, const Vec3& position, const UnitVec3& axis,
                   const Vec3& target);

}  // namespace omrav
