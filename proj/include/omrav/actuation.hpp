#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "omrav/geometry.hpp"

namespace omrav {

/// A propeller with a fixed tilt about a body-frame axis. Thrust is signed:
/// bi-directional rotors have f_lo = -f_hi, uni-directional ones f_lo = 0.
struct Rotor {
  Vec3 position_m = Vec3::Zero();  // body frame, from the CoM
  Vec3 tilt_axis = Vec3::UnitX();  // body frame, unit
  double tilt_angle_rad = 0.0;
  int spin = 1;                    // +1 or -1
  double f_lo_n = 0.0;
  double f_hi_n = 1.0;
  double drag_coeff_m = 0.0;       // torque-to-thrust ratio

  bool operator==(const Rotor&) const = default;
};

struct RotorConfig {
  std::string name;
  std::vector<Rotor> rotors;
  double mass_kg = 1.0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const RotorConfig&) const = default;
};

struct Wrench {
  Vec3 force_n = Vec3::Zero();
  Vec3 torque_nm = Vec3::Zero();

  Eigen::Matrix<double, 6, 1> stacked() const;
};

/// Body z rotated about the tilt axis by the tilt angle.
UnitVec3 thrust_direction(const Rotor& r);

/// 6 x n map from rotor thrusts to body wrench; column i is
/// [u_i ; r_i x u_i + spin_i * c_i * u_i].
Eigen::MatrixXd allocation_matrix(const RotorConfig& c);

/// Body wrench that holds the vehicle still at `orientation`: the force
/// cancels gravity and the torque is zero.
Wrench hover_wrench(const RotorConfig& c, const Rotation& orientation);

struct HoverSolution {
  Eigen::VectorXd thrusts_n;
  double max_normalized = 0.0;  // max_i |f_i| / f_hi_i
  double residual = 0.0;        // ||A f - w||

  double margin() const noexcept { return 1.0 - max_normalized; }
};

/// Bounded thrusts producing the hover wrench with the smallest peak
/// normalized thrust, or nullopt when no bounded solution exists. Rotors
/// flagged in `failed` are forced to zero thrust.
std::optional<HoverSolution> hover_thrusts(const RotorConfig& c, const Rotation& orientation,
                                           const std::vector<bool>& failed = {});

/// |sum u_i f_i| / sum |f_i|. Throws ZeroThrust when every f_i is zero.
double efficiency(const RotorConfig& c, const Eigen::VectorXd& thrusts_n);

struct CapabilityReport {
  std::string name;
  bool static_hover = false;
  bool omnidirectional_hover = false;
  std::optional<double> worst_margin;  // over orientation samples, when all feasible
  std::vector<bool> per_rotor_failure_hover;
  std::optional<double> mean_efficiency;  // over feasible orientation samples
  int orientation_samples = 0;
};

/// Requires orientation_samples >= 10.
CapabilityReport classify(const RotorConfig& c, int orientation_samples, std::uint64_t seed);

struct TiltPoint {
  double alpha_rad = 0.0;
  std::optional<double> worst_margin;  // nullopt: infeasible at some sample
};

struct TiltSweepResult {
  std::optional<double> best_alpha_rad;
  std::vector<TiltPoint> curve;
};

/// Copy of `c` with every rotor's tilt angle set to `alpha_rad`.
RotorConfig with_tilt(const RotorConfig& c, double alpha_rad);

/// Worst-case hover margin across seeded orientations for `steps` tilt angles
/// evenly spaced over [alpha_lo, alpha_hi]; ties favour the smaller angle.
TiltSweepResult tilt_sweep(const RotorConfig& tmpl, double alpha_lo_rad, double alpha_hi_rad,
                           int steps, int orientation_samples, std::uint64_t seed);

/// Untilted uni-directional quadrotor in "+" layout with alternating spins.
RotorConfig planar_quad(double arm_m = 0.25, double f_hi_n = 8.0, double mass_kg = 1.5,
                        double drag_coeff_m = 0.016);

/// Eight bi-directional rotors on the vertices of a cube. Each tilts by
/// `alpha_rad` about its radial horizontal direction, outward on the top
/// layer and inward on the bottom layer.
RotorConfig tilted_cube(double alpha_rad, double half_edge_m = 0.25, double f_hi_n = 17.0,
                        double mass_kg = 3.5, double drag_coeff_m = 0.016);

}  // namespace omrav
