#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "omrav/antenna.hpp"
#include "omrav/channel.hpp"
#include "omrav/geometry.hpp"

namespace omrav {

enum class NodeRole { User, Jammer, Eavesdropper };

/// Ground terminal with an isotropic antenna.
struct GroundNode {
  Vec3 position = Vec3::Zero();
  NodeRole role = NodeRole::User;
  double tx_power_w = 0.0;

  bool operator==(const GroundNode&) const = default;
};

/// Axis-aligned region a UAV may occupy. The z range is the altitude band.
struct SearchBox {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double z_min = 0.0, z_max = 0.0;

  bool contains(const Vec3& p, double tol = 1e-9) const noexcept;
  Vec3 lower() const { return {x_min, y_min, z_min}; }
  Vec3 upper() const { return {x_max, y_max, z_max}; }

  bool operator==(const SearchBox&) const = default;
};

/// One UAV receiving two orthogonal uplinks while a ground jammer transmits.
struct ScenarioA {
  std::array<GroundNode, 2> users;
  GroundNode jammer;
  RadiationPattern uav_pattern = RadiationPattern::half_wave_dipole();
  SearchBox box;
  RadioParams radio;

  /// Throws ValidationError naming the violated constraint.
  void validate() const;
  bool operator==(const ScenarioA&) const = default;
};

/// Downlink from a communicating UAV, protected by a jamming UAV, against
/// one or more passive eavesdroppers.
struct ScenarioB {
  GroundNode legit_user;
  std::vector<GroundNode> eavesdroppers;
  RadiationPattern comm_pattern = RadiationPattern::axial_lobe(4.0, 0.01);
  RadiationPattern jam_pattern = RadiationPattern::half_wave_dipole();
  SearchBox comm_box;
  SearchBox jam_box;
  double p_max_w = 1.0;
  RadioParams radio;

  void validate() const;
  bool operator==(const ScenarioB&) const = default;
};

enum class Strategy { OptimumPose, MaxGain, ZeroInterference, VerticalFixed };
inline constexpr std::array<Strategy, 4> kAllStrategies = {
    Strategy::OptimumPose, Strategy::MaxGain, Strategy::ZeroInterference, Strategy::VerticalFixed};
std::string_view to_string(Strategy s) noexcept;

struct StrategyOutcome {
  std::vector<Pose> poses;
  std::vector<double> powers_w;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Minimum over both users of the uplink SINR at the UAV, in dB.
/// Throws OutOfBox when the pose leaves the search box.
double min_sinr_objective(const ScenarioA& s, const Pose& pose);

/// Axis normal to both user links (both users at theta = pi/2). The sign is
/// canonical: positive z, then positive x, then positive y. Collinear users
/// fall back to world z (or x) projected normal to the first link.
Rotation orient_max_gain(const ScenarioA& s, const Vec3& position);

/// Axis along the link to the jammer, so a dipole null faces it.
Rotation orient_zero_interference(const ScenarioA& s, const Vec3& position);

/// Identity: antenna axis is world z.
Rotation orient_vertical() noexcept;

/// Rotation a strategy applies at `position`. OptimumPose has no rule and
/// throws DomainError.
Rotation orient_for(Strategy strategy, const ScenarioA& s, const Vec3& position);

/// Secrecy rate of the legitimate downlink in bits/s/Hz.
/// Throws OutOfBox or PowerOutOfRange for infeasible arguments.
double secrecy_objective(const ScenarioB& s, const Pose& comm_pose, const Pose& jam_pose,
                         double p_comm_w, double p_jam_w);

/// Jammer null and communicator boresight both aimed at the legitimate user.
/// Returns (comm orientation, jam orientation).
std::pair<Rotation, Rotation> proposed_orientation_rule(const ScenarioB& s, const Vec3& comm_pos,
                                                        const Vec3& jam_pos);

/// Canonical representative of +/- v: positive z, ties to +x then +y.
Vec3 canonical_sign(const Vec3& v) noexcept;

}  // namespace omrav
