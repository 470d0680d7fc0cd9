#include "omrav/netscene.hpp"

#include <cmath>
#include <string>

#include "omrav/error.hpp"

namespace omrav {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::ValidationError, what);
}

void validate_box(const SearchBox& b, const char* name) {
  require(b.x_min < b.x_max && b.y_min < b.y_max && b.z_min <= b.z_max,
          (std::string(name) + ": box is degenerate").c_str());
  require(b.z_min > 0.0, (std::string(name) + ": altitude z_min must be positive").c_str());
}

void validate_radio(const RadioParams& r) {
  require(r.carrier_hz > 0.0 && std::isfinite(r.carrier_hz), "carrier: must be positive");
  require(r.noise_power_w > 0.0 && std::isfinite(r.noise_power_w), "noise_power: must be positive");
  require(r.min_distance_m >= 0.0, "min_distance: must be non-negative");
}

// Isotropic ground terminal.
Terminal ground(const GroundNode& n) {
  return Terminal{Pose{n.position, Rotation{}}, RadiationPattern::isotropic()};
}

}  // namespace

bool SearchBox::contains(const Vec3& p, double tol) const noexcept {
  return p.x() >= x_min - tol && p.x() <= x_max + tol && p.y() >= y_min - tol &&
         p.y() <= y_max + tol && p.z() >= z_min - tol && p.z() <= z_max + tol;
}

void ScenarioA::validate() const {
  require((users[0].position - users[1].position).norm() > 1e-9, "users: must be distinct");
  for (const auto& u : users) require(u.tx_power_w >= 0.0, "users: power must be non-negative");
  require(jammer.tx_power_w >= 0.0, "jammer: power must be non-negative");
  validate_box(box, "search_box");
  validate_radio(radio);
}

void ScenarioB::validate() const {
  require(!eavesdroppers.empty(), "eavesdroppers: at least one required");
  for (const auto& e : eavesdroppers)
    require((e.position - legit_user.position).norm() > 1e-9,
            "eavesdroppers: must be distinct from the user");
  require(p_max_w > 0.0 && std::isfinite(p_max_w), "p_max: must be positive");
  validate_box(comm_box, "comm_box");
  validate_box(jam_box, "jam_box");
  validate_radio(radio);
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::OptimumPose: return "optimum_pose";
    case Strategy::MaxGain: return "max_gain";
    case Strategy::ZeroInterference: return "zero_interference";
    case Strategy::VerticalFixed: return "vertical_fixed";
  }
  return "unknown";
}

double min_sinr_objective(const ScenarioA& s, const Pose& pose) {
  if (!s.box.contains(pose.position))
    throw Error(ErrorKind::OutOfBox, "UAV pose outside the search box");
  const Terminal uav{pose, s.uav_pattern};
  const double jam_w = received_power(ground(s.jammer), s.jammer.tx_power_w, uav, s.radio);
  const double interference[] = {jam_w};
  double worst = 0.0;
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const double sig = received_power(ground(s.users[i]), s.users[i].tx_power_w, uav, s.radio);
    const double v = sinr(sig, interference, s.radio.noise_power_w);
    if (i == 0 || v < worst) worst = v;
  }
  return to_db(worst);
}

Vec3 canonical_sign(const Vec3& v) noexcept {
  if (v.z() != 0.0) return v.z() > 0.0 ? v : Vec3(-v);
  if (v.x() != 0.0) return v.x() > 0.0 ? v : Vec3(-v);
  return v.y() >= 0.0 ? v : Vec3(-v);
}

Rotation orient_max_gain(const ScenarioA& s, const Vec3& position) {
  const Vec3 d1 = link(position, s.users[0].position).direction.vec();
  const Vec3 d2 = link(position, s.users[1].position).direction.vec();
  Vec3 n = d1.cross(d2);
  if (n.norm() <= 1e-12) {
    // Collinear users: any axis normal to d1 puts both on the dipole ring.
    n = Vec3::UnitZ() - d1.z() * d1;
    if (n.norm() <= 1e-12) n = Vec3::UnitX() - d1.x() * d1;
  }
  return Rotation::aligning_z_to(unit(canonical_sign(n)));
}

Rotation orient_zero_interference(const ScenarioA& s, const Vec3& position) {
  return Rotation::aligning_z_to(link(position, s.jammer.position).direction);
}

Rotation orient_vertical() noexcept { return Rotation::identity(); }

Rotation orient_for(Strategy strategy, const ScenarioA& s, const Vec3& position) {
  switch (strategy) {
    case Strategy::MaxGain: return orient_max_gain(s, position);
    case Strategy::ZeroInterference: return orient_zero_interference(s, position);
    case Strategy::VerticalFixed: return orient_vertical();
    case Strategy::OptimumPose: break;
  }
  throw Error(ErrorKind::DomainError, "optimum_pose has no closed-form orientation");
}

double secrecy_objective(const ScenarioB& s, const Pose& comm_pose, const Pose& jam_pose,
                         double p_comm_w, double p_jam_w) {
  if (!s.comm_box.contains(comm_pose.position))
    throw Error(ErrorKind::OutOfBox, "communicating UAV outside its box");
  if (!s.jam_box.contains(jam_pose.position))
    throw Error(ErrorKind::OutOfBox, "jamming UAV outside its box");
  if (!(p_comm_w >= 0.0 && p_comm_w <= s.p_max_w) || !(p_jam_w >= 0.0 && p_jam_w <= s.p_max_w))
    throw Error(ErrorKind::PowerOutOfRange, "transmit power outside [0, p_max]");

  const Terminal comm{comm_pose, s.comm_pattern};
  const Terminal jam{jam_pose, s.jam_pattern};
  const double noise = s.radio.noise_power_w;

  auto sinr_at = [&](const GroundNode& node) {
    const Terminal rx = ground(node);
    const double sig = received_power(comm, p_comm_w, rx, s.radio);
    const double interference[] = {received_power(jam, p_jam_w, rx, s.radio)};
    return sinr(sig, interference, noise);
  };

  const double legit = sinr_at(s.legit_user);
  std::vector<double> eaves;
  eaves.reserve(s.eavesdroppers.size());
  for (const auto& e : s.eavesdroppers) eaves.push_back(sinr_at(e));
  return secrecy_rate(legit, eaves);
}

std::pair<Rotation, Rotation> proposed_orientation_rule(const ScenarioB& s, const Vec3& comm_pos,
                                                        const Vec3& jam_pos) {
  const UnitVec3 comm_axis = link(comm_pos, s.legit_user.position).direction;
  const UnitVec3 jam_axis = link(jam_pos, s.legit_user.position).direction;
  return {Rotation::aligning_z_to(comm_axis), Rotation::aligning_z_to(jam_axis)};
}

}  // namespace omrav
