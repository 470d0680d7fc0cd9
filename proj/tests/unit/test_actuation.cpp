#include <cmath>
#include <numbers>

#include "doctest.h"
#include "omrav/actuation.hpp"
#include "omrav/error.hpp"
#include "omrav/random.hpp"

using namespace omrav;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Thrust direction by Rodrigues' formula applied to body z.
Vec3 rodrigues_z(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  const Vec3 z(0, 0, 1);
  return z * std::cos(angle) + k.cross(z) * std::sin(angle) + k * k.dot(z) * (1 - std::cos(angle));
}

// Wrench of thrusts f summed rotor by rotor.
Eigen::Matrix<double, 6, 1> direct_wrench(const RotorConfig& c, const Eigen::VectorXd& f) {
  Eigen::Matrix<double, 6, 1> w = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t i = 0; i < c.rotors.size(); ++i) {
    const Rotor& r = c.rotors[i];
    const Vec3 u = rodrigues_z(r.tilt_axis, r.tilt_angle_rad);
    w.head<3>() += u * f[i];
    w.tail<3>() += (r.position_m.cross(u) + r.spin * r.drag_coeff_m * u) * f[i];
  }
  return w;
}

Eigen::Matrix<double, 6, 1> gravity_wrench(const RotorConfig& c, const Rotation& q) {
  Eigen::Matrix<double, 6, 1> w = Eigen::Matrix<double, 6, 1>::Zero();
  w.head<3>() = q.matrix().transpose() * Vec3(0, 0, c.mass_kg * kGravity);
  return w;
}

RotorConfig random_config(Rng& rng, int n) {
  RotorConfig c;
  c.name = "random";
  c.mass_kg = 2.0;
  for (int i = 0; i < n; ++i) {
    Rotor r;
    r.position_m = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    r.tilt_axis = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
    r.tilt_angle_rad = rng.uniform(-kPi, kPi);
    r.spin = rng.uniform01() < 0.5 ? 1 : -1;
    r.f_lo_n = -5;
    r.f_hi_n = 5;
    r.drag_coeff_m = rng.uniform(0, 0.05);
    c.rotors.push_back(r);
  }
  return c;
}

}  // namespace

TEST_SUITE("actuation") {

TEST_CASE("thrust direction") {
  Rotor r;
  r.tilt_axis = Vec3::UnitX();
  r.tilt_angle_rad = 0.0;
  CHECK(thrust_direction(r).vec() == Vec3(0, 0, 1));
  r.tilt_angle_rad = kPi / 2;
  CHECK(thrust_direction(r).vec().isApprox(Vec3(0, -1, 0)));
  for (double a : {0.1, 0.6, 1.2, 2.5}) {
    r.tilt_angle_rad = a;
    CHECK(thrust_direction(r).vec().isApprox(Vec3(0, -std::sin(a), std::cos(a)), 1e-12));
  }
}

TEST_CASE("planar quad allocation structure") {
  const RotorConfig q = planar_quad();
  const Eigen::MatrixXd a = allocation_matrix(q);
  REQUIRE(a.rows() == 6);
  REQUIRE(a.cols() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(a(0, i) == Approx(0.0).scale(1.0));
    CHECK(a(1, i) == Approx(0.0).scale(1.0));
    CHECK(a(2, i) == 1.0);
    CHECK(std::abs(a(5, i)) == Approx(q.rotors[i].drag_coeff_m));
  }
  CHECK((a * Eigen::VectorXd::Zero(4)).isZero());
}

TEST_CASE("allocation matrix matches direct summation") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const RotorConfig c = random_config(rng, 3 + t % 6);
    Eigen::VectorXd f(c.rotors.size());
    for (auto& v : f) v = rng.uniform(-5, 5);
    CHECK((allocation_matrix(c) * f - direct_wrench(c, f)).norm() < 1e-12);
  }
}

TEST_CASE("planar quad hover at identity shares the weight evenly") {
  const RotorConfig q = planar_quad();
  const auto s = hover_thrusts(q, Rotation{});
  REQUIRE(s);
  for (int i = 0; i < 4; ++i) CHECK(s->thrusts_n[i] == Approx(q.mass_kg * kGravity / 4));
  CHECK(efficiency(q, s->thrusts_n) == Approx(1.0));
}

TEST_CASE("planar quad cannot hover rolled") {
  const RotorConfig q = planar_quad();
  const Rotation roll = Rotation::from_axis_angle(unit(Vec3(1, 0, 0)), 30 * kDeg);
  CHECK_FALSE(hover_thrusts(q, roll).has_value());
  // failures only shrink the feasible set
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<bool> failed(4, false);
    failed[k] = true;
    CHECK_FALSE(hover_thrusts(q, roll, failed).has_value());
  }
}

TEST_CASE("tilted cube hovers at sampled orientations") {
  const RotorConfig c = tilted_cube(35 * kDeg);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Rotation q = Rotation::random(rng);
    const auto s = hover_thrusts(c, q);
    REQUIRE(s);
    CHECK((direct_wrench(c, s->thrusts_n) - gravity_wrench(c, q)).norm() <= 1e-6);
    for (std::size_t k = 0; k < c.rotors.size(); ++k) {
      CHECK(s->thrusts_n[k] >= c.rotors[k].f_lo_n - 1e-12);
      CHECK(s->thrusts_n[k] <= c.rotors[k].f_hi_n + 1e-12);
    }
    CHECK(s->margin() > 0.0);
  }
}

TEST_CASE("hover thrusts minimize the peak load") {
  // any other feasible allocation has peak load >= the reported one
  const RotorConfig c = tilted_cube(35 * kDeg);
  const auto s = hover_thrusts(c, Rotation{});
  REQUIRE(s);
  const Eigen::MatrixXd a = allocation_matrix(c);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd null = lu.kernel();
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    Eigen::VectorXd z(null.cols());
    for (auto& v : z) v = rng.uniform(-1, 1);
    const Eigen::VectorXd f = s->thrusts_n + 0.5 * null * z;
    CHECK(f.cwiseAbs().maxCoeff() / c.rotors[0].f_hi_n >= s->max_normalized - 1e-9);
  }
}

TEST_CASE("efficiency") {
  RotorConfig pair;
  pair.name = "pair";
  Rotor up;
  up.f_lo_n = -1;
  Rotor down = up;
  down.tilt_angle_rad = kPi;
  pair.rotors = {up, down};
  Eigen::VectorXd f(2);
  f << 1, 1;
  CHECK(efficiency(pair, f) == Approx(0.0).scale(1.0));
  f << 0, 0;
  try {
    efficiency(pair, f);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroThrust);
  }
  const RotorConfig c = tilted_cube(35 * kDeg);
  const auto s = hover_thrusts(c, Rotation{});
  REQUIRE(s);
  const double e = efficiency(c, s->thrusts_n);
  CHECK(e > 0.0);
  CHECK(e < 1.0);
  CHECK(e < efficiency(planar_quad(), hover_thrusts(planar_quad(), Rotation{})->thrusts_n));
}

TEST_CASE("capability classification") {
  const auto quad = classify(planar_quad(), 100, 1);
  CHECK(quad.static_hover);
  CHECK_FALSE(quad.omnidirectional_hover);
  const auto cube = classify(tilted_cube(35 * kDeg), 100, 1);
  CHECK(cube.static_hover);
  CHECK(cube.omnidirectional_hover);
  REQUIRE(cube.worst_margin);
  CHECK(*cube.worst_margin > 0.0);
  REQUIRE(cube.per_rotor_failure_hover.size() == 8);
  for (bool ok : cube.per_rotor_failure_hover) CHECK(ok);
  REQUIRE(cube.mean_efficiency);
  CHECK(*cube.mean_efficiency < 1.0);
  CHECK_THROWS_AS(classify(planar_quad(), 5, 1), Error);
}

TEST_CASE("single-rotor failures at identity are feasible for the cube") {
  const RotorConfig c = tilted_cube(35 * kDeg);
  for (std::size_t k = 0; k < 8; ++k) {
    std::vector<bool> failed(8, false);
    failed[k] = true;
    const auto s = hover_thrusts(c, Rotation{}, failed);
    REQUIRE(s);
    CHECK(s->thrusts_n[k] == 0.0);
    CHECK((direct_wrench(c, s->thrusts_n) - gravity_wrench(c, Rotation{})).norm() <= 1e-6);
  }
}

TEST_CASE("tilt sweep") {
  const RotorConfig tmpl = tilted_cube(0.0);
  const auto a = tilt_sweep(tmpl, 0.0, 90 * kDeg, 19, 50, 3);
  const auto b = tilt_sweep(tmpl, 0.0, 90 * kDeg, 19, 50, 3);
  REQUIRE(a.curve.size() == 19);
  CHECK_FALSE(a.curve.front().worst_margin.has_value());
  REQUIRE(a.best_alpha_rad);
  CHECK(*a.best_alpha_rad > 0.0);
  CHECK(*a.best_alpha_rad < 90 * kDeg);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].alpha_rad == b.curve[i].alpha_rad);
    CHECK(a.curve[i].worst_margin == b.curve[i].worst_margin);
    if (a.curve[i].alpha_rad == *a.best_alpha_rad) CHECK(*a.curve[i].worst_margin > 0.0);
  }
  CHECK(with_tilt(tmpl, 0.3).rotors[5].tilt_angle_rad == 0.3);
}

TEST_CASE("config validation") {
  RotorConfig c = planar_quad();
  c.rotors[0].f_lo_n = 10.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = planar_quad();
  c.mass_kg = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = planar_quad();
  c.rotors[0].spin = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

}
