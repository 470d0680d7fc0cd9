#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "omrav/channel.hpp"
#include "omrav/error.hpp"
#include "oracles.hpp"

using namespace omrav;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
Terminal iso(const Vec3& p) { return {Pose{p, Rotation{}}, RadiationPattern::isotropic()}; }
}  // namespace

TEST_SUITE("channel") {

TEST_CASE("free-space loss") {
  const RadioParams r;
  const double lam = r.wavelength_m();
  CHECK(to_db(fspl(200, lam)) - to_db(fspl(100, lam)) == Approx(-6.0206).epsilon(1e-5));
  CHECK(fspl(lam / (4 * kPi), lam, 0.0) == Approx(1.0));
  const double oracle_db = oracle::fspl_db(100.0, 2.4e9);
  CHECK(oracle_db == Approx(80.1).epsilon(0.1 / 80.1));
  CHECK(-to_db(fspl(100, lam)) == Approx(oracle_db).epsilon(1e-12));
}

TEST_CASE("free-space loss errors") {
  try {
    fspl(0.5, 0.125, 1.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BelowMinDistance);
  }
  try {
    fspl(10, 0.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
  }
}

TEST_CASE("received power") {
  RadioParams r;
  r.min_distance_m = 0.0;
  CHECK(received_power(iso({0, 0, 0}), 1.0, iso({r.wavelength_m() / (4 * kPi), 0, 0}), r) ==
        Approx(1.0));
  const double expected = std::pow(10.0, -oracle::fspl_db(100.0, 2.4e9) / 10.0);
  const double p = received_power(iso({0, 0, 0}), 1.0, iso({100, 0, 0}), r);
  CHECK(p == Approx(expected).epsilon(1e-12));
  CHECK(p == Approx(9.7e-9).epsilon(0.02));
  // receiver on the transmitter's dipole axis
  Terminal dip{Pose{{0, 0, 0}, Rotation{}}, RadiationPattern::half_wave_dipole()};
  CHECK(received_power(dip, 1.0, iso({0, 0, 50}), r) == 0.0);
}

TEST_CASE("link budget is consistent") {
  const RadioParams r;
  Terminal tx{Pose{{0, 0, 50}, Rotation{}}, RadiationPattern::short_dipole()};
  const LinkBudget b = link_budget(tx, 2.0, iso({30, 40, 50}), r);
  CHECK(b.distance_m == Approx(50.0));
  CHECK(b.tx_gain == Approx(1.5));
  CHECK(b.rx_gain == 1.0);
  CHECK(b.rx_power_w == Approx(2.0 * 1.5 * fspl(50.0, r.wavelength_m())));
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_w(30.0) == Approx(1.0));
  CHECK(dbm_to_w(-100.0) == Approx(1e-13));
  CHECK(w_to_dbm(1e-3) == Approx(0.0).scale(1.0));
  CHECK(to_db(100.0) == Approx(20.0));
}

TEST_CASE("sinr") {
  CHECK(sinr(1e-9, {}, 1e-12) == Approx(1000.0));
  const std::vector<double> zero{0.0};
  CHECK(sinr(2e-9, zero, 1e-12) == sinr(2e-9, {}, 1e-12));
  double prev = sinr(1e-9, std::vector<double>{0.0, 1e-12}, 1e-12);
  for (double i = 1e-12; i < 1e-6; i *= 3) {
    const double v = sinr(1e-9, std::vector<double>{i, 1e-12}, 1e-12);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("secrecy rate") {
  CHECK(secrecy_rate(3.0, std::vector<double>{3.0}) == 0.0);
  CHECK(secrecy_rate(3.0, {}) == Approx(2.0));
  CHECK(secrecy_rate(15.0, std::vector<double>{1.0, 3.0}) == Approx(2.0));
  CHECK(secrecy_rate(1.0, std::vector<double>{15.0}) == 0.0);
}

}
