#pragma once

#include <span>

#include "omrav/antenna.hpp"
#include "omrav/geometry.hpp"

namespace omrav {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Radio constants. Powers are carried in watts; dB only at I/O.
struct RadioParams {
  double carrier_hz = 2.4e9;
  double noise_power_w = 1e-13;  // -100 dBm
  double min_distance_m = 1.0;

  double wavelength_m() const noexcept { return kSpeedOfLight / carrier_hz; }

  bool operator==(const RadioParams&) const = default;
};

double dbm_to_w(double dbm) noexcept;
double w_to_dbm(double w) noexcept;
double to_db(double linear) noexcept;

/// Free-space loss factor (lambda / (4 pi d))^2. Throws BelowMinDistance when
/// d < min_distance_m and DomainError for a non-positive wavelength.
double fspl(double distance_m, double wavelength_m, double min_distance_m = 1.0);

/// An antenna mounted at a pose.
struct Terminal {
  Pose pose;
  RadiationPattern pattern = RadiationPattern::isotropic();
};

struct LinkBudget {
  double tx_power_w;
  double tx_gain;
  double rx_gain;
  double distance_m;
  double rx_power_w;
};

LinkBudget link_budget(const Terminal& tx, double tx_power_w, const Terminal& rx,
                       const RadioParams& radio);

/// Received power in W of a line-of-sight free-space link.
double received_power(const Terminal& tx, double tx_power_w, const Terminal& rx,
                      const RadioParams& radio);

/// signal / (noise + sum(interference)).
double sinr(double signal_w, std::span<const double> interference_w, double noise_w);

/// max(0, log2(1 + legit) - max_e log2(1 + eaves_e)) in bits/s/Hz.
double secrecy_rate(double legit_sinr, std::span<const double> eaves_sinrs);

}  // namespace omrav
