#include "omrav/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "omrav/error.hpp"

namespace omrav {

double dbm_to_w(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double w_to_dbm(double w) noexcept { return 10.0 * std::log10(w) + 30.0; }
double to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

double fspl(double distance_m, double wavelength_m, double min_distance_m) {
  if (!(wavelength_m > 0.0)) throw Error(ErrorKind::DomainError, "wavelength must be positive");
  if (!(distance_m >= min_distance_m))
    throw Error(ErrorKind::BelowMinDistance, "link shorter than the minimum distance");
  const double r = wavelength_m / (4.0 * std::numbers::pi * distance_m);
  return r * r;
}

LinkBudget link_budget(const Terminal& tx, double tx_power_w, const Terminal& rx,
                       const RadioParams& radio) {
  const Link l = link(tx.pose.position, rx.pose.position);
  LinkBudget b{};
  b.tx_power_w = tx_power_w;
  b.tx_gain = gain_toward(tx.pattern, tx.pose, rx.pose.position);
  b.rx_gain = gain_toward(rx.pattern, rx.pose, tx.pose.position);
  b.distance_m = l.distance_m;
  b.rx_power_w = tx_power_w * b.tx_gain * b.rx_gain *
                 fspl(l.distance_m, radio.wavelength_m(), radio.min_distance_m);
  return b;
}

double received_power(const Terminal& tx, double tx_power_w, const Terminal& rx,
                      const RadioParams& radio) {
  return link_budget(tx, tx_power_w, rx, radio).rx_power_w;
}

double sinr(double signal_w, std::span<const double> interference_w, double noise_w) {
  double denom = noise_w;
  for (double i : interference_w) denom += i;
  return signal_w / denom;
}

double secrecy_rate(double legit_sinr, std::span<const double> eaves_sinrs) {
  double worst = 0.0;
  for (double e : eaves_sinrs) worst = std::max(worst, std::log2(1.0 + e));
  return std::max(0.0, std::log2(1.0 + legit_sinr) - worst);
}

}  // namespace omrav
