#pragma once

// Ground-to-air channel: probabilistic LoS mixture of Nakagami-m small-scale
// fading over a free-space style large-scale loss, and the Shannon rate.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "uavmec/config.hpp"
#include "uavmec/geometry.hpp"
#include "uavmec/random.hpp"

namespace uavmec {

inline constexpr double kSpeedOfLight = 299792458.0;

struct LinkGeometry {
  double horizontal_distance = 0.0;
  double altitude_gap = 0.0;
  double slant_distance = 0.0;
  double elevation_deg = 90.0;

  static LinkGeometry between(const Vec2& ground, const Vec2& air, double altitude) {
    if (!(altitude > 0)) throw std::invalid_argument("altitude gap must be > 0");
    LinkGeometry g;
    g.horizontal_distance = distance(ground, air);
    g.altitude_gap = altitude;
    g.slant_distance = std::hypot(g.horizontal_distance, altitude);
    g.elevation_deg = 180.0 / std::numbers::pi * std::asin(std::min(1.0, altitude / g.slant_distance));
    return g;
  }

  static LinkGeometry from_slant(double slant, double altitude) {
    if (!(altitude > 0)) throw std::invalid_argument("altitude gap must be > 0");
    if (slant < altitude) throw std::domain_error("slant distance shorter than altitude gap");
    LinkGeometry g;
    g.altitude_gap = altitude;
    g.slant_distance = slant;
    g.horizontal_distance = std::sqrt(slant * slant - altitude * altitude);
    g.elevation_deg = 180.0 / std::numbers::pi * std::asin(altitude / slant);
    return g;
  }
};

inline double los_probability(const LinkGeometry& geom, double c1, double c2) {
  if (geom.slant_distance < geom.altitude_gap || !(geom.altitude_gap > 0)) {
    throw std::domain_error("los_probability: slant distance below altitude gap");
  }
  const double angle = 180.0 / std::numbers::pi * std::asin(std::min(1.0, geom.altitude_gap / geom.slant_distance));
  return 1.0 / (1.0 + c1 * std::exp(-c2 * (angle - c1)));
}

/// Nakagami-m amplitude with shape `shape` and spread (mean power) `mean_power`:
/// the squared amplitude is Gamma(shape, mean_power / shape).
inline double sample_small_scale(double shape, double mean_power, Rng& rng) {
  if (!(shape >= 0.5)) throw std::invalid_argument("Nakagami shape must be >= 0.5");
  if (!(mean_power > 0)) throw std::invalid_argument("Nakagami mean power must be > 0");
  std::gamma_distribution<double> power(shape, mean_power / shape);
  double g = power(rng);
  // Zero has probability 0 but can appear after rounding for tiny shapes.
  while (!(g > 0)) g = power(rng);
  return std::sqrt(g);
}

inline double large_scale_loss(const LinkGeometry& geom, double carrier_frequency, double attenuation) {
  if (!(geom.slant_distance > 0)) throw std::invalid_argument("distance must be > 0");
  if (!(carrier_frequency > 0)) throw std::invalid_argument("carrier frequency must be > 0");
  const double a = 4.0 * std::numbers::pi * geom.slant_distance * carrier_frequency / kSpeedOfLight;
  return a * a * attenuation;
}

inline double composite_gain(double los_prob, double h_los, double h_nlos, double loss_los, double loss_nlos) {
  return los_prob * h_los * h_los / loss_los + (1.0 - los_prob) * h_nlos * h_nlos / loss_nlos;
}

/// Uplink rate in bit/s for bandwidth share `share` of `bandwidth` Hz.
inline double transmission_rate(double share, double bandwidth, double tx_power, double gain, double noise_power) {
  if (!(share > 0)) throw std::invalid_argument("bandwidth share must be > 0");
  return share * bandwidth * std::log2(1.0 + tx_power * gain / noise_power);
}

struct ChannelDraw {
  double h_los = 1.0;
  double h_nlos = 1.0;
  double gain = 0.0;
  double los_prob = 0.0;
};

inline ChannelDraw draw_channel(const LinkGeometry& geom, const ScenarioConfig& c, Rng& fading) {
  ChannelDraw d;
  d.los_prob = los_probability(geom, c.los_c1, c.los_c2);
  d.h_los = sample_small_scale(c.nakagami_los, c.mean_rx_power, fading);
  d.h_nlos = sample_small_scale(c.nakagami_nlos, c.mean_rx_power, fading);
  d.gain = composite_gain(d.los_prob, d.h_los, d.h_nlos, large_scale_loss(geom, c.carrier_frequency, c.attenuation_los),
                          large_scale_loss(geom, c.carrier_frequency, c.attenuation_nlos));
  return d;
}

/// Distance-free SNR constant: SNR = constant / slant_distance^2 with the LoS
/// probability and fading powers held at their current values.
inline double snr_distance_constant(double los_prob, double los_power, double nlos_power, const ScenarioConfig& c) {
  const double k = 4.0 * std::numbers::pi * c.carrier_frequency;
  const double mix = los_prob * los_power * c.attenuation_nlos + (1.0 - los_prob) * nlos_power * c.attenuation_los;
  return c.ud_tx_power * kSpeedOfLight * kSpeedOfLight * mix /
         (k * k * c.noise_power * c.attenuation_los * c.attenuation_nlos);
}

}  // namespace uavmec
