#include "macrobell/channel.hpp"

#include <cmath>
#include <string>

#include "macrobell/error.hpp"

namespace macrobell {

ChannelParams ChannelParams::from_total_km(double loss_db_per_km, double total_km) {
  return ChannelParams{loss_db_per_km, 0.5 * total_km};
}

ChannelParams ChannelParams::from_transmittance(double transmittance, double loss_db_per_km) {
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw ParameterError("transmittance must lie in (0, 1]");
  if (transmittance == 1.0) return ChannelParams{loss_db_per_km, 0.0};
  if (!(loss_db_per_km > 0.0))
    throw ParameterError("a lossless fiber cannot reach transmittance < 1");
  return ChannelParams{loss_db_per_km, -10.0 * std::log10(transmittance) / loss_db_per_km};
}

double ChannelParams::transmittance() const {
  return std::pow(10.0, -loss_db_per_km * distance_km_per_arm / 10.0);
}

void ChannelParams::validate() const {
  if (!(std::isfinite(loss_db_per_km) && loss_db_per_km >= 0.0))
    throw ParameterError("loss_db_per_km must be finite and >= 0, got " +
                         std::to_string(loss_db_per_km));
  if (!(std::isfinite(distance_km_per_arm) && distance_km_per_arm >= 0.0))
    throw ParameterError("distance must be finite and >= 0, got " +
                         std::to_string(distance_km_per_arm));
}

}  // namespace macrobell
