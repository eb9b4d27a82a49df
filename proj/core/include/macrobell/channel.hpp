#pragma once

namespace macrobell {

/// Fiber link from the source to one analysis station. Both arms are
/// assumed identical; "total" distances are the separation between the two
/// stations, i.e. twice the per-arm length.
struct ChannelParams {
  double loss_db_per_km = 0.15;
  double distance_km_per_arm = 0.0;

  static ChannelParams from_total_km(double loss_db_per_km, double total_km);
  /// Per-arm length giving `transmittance` at the given loss. Throws for
  /// loss <= 0 unless transmittance == 1.
  static ChannelParams from_transmittance(double transmittance, double loss_db_per_km = 0.15);

  double total_km() const { return 2.0 * distance_km_per_arm; }
  /// Amplitude-squared transmittance 10^(-loss * d / 10).
  double transmittance() const;
  /// Throws ParameterError on negative or non-finite fields.
  void validate() const;
};

}  // namespace macrobell
