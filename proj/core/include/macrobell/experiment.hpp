#pragma once

// Link budget, counting rates, accidentals, Monte Carlo coincidence runs and
// range / phase planning.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "macrobell/channel.hpp"
#include "macrobell/protocols.hpp"

namespace macrobell {

struct Attenuation {
  double alpha_prime = 0.0;
  /// |alpha'|^2
  double photons_received = 0.0;
  /// N_L = |alpha|^2 - |alpha'|^2
  double photons_lost = 0.0;
};

Attenuation attenuate(double alpha, const ChannelParams& channel);

struct CountingRates {
  double r_max = 0.0;
  double r_min = 0.0;
};

/// r = p * source rate (counts/s).
CountingRates counting_rates(double p_max, double p_min, double source_rate_hz);

struct DetectorSpec {
  double dark_rate_hz = 0.0008;
  double coincidence_window_s = 1e-9;

  void validate() const;
};

/// n-fold accidental coincidence rate from uncorrelated dark counts:
/// n * dark * (dark * window)^(n - 1).
double accidental_rate(const DetectorSpec& det, int n_fold);

/// Number of detectors whose coincidence defines success.
int detector_count(Protocol which);

struct MonteCarloConfig {
  double duration_s = 0.0;
  double source_rate_hz = 1e9;
  std::uint64_t seed = 1;
  /// Length of one random-stream block. Each block draws from its own stream
  /// so totals do not depend on how blocks are spread over threads.
  double block_s = 1.0;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct CountBin {
  double start_s = 0.0;
  double end_s = 0.0;
  std::uint64_t counts_max = 0;
  std::uint64_t counts_min = 0;
};

struct RunResult {
  std::uint64_t counts_max = 0;
  std::uint64_t counts_min = 0;
  /// Absent when counts_max + counts_min == 0.
  std::optional<double> estimated_visibility;
  std::optional<double> stderr_visibility;
  std::uint64_t seed = 0;
  std::vector<CountBin> bins;
};

/// Simulates `duration_s` at each fringe extreme (sigma1 - sigma2 = pi and 0)
/// with signal coincidences drawn per block as Binomial(pulses, p) and
/// accidentals as an independent Poisson process.
RunResult monte_carlo_run(const ProtocolParams& params, const ChannelParams& channel,
                          const DetectorSpec& det, const MonteCarloConfig& config, Protocol which);

/// Delta-method standard error of (M - m)/(M + m) for independent Poisson counts.
std::optional<double> visibility_stderr(std::uint64_t counts_max, std::uint64_t counts_min);

/// exp(-4 alpha^2 phi^2): visibility once every photon has been lost.
double asymptotic_visibility(double alpha, double phi);

enum class RangeLimit { rate, visibility };
std::string_view to_string(RangeLimit limit);

struct RangeOptions {
  double resolution_km_total = 0.1;
  VisibilityForm visibility_form = VisibilityForm::exact;
};

struct RangeResult {
  bool feasible = false;
  double total_km = 0.0;
  double per_arm_km = 0.0;
  RangeLimit limit = RangeLimit::rate;
  double r_max_hz = 0.0;
  double visibility = 0.0;
};

/// Largest station separation where R_max >= rate_floor and the fringe
/// visibility exceeds 1/sqrt(2).
RangeResult max_range(const ProtocolParams& params, double loss_db_per_km, double rate_floor_hz,
                      double source_rate_hz, Protocol which, const RangeOptions& options = {});

struct PhiOptimum {
  bool feasible = false;
  /// Objective flat (alpha' ~ 0): no phase is preferred.
  bool degenerate = false;
  /// Optimum sits on the visibility boundary.
  bool constrained = false;
  double phi = 0.0;
  double p_max = 0.0;
  double visibility = 0.0;
};

struct PhiOptions {
  bool constrain_visibility = true;
  double tolerance = 1e-12;
};

/// Maximizes the sigma-independent prefactor over phi in (0, pi/2] subject to
/// an exact-form visibility above 1/sqrt(2). p_max includes the (1 + v) factor.
PhiOptimum optimize_phi(double alpha, const ChannelParams& channel, Protocol which,
                        const PhiOptions& options = {});

}  // namespace macrobell
