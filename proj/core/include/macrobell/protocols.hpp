#pragma once

// Phase-entangled coherent-state source, the lossy pre-measurement state and
// the two unambiguous-state-discrimination measurements.
//
// Every protocol probability has two routes: an operator pipeline that runs
// the state through linear_optics and projects detector modes, and a closed
// form. Tests hold the two to 1e-10 relative.

#include <array>
#include <string_view>

#include "macrobell/channel.hpp"
#include "macrobell/coherent.hpp"
#include "macrobell/linear_optics.hpp"

namespace macrobell {

namespace modes {
inline const ModeLabel beam1{"beam1"};
inline const ModeLabel beam2{"beam2"};
inline const ModeLabel env_a{"env_a"};
inline const ModeLabel env_b{"env_b"};
inline const ModeLabel vac_a{"vac_a"};
inline const ModeLabel vac_b{"vac_b"};
inline const ModeLabel out_a3{"out_a3"};
inline const ModeLabel out_a4{"out_a4"};
inline const ModeLabel out_b3{"out_b3"};
inline const ModeLabel out_b4{"out_b4"};
}  // namespace modes

struct ProtocolParams {
  /// Initial coherent amplitude of each beam (sqrt of mean photon number).
  double alpha = 100.0;
  /// Conditional Kerr phase.
  double phi = 0.0028;
  double sigma1 = 0.0;
  double sigma2 = 0.0;

  /// Throws ParameterError for alpha <= 0 or non-finite fields.
  void validate() const;
  /// |phi| < pi/4. Outside it the small-phase discrimination picture breaks
  /// down; evaluation still proceeds.
  bool in_protocol_regime() const;
};

enum class Protocol { usd2, usd4 };

std::string_view to_string(Protocol p);
/// Accepts "usd2" / "usd4"; throws ParameterError otherwise.
Protocol parse_protocol(std::string_view s);

enum class Route { pipeline, closed_form };

enum class VisibilityForm {
  /// exp(-4 N_L sin^2 phi), the exact environment overlap.
  exact,
  /// exp(-4 N_L phi^2)
  small_angle,
};

enum class DetectionModel {
  /// Projection on exactly one photon per detector.
  single_photon,
  /// Any click (>= 1 photon) per detector.
  click,
};

struct EvalOptions {
  Route route = Route::pipeline;
  /// Used by the closed-form route only; the pipeline is always exact.
  VisibilityForm visibility_form = VisibilityForm::exact;
  /// Pipeline only.
  DetectionModel detection = DetectionModel::single_photon;
  DisplacementConvention displacement = DisplacementConvention::full_phase;
};

struct RateReport {
  /// Post-selection probability per pulse at the configured sigma1, sigma2.
  double p_success = 0.0;
  /// At sigma1 - sigma2 = pi.
  double p_max = 0.0;
  /// At sigma1 - sigma2 = 0.
  double p_min = 0.0;
  /// (p_max - p_min) / (p_max + p_min); 0 when both vanish.
  double visibility = 0.0;
  double chsh_s = 0.0;
};

// --- states ---------------------------------------------------------------

/// (|a e^{i phi}>|a e^{-i phi}> + |a e^{-i phi}>|a e^{i phi}>) / sqrt(2) on beam1, beam2.
SuperposedState build_source_state(const ProtocolParams& params);

/// The eight-branch state before the discrimination optics, over
/// (beam1, beam2, env_a, env_b). Written down term by term.
SuperposedState build_analysis_state(const ProtocolParams& params, const ChannelParams& channel);

/// Heralded single-photon Mach-Zehnder with Kerr media. Each coupled mode
/// picks up exp(+i sign phi) on the upper arm and exp(-i sign phi) on the
/// lower arm; the arm amplitudes seen by the heralding detector are
/// exp(i upper_phase)/2 and -exp(i lower_phase)/2 (two 50/50 beam splitters
/// with the BeamSplitterSpec sign convention). Every branch splits in two.
struct KerrCoupling {
  ModeLabel mode;
  int sign = 1;
};
SuperposedState apply_heralded_interferometer(const SuperposedState& state,
                                              std::span<const KerrCoupling> couplings, double phi,
                                              double upper_phase, double lower_phase);

/// The same eight-branch state built by running the optics: heralded source,
/// loss on both beams, pi/2 reference phase, then the two analysis
/// interferometers. Agrees branch by branch with build_analysis_state.
SuperposedState build_analysis_state_compositional(const ProtocolParams& params,
                                                   const ChannelParams& channel);

// --- discrimination settings ------------------------------------------------

/// Displacements L (on the a3/b3 outputs) and R (a4/b4) of the four-detector
/// scheme for attenuated amplitude |alpha'|.
struct Usd4Displacements {
  Amp left;
  Amp right;
};
Usd4Displacements usd4_displacements(double alpha_prime, double phi);

/// Displacement -i|alpha'| of the two-detector scheme.
Amp usd2_displacement(double alpha_prime);

// --- probabilities ----------------------------------------------------------

double visibility(double n_lost, double phi, VisibilityForm form = VisibilityForm::small_angle);

/// Post-selection probability for one sigma setting via the operator pipeline.
double usd4_probability_pipeline(const ProtocolParams& params, const ChannelParams& channel,
                                 const EvalOptions& options = {});
double usd2_probability_pipeline(const ProtocolParams& params, const ChannelParams& channel,
                                 const EvalOptions& options = {});

/// Closed forms in terms of |alpha'|^2, N_L and sigma1 - sigma2:
///   usd4: (x^4 e^{-8x} / 2) [1 - v cos(ds)],  x = |alpha'|^2 sin^2 phi
///   usd2: (x^2 e^{-8x} / 2) [1 - v cos(ds)]
double usd4_probability_closed(double alpha_prime_sq, double n_lost, double phi, double delta_sigma,
                               VisibilityForm form = VisibilityForm::exact);
double usd2_probability_closed(double alpha_prime_sq, double n_lost, double phi, double delta_sigma,
                               VisibilityForm form = VisibilityForm::exact);

/// The sigma-independent prefactor (x^k e^{-8x} / 2) and its logarithm.
double protocol_prefactor(Protocol which, double alpha_prime_sq, double phi);
double log_protocol_prefactor(Protocol which, double alpha_prime_sq, double phi);

double protocol_probability(Protocol which, const ProtocolParams& params,
                            const ChannelParams& channel, const EvalOptions& options = {});

RateReport protocol_usd4(const ProtocolParams& params, const ChannelParams& channel,
                         const EvalOptions& options = {});
RateReport protocol_usd2(const ProtocolParams& params, const ChannelParams& channel,
                         const EvalOptions& options = {});
RateReport evaluate_protocol(Protocol which, const ProtocolParams& params,
                             const ChannelParams& channel, const EvalOptions& options = {});

// --- CHSH ---------------------------------------------------------------------

/// Analyzer phases a, a' (station A) and b, b' (station B).
struct ChshAngles {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

/// Standard optimal settings (0, pi/2, pi/4, 3pi/4).
ChshAngles optimal_chsh_angles();

/// S = v |E(a,b) - E(a,b') + E(a',b) + E(a',b')| with E = cos of the phase
/// difference, the correlation carried by the fringe 1 - v cos(s1 - s2).
double chsh_s(double visibility, const ChshAngles& angles);

struct ChshOptimum {
  double s = 0.0;
  ChshAngles angles;
};
/// Numerical maximization of chsh_s over the four angles.
ChshOptimum maximize_chsh(double visibility);

}  // namespace macrobell
