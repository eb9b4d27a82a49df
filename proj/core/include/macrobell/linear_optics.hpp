#pragma once

// Beam splitter, displacement, loss and phase shift acting on
// SuperposedState. All maps act branch by branch on coherent amplitudes.

#include <cstddef>
#include <string>

#include "macrobell/coherent.hpp"

namespace macrobell {

/// Beam splitter with reflectivity lambda. Port convention:
///   |mu>_in1 |nu>_in2 -> |sqrt(1-l) mu + sqrt(l) nu>_out3 |-sqrt(l) mu + sqrt(1-l) nu>_out4
/// This sign choice (minus on the reflected in1 amplitude) is used everywhere
/// in the library, including the heralding interferometers in protocols.
struct BeamSplitterSpec {
  double reflectivity = 0.5;
  ModeLabel in1;
  ModeLabel in2;
  ModeLabel out3;
  ModeLabel out4;
};

struct LossSpec {
  double transmittance = 1.0;
  ModeLabel signal;
  /// Must not already be registered.
  ModeLabel environment;
};

enum class DisplacementConvention {
  /// D(tau)|nu> = exp((tau conj(nu) - conj(tau) nu)/2) |nu + tau>
  full_phase,
  /// D(tau)|nu> = |nu + tau>, dropping the branch-dependent phase.
  phase_free,
};

/// out3 takes the registry slot of in1 and out4 that of in2.
SuperposedState apply_beam_splitter(const SuperposedState& state, const BeamSplitterSpec& spec);

SuperposedState apply_displacement(
    const SuperposedState& state, const ModeLabel& mode, Amp tau,
    DisplacementConvention convention = DisplacementConvention::full_phase);

/// Signal nu -> sqrt(eta) nu; a new environment mode (appended to the
/// registry) receives sqrt(1 - eta) nu.
SuperposedState apply_loss(const SuperposedState& state, const LossSpec& spec);

/// Same total transmittance split over `segments` identical beam splitters.
/// Environment modes are named "<env_prefix>0", "<env_prefix>1", ...
SuperposedState apply_loss_chain(const SuperposedState& state, const ModeLabel& signal,
                                 double transmittance, std::size_t segments,
                                 const std::string& env_prefix);

/// nu -> exp(i theta) nu
SuperposedState apply_phase(const SuperposedState& state, const ModeLabel& mode, double theta);

/// Appends a mode holding vacuum in every branch.
SuperposedState add_vacuum_mode(const SuperposedState& state, const ModeLabel& mode);

}  // namespace macrobell
