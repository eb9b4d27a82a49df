#include "macrobell/linear_optics.hpp"

#include <cmath>

#include "macrobell/error.hpp"

namespace macrobell {
namespace {

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0))
    throw ParameterError(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
}

void check_fresh(const SuperposedState& state, const ModeLabel& label) {
  if (state.has_mode(label)) throw ModeError("mode '" + label.str() + "' already registered");
}

template <class F>
SuperposedState map_mode(const SuperposedState& state, const ModeLabel& mode, F&& f) {
  const std::size_t idx = state.mode_index(mode);
  std::vector<Branch> branches = state.branches();
  for (auto& b : branches) f(b, b.amps[idx]);
  return SuperposedState(state.registry(), std::move(branches));
}

}  // namespace

SuperposedState apply_beam_splitter(const SuperposedState& state, const BeamSplitterSpec& spec) {
  check_unit_interval(spec.reflectivity, "beam splitter reflectivity");
  if (spec.in1 == spec.in2 || spec.out3 == spec.out4 || spec.in1 == spec.out3 ||
      spec.in1 == spec.out4 || spec.in2 == spec.out3 || spec.in2 == spec.out4)
    throw ModeError("beam splitter port labels must be distinct");
  const std::size_t i1 = state.mode_index(spec.in1);
  const std::size_t i2 = state.mode_index(spec.in2);
  check_fresh(state, spec.out3);
  check_fresh(state, spec.out4);

  const double t = std::sqrt(1.0 - spec.reflectivity);
  const double r = std::sqrt(spec.reflectivity);

  std::vector<ModeLabel> registry = state.registry();
  registry[i1] = spec.out3;
  registry[i2] = spec.out4;

  std::vector<Branch> branches = state.branches();
  for (auto& b : branches) {
    const Amp mu = b.amps[i1];
    const Amp nu = b.amps[i2];
    b.amps[i1] = t * mu + r * nu;
    b.amps[i2] = -r * mu + t * nu;
  }
  return SuperposedState(std::move(registry), std::move(branches));
}

SuperposedState apply_displacement(const SuperposedState& state, const ModeLabel& mode, Amp tau,
                                   DisplacementConvention convention) {
  return map_mode(state, mode, [&](Branch& b, Amp& nu) {
    if (convention == DisplacementConvention::full_phase) {
      // exp((tau nu* - tau* nu)/2) = exp(i Im(tau nu*))
      const double phase = (tau * std::conj(nu)).imag();
      b.coeff *= std::polar(1.0, phase);
    }
    nu += tau;
  });
}

SuperposedState apply_loss(const SuperposedState& state, const LossSpec& spec) {
  check_unit_interval(spec.transmittance, "transmittance");
  const std::size_t idx = state.mode_index(spec.signal);
  check_fresh(state, spec.environment);

  const double keep = std::sqrt(spec.transmittance);
  const double leak = std::sqrt(1.0 - spec.transmittance);

  std::vector<ModeLabel> registry = state.registry();
  registry.push_back(spec.environment);
  std::vector<Branch> branches = state.branches();
  for (auto& b : branches) {
    const Amp nu = b.amps[idx];
    b.amps[idx] = keep * nu;
    b.amps.push_back(leak * nu);
  }
  return SuperposedState(std::move(registry), std::move(branches));
}

SuperposedState apply_loss_chain(const SuperposedState& state, const ModeLabel& signal,
                                 double transmittance, std::size_t segments,
                                 const std::string& env_prefix) {
  check_unit_interval(transmittance, "transmittance");
  if (segments == 0) throw ParameterError("loss chain needs at least one segment");
  const double per_segment = std::pow(transmittance, 1.0 / static_cast<double>(segments));
  SuperposedState out = state;
  for (std::size_t k = 0; k < segments; ++k)
    out = apply_loss(out, {per_segment, signal, ModeLabel(env_prefix + std::to_string(k))});
  return out;
}

SuperposedState apply_phase(const SuperposedState& state, const ModeLabel& mode, double theta) {
  if (!std::isfinite(theta)) throw ParameterError("phase must be finite");
  const Amp rot = std::polar(1.0, theta);
  return map_mode(state, mode, [&](Branch&, Amp& nu) { nu *= rot; });
}

SuperposedState add_vacuum_mode(const SuperposedState& state, const ModeLabel& mode) {
  check_fresh(state, mode);
  std::vector<ModeLabel> registry = state.registry();
  registry.push_back(mode);
  std::vector<Branch> branches = state.branches();
  for (auto& b : branches) b.amps.emplace_back(0.0, 0.0);
  return SuperposedState(std::move(registry), std::move(branches));
}

}  // namespace macrobell
