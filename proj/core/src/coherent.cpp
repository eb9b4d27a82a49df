#include "macrobell/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "macrobell/error.hpp"

namespace macrobell {
namespace {

bool finite(Amp z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Index of each of b's modes inside a's registry.
std::vector<std::size_t> align_registries(const SuperposedState& a, const SuperposedState& b) {
  if (a.num_modes() != b.num_modes())
    throw ModeError("inner_product: registries hold different numbers of modes");
  std::vector<std::size_t> map(b.num_modes());
  for (std::size_t m = 0; m < b.num_modes(); ++m) {
    const auto& label = b.registry()[m];
    if (!a.has_mode(label))
      throw ModeError("inner_product: mode '" + label.str() + "' missing from left state");
    map[m] = a.mode_index(label);
  }
  return map;
}

}  // namespace

SuperposedState::SuperposedState(std::vector<ModeLabel> registry, std::vector<Branch> branches)
    : registry_(std::move(registry)), branches_(std::move(branches)) {
  std::set<ModeLabel> seen;
  for (const auto& label : registry_) {
    if (!seen.insert(label).second) throw ModeError("duplicate mode label '" + label.str() + "'");
  }
  for (const auto& branch : branches_) {
    if (branch.amps.size() != registry_.size())
      throw ModeError("branch does not cover the mode registry");
    if (!finite(branch.coeff)) throw ParameterError("non-finite branch coefficient");
    for (const auto& a : branch.amps)
      if (!finite(a)) throw ParameterError("non-finite coherent amplitude");
  }
}

SuperposedState SuperposedState::product(std::vector<ModeLabel> registry, std::vector<Amp> amps) {
  Branch b{Amp{1.0, 0.0}, std::move(amps)};
  return SuperposedState(std::move(registry), {std::move(b)});
}

bool SuperposedState::has_mode(const ModeLabel& mode) const {
  return std::find(registry_.begin(), registry_.end(), mode) != registry_.end();
}

std::size_t SuperposedState::mode_index(const ModeLabel& mode) const {
  auto it = std::find(registry_.begin(), registry_.end(), mode);
  if (it == registry_.end()) throw ModeError("unknown mode '" + mode.str() + "'");
  return static_cast<std::size_t>(it - registry_.begin());
}

Amp SuperposedState::amp(std::size_t branch, const ModeLabel& mode) const {
  return branches_.at(branch).amps[mode_index(mode)];
}

// Branch cancellation can leave a rounding residue just below zero.
double SuperposedState::norm_sq() const { return std::max(0.0, inner_product(*this, *this).real()); }

Amp overlap(Amp mu, Amp nu) {
  return std::exp(-0.5 * (std::norm(mu) + std::norm(nu)) + std::conj(mu) * nu);
}

Amp single_photon_amp(Amp nu) { return nu * std::exp(-0.5 * std::norm(nu)); }

Amp vacuum_amp(Amp nu) { return Amp{std::exp(-0.5 * std::norm(nu)), 0.0}; }

Amp inner_product(const SuperposedState& a, const SuperposedState& b) {
  const auto map = align_registries(a, b);
  Amp total{0.0, 0.0};
  for (const auto& bj : a.branches()) {
    for (const auto& bk : b.branches()) {
      Amp term = std::conj(bj.coeff) * bk.coeff;
      for (std::size_t m = 0; m < map.size(); ++m) term *= overlap(bj.amps[map[m]], bk.amps[m]);
      total += term;
    }
  }
  return total;
}

SuperposedState project_single_photon(const SuperposedState& state, const ModeLabel& mode) {
  const std::size_t idx = state.mode_index(mode);
  std::vector<ModeLabel> registry = state.registry();
  registry.erase(registry.begin() + static_cast<std::ptrdiff_t>(idx));

  std::vector<Branch> branches;
  branches.reserve(state.num_branches());
  for (const auto& b : state.branches()) {
    Branch out{b.coeff * single_photon_amp(b.amps[idx]), b.amps};
    out.amps.erase(out.amps.begin() + static_cast<std::ptrdiff_t>(idx));
    branches.push_back(std::move(out));
  }
  return SuperposedState(std::move(registry), std::move(branches));
}

SuperposedState prune(const SuperposedState& state, double threshold) {
  std::vector<Branch> kept;
  for (const auto& b : state.branches())
    if (std::abs(b.coeff) >= threshold) kept.push_back(b);
  return SuperposedState(state.registry(), std::move(kept));
}

Amp single_photon_kernel(Amp mu, Amp nu) {
  return std::conj(single_photon_amp(mu)) * single_photon_amp(nu);
}

Amp click_kernel(Amp mu, Amp nu) {
  return overlap(mu, nu) - std::conj(vacuum_amp(mu)) * vacuum_amp(nu);
}

double product_expectation(const SuperposedState& state, std::span<const ModeLabel> modes,
                           const DetectorKernel& kernel) {
  std::vector<bool> detected(state.num_modes(), false);
  for (const auto& m : modes) detected[state.mode_index(m)] = true;

  Amp total{0.0, 0.0};
  for (const auto& bj : state.branches()) {
    for (const auto& bk : state.branches()) {
      Amp term = std::conj(bj.coeff) * bk.coeff;
      for (std::size_t m = 0; m < state.num_modes(); ++m)
        term *= detected[m] ? kernel(bj.amps[m], bk.amps[m]) : overlap(bj.amps[m], bk.amps[m]);
      total += term;
    }
  }
  return total.real();
}

}  // namespace macrobell
