#pragma once

// Exact algebra of multimode coherent-state superpositions.
//
// A SuperposedState is a finite sum of branches; each branch is a complex
// coefficient times a product of coherent states, one per registered mode.
// Every state handled by the simulator (source, lossy channel output,
// displaced detector inputs) has this form, so no Fock truncation is needed
// on the analytic path.

#include <complex>
#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace macrobell {

using Amp = std::complex<double>;

/// Name of an optical mode, unique within a state's registry.
class ModeLabel {
 public:
  ModeLabel() = default;
  explicit ModeLabel(std::string name) : name_(std::move(name)) {}
  ModeLabel(const char* name) : name_(name) {}  // NOLINT: literals read naturally at call sites

  const std::string& str() const { return name_; }

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;

 private:
  std::string name_;
};

struct Branch {
  Amp coeff{1.0, 0.0};
  /// One amplitude per registry mode, in registry order.
  std::vector<Amp> amps;
};

class SuperposedState {
 public:
  SuperposedState() = default;
  /// Validates that labels are unique, every branch covers the registry and
  /// all numbers are finite.
  SuperposedState(std::vector<ModeLabel> registry, std::vector<Branch> branches);

  /// Single-branch product state with coefficient 1.
  static SuperposedState product(std::vector<ModeLabel> registry, std::vector<Amp> amps);

  const std::vector<ModeLabel>& registry() const { return registry_; }
  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t num_modes() const { return registry_.size(); }
  std::size_t num_branches() const { return branches_.size(); }

  bool has_mode(const ModeLabel& mode) const;
  /// Throws ModeError when absent.
  std::size_t mode_index(const ModeLabel& mode) const;
  Amp amp(std::size_t branch, const ModeLabel& mode) const;

  /// inner_product(*this, *this).real()
  double norm_sq() const;

 private:
  std::vector<ModeLabel> registry_;
  std::vector<Branch> branches_;
};

/// <mu|nu> = exp(-(|mu|^2 + |nu|^2)/2 + conj(mu) nu)
Amp overlap(Amp mu, Amp nu);

/// <1|nu> = nu exp(-|nu|^2/2)
Amp single_photon_amp(Amp nu);

/// <0|nu> = exp(-|nu|^2/2)
Amp vacuum_amp(Amp nu);

/// Sum over branch pairs of conj(a_j) b_k prod_m <a_jm|b_km>. The registries
/// must hold the same label set; order may differ.
Amp inner_product(const SuperposedState& a, const SuperposedState& b);

/// Projects `mode` onto |1>: the mode leaves the registry and each branch
/// coefficient absorbs <1|amp>. Zero-coefficient branches are kept; see prune().
SuperposedState project_single_photon(const SuperposedState& state, const ModeLabel& mode);

/// Drops branches with |coeff| below `threshold`.
SuperposedState prune(const SuperposedState& state, double threshold = 1e-30);

/// Matrix element <mu|K|nu> of a single-mode detector operator between coherent states.
using DetectorKernel = std::function<Amp(Amp mu, Amp nu)>;

/// <1|-projector kernel: conj(<1|mu>) <1|nu>.
Amp single_photon_kernel(Amp mu, Amp nu);

/// Click (>= 1 photon) kernel: <mu|nu> - conj(<0|mu>) <0|nu>.
Amp click_kernel(Amp mu, Amp nu);

/// <state| (tensor of kernel over `modes`) |state>, identity on the other
/// modes. With single_photon_kernel this equals the squared norm of the
/// state projected on |1> in each listed mode.
double product_expectation(const SuperposedState& state, std::span<const ModeLabel> modes,
                           const DetectorKernel& kernel);

}  // namespace macrobell
