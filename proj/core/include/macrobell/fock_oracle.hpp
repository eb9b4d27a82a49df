#pragma once

// Brute-force number-basis oracle.
//
// Used only to cross-check the analytic path at small amplitude. It builds
// coherent states from their series, realizes displacement as the exponential
// of the truncated generator and the beam splitter by expanding transformed
// creation operators, so it shares no formulas with coherent.hpp beyond the
// environment-mode overlaps it contracts at the end.

#include <cstddef>
#include <vector>

#include "macrobell/channel.hpp"
#include "macrobell/coherent.hpp"
#include "macrobell/protocols.hpp"

namespace macrobell::fock {

/// Truncated single-mode vector over |0> .. |dim-1>.
class FockVector {
 public:
  explicit FockVector(std::size_t dim);
  explicit FockVector(std::vector<Amp> coeffs);

  std::size_t dim() const { return coeffs_.size(); }
  const std::vector<Amp>& coeffs() const { return coeffs_; }
  Amp operator[](std::size_t n) const { return coeffs_[n]; }
  Amp& operator[](std::size_t n) { return coeffs_[n]; }

  double norm_sq() const;
  /// 1 - norm_sq(): probability mass lost to truncation for a normalized state.
  double norm_deficit() const { return 1.0 - norm_sq(); }

 private:
  std::vector<Amp> coeffs_;
};

/// Two modes, coefficient grid indexed (n1, n2), each 0 .. dim-1.
class TwoModeFock {
 public:
  explicit TwoModeFock(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Amp at(std::size_t n1, std::size_t n2) const { return grid_[n1 * dim_ + n2]; }
  Amp& at(std::size_t n1, std::size_t n2) { return grid_[n1 * dim_ + n2]; }
  double norm_sq() const;

  static TwoModeFock tensor(const FockVector& first, const FockVector& second);

 private:
  std::size_t dim_;
  std::vector<Amp> grid_;
};

/// mean + 10 sqrt(mean + 1) + 20
std::size_t recommended_dim(double mean_photons);
/// ceil(mean + 5); coherent_fock refuses anything smaller.
std::size_t minimum_dim(double mean_photons);

FockVector basis_state(std::size_t n, std::size_t dim);

/// c_n = exp(-|nu|^2/2) nu^n / sqrt(n!)
FockVector coherent_fock(Amp nu, std::size_t dim);

/// exp(tau a^dag - conj(tau) a) restricted to the truncated space. Throws
/// TruncationError when the result leaves more than `max_edge_weight` of
/// probability in the top four levels.
FockVector displace_fock(const FockVector& v, Amp tau, double max_edge_weight = 1e-12);

/// Beam splitter in the BeamSplitterSpec convention, mode 1 = port in1,
/// mode 2 = port in2; output grid is (out3, out4). Photon-number conserving;
/// components pushed past dim - 1 are dropped.
TwoModeFock beamsplitter_fock(const TwoModeFock& v, double lambda);

/// Applies displacement tau1 on the first mode and tau2 on the second.
TwoModeFock displace_fock(const TwoModeFock& v, Amp tau1, Amp tau2);

struct OracleOptions {
  /// Multiplies the recommended truncation (2 for the doubling check).
  std::size_t dim_scale = 1;
  /// Overrides the recommended truncation when non-zero.
  std::size_t dim_override = 0;
};

/// Largest attenuated amplitude |alpha'| the oracle accepts.
inline constexpr double kOracleMaxAlphaPrime = 4.0;

/// Post-selection probability computed in the number basis. Throws
/// TruncationError when |alpha'| exceeds kOracleMaxAlphaPrime.
double oracle_protocol_prob(const ProtocolParams& params, const ChannelParams& channel,
                            Protocol which, const OracleOptions& options = {});

}  // namespace macrobell::fock
