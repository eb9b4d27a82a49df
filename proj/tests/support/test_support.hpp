#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "macrobell/coherent.hpp"

namespace macrobell::testing {

inline Amp random_amp(std::mt19937_64& gen, double max_abs) {
  std::uniform_real_distribution<double> r(0.0, max_abs);
  std::uniform_real_distribution<double> t(-M_PI, M_PI);
  return std::polar(r(gen), t(gen));
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

/// |a - b| <= rel * max(|a|, |b|) + abs_floor
inline ::testing::AssertionResult rel_near(double a, double b, double rel, double abs_floor = 0.0) {
  const double diff = std::abs(a - b);
  const double bound = rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
  if (diff <= bound) return ::testing::AssertionSuccess();
  std::ostringstream os;
  os.precision(17);
  os << a << " vs " << b << ": |diff| = " << diff << " > " << bound;
  return ::testing::AssertionFailure() << os.str();
}

inline ::testing::AssertionResult amp_near(Amp a, Amp b, double tol) {
  if (std::abs(a - b) <= tol) return ::testing::AssertionSuccess();
  std::ostringstream os;
  os.precision(17);
  os << a << " vs " << b << " (|diff| = " << std::abs(a - b) << ")";
  return ::testing::AssertionFailure() << os.str();
}

/// Every branch of `a` matches exactly one unused branch of `b` (same
/// registry order) in coefficient and all amplitudes to `tol`.
inline ::testing::AssertionResult states_match_branchwise(const SuperposedState& a,
                                                          const SuperposedState& b, double tol) {
  if (a.registry() != b.registry()) return ::testing::AssertionFailure() << "registries differ";
  if (a.num_branches() != b.num_branches())
    return ::testing::AssertionFailure()
           << "branch counts " << a.num_branches() << " vs " << b.num_branches();
  std::vector<bool> used(b.num_branches(), false);
  for (std::size_t j = 0; j < a.num_branches(); ++j) {
    const auto& x = a.branches()[j];
    bool found = false;
    for (std::size_t k = 0; k < b.num_branches() && !found; ++k) {
      if (used[k]) continue;
      const auto& y = b.branches()[k];
      bool same = std::abs(x.coeff - y.coeff) <= tol;
      for (std::size_t m = 0; m < x.amps.size() && same; ++m)
        same = std::abs(x.amps[m] - y.amps[m]) <= tol * std::max(1.0, std::abs(x.amps[m]));
      if (same) {
        used[k] = true;
        found = true;
      }
    }
    if (!found) return ::testing::AssertionFailure() << "branch " << j << " has no partner";
  }
  return ::testing::AssertionSuccess();
}

/// Coherent-state overlap summed term by term in the number basis,
/// independent of macrobell::overlap and of the fock module.
inline Amp series_overlap(Amp mu, Amp nu, int dim) {
  Amp cm = std::exp(-0.5 * std::norm(mu));
  Amp cn = std::exp(-0.5 * std::norm(nu));
  Amp sum = std::conj(cm) * cn;
  for (int n = 1; n < dim; ++n) {
    cm *= mu / std::sqrt(static_cast<double>(n));
    cn *= nu / std::sqrt(static_cast<double>(n));
    sum += std::conj(cm) * cn;
  }
  return sum;
}

}  // namespace macrobell::testing
