#include "macrobell/fock_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "macrobell/error.hpp"

namespace macrobell::fock {
namespace {

using Matrix = Eigen::MatrixXcd;

// exp(tau a^dag - conj(tau) a) on the truncated space, via the spectral
// decomposition of the Hermitian generator i (tau a^dag - conj(tau) a).
Matrix displacement_matrix(Amp tau, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix h = Matrix::Zero(n, n);
  const Amp i{0.0, 1.0};
  for (Eigen::Index k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    h(k, k - 1) = i * tau * s;              // i tau a^dag
    h(k - 1, k) = -i * std::conj(tau) * s;  // -i conj(tau) a
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) throw TruncationError("displacement eigensolver failed");
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, -l); });
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

double edge_weight(const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  const Eigen::Index top = std::min<Eigen::Index>(4, n);
  return v.tail(top).squaredNorm();
}

Eigen::VectorXcd to_eigen(const FockVector& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t n = 0; n < v.dim(); ++n) out(static_cast<Eigen::Index>(n)) = v[n];
  return out;
}

Matrix to_eigen(const TwoModeFock& v) {
  const auto n = static_cast<Eigen::Index>(v.dim());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = v.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  return m;
}

double log_choose(std::size_t n, std::size_t k, const std::vector<double>& lf) {
  return lf[n] - lf[k] - lf[n - k];
}

}  // namespace

FockVector::FockVector(std::size_t dim) : coeffs_(dim, Amp{0.0, 0.0}) {
  if (dim == 0) throw TruncationError("Fock truncation must be at least 1");
}

FockVector::FockVector(std::vector<Amp> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw TruncationError("Fock truncation must be at least 1");
}

double FockVector::norm_sq() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

TwoModeFock::TwoModeFock(std::size_t dim) : dim_(dim), grid_(dim * dim, Amp{0.0, 0.0}) {
  if (dim == 0) throw TruncationError("Fock truncation must be at least 1");
}

double TwoModeFock::norm_sq() const {
  double s = 0.0;
  for (const auto& c : grid_) s += std::norm(c);
  return s;
}

TwoModeFock TwoModeFock::tensor(const FockVector& first, const FockVector& second) {
  if (first.dim() != second.dim()) throw TruncationError("tensor: truncations differ");
  TwoModeFock out(first.dim());
  for (std::size_t a = 0; a < first.dim(); ++a)
    for (std::size_t b = 0; b < second.dim(); ++b) out.at(a, b) = first[a] * second[b];
  return out;
}

std::size_t recommended_dim(double mean_photons) {
  return static_cast<std::size_t>(std::ceil(mean_photons + 10.0 * std::sqrt(mean_photons + 1.0) + 20.0));
}

std::size_t minimum_dim(double mean_photons) {
  return static_cast<std::size_t>(std::ceil(mean_photons + 5.0));
}

FockVector basis_state(std::size_t n, std::size_t dim) {
  if (n >= dim) throw TruncationError("basis state outside truncation");
  FockVector v(dim);
  v[n] = 1.0;
  return v;
}

FockVector coherent_fock(Amp nu, std::size_t dim) {
  const double mean = std::norm(nu);
  if (dim < minimum_dim(mean))
    throw TruncationError("dim " + std::to_string(dim) + " below floor " +
                          std::to_string(minimum_dim(mean)) + " for |nu|^2 = " +
                          std::to_string(mean) + "; recommended " +
                          std::to_string(recommended_dim(mean)));
  FockVector v(dim);
  v[0] = std::exp(-0.5 * mean);
  for (std::size_t n = 1; n < dim; ++n) v[n] = v[n - 1] * nu / std::sqrt(static_cast<double>(n));
  return v;
}

FockVector displace_fock(const FockVector& v, Amp tau, double max_edge_weight) {
  const Eigen::VectorXcd out = displacement_matrix(tau, v.dim()) * to_eigen(v);
  const double edge = edge_weight(out);
  if (edge > max_edge_weight)
    throw TruncationError("displaced state leaves weight " + std::to_string(edge) +
                          " in the top levels of a dim " + std::to_string(v.dim()) + " truncation");
  std::vector<Amp> coeffs(out.data(), out.data() + out.size());
  return FockVector(std::move(coeffs));
}

TwoModeFock beamsplitter_fock(const TwoModeFock& v, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ParameterError("beam splitter reflectivity must lie in [0, 1]");
  const std::size_t dim = v.dim();
  const double t = std::sqrt(1.0 - lambda);
  const double r = std::sqrt(lambda);

  std::vector<double> lf(2 * dim + 1);
  for (std::size_t k = 0; k < lf.size(); ++k) lf[k] = std::lgamma(static_cast<double>(k) + 1.0);

  // a1^dag -> t a3^dag - r a4^dag,  a2^dag -> r a3^dag + t a4^dag
  TwoModeFock out(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t m = 0; m < dim; ++m) {
      const Amp c = v.at(n, m);
      if (c == Amp{0.0, 0.0}) continue;
      const std::size_t total = n + m;
      for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t l = 0; l <= m; ++l) {
          const std::size_t out3 = k + l;
          const std::size_t out4 = total - out3;
          if (out3 >= dim || out4 >= dim) continue;
          const double log_mag = log_choose(n, k, lf) + log_choose(m, l, lf) +
                                 0.5 * (lf[out3] + lf[out4] - lf[n] - lf[m]);
          double w = std::exp(log_mag) * std::pow(t, static_cast<double>(k + m - l)) *
                     std::pow(r, static_cast<double>(n - k + l));
          if ((n - k) % 2 == 1) w = -w;
          out.at(out3, out4) += c * w;
        }
      }
    }
  }
  return out;
}

TwoModeFock displace_fock(const TwoModeFock& v, Amp tau1, Amp tau2) {
  const Matrix d1 = displacement_matrix(tau1, v.dim());
  const Matrix d2 = displacement_matrix(tau2, v.dim());
  const Matrix m = d1 * to_eigen(v) * d2.transpose();
  TwoModeFock out(v.dim());
  for (std::size_t r = 0; r < v.dim(); ++r)
    for (std::size_t c = 0; c < v.dim(); ++c)
      out.at(r, c) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return out;
}

double oracle_protocol_prob(const ProtocolParams& params, const ChannelParams& channel,
                            Protocol which, const OracleOptions& options) {
  params.validate();
  channel.validate();
  const double alpha_prime = params.alpha * std::sqrt(channel.transmittance());
  if (alpha_prime > kOracleMaxAlphaPrime)
    throw TruncationError("|alpha'| = " + std::to_string(alpha_prime) +
                          " exceeds the oracle budget; recommended maximum is " +
                          std::to_string(kOracleMaxAlphaPrime));

  const SuperposedState state = build_analysis_state(params, channel);
  const std::size_t i1 = state.mode_index(modes::beam1);
  const std::size_t i2 = state.mode_index(modes::beam2);
  const std::size_t ea = state.mode_index(modes::env_a);
  const std::size_t eb = state.mode_index(modes::env_b);

  // Per-branch amplitude of the detector pattern, computed in the number basis.
  std::vector<Amp> detector_amp(state.num_branches());

  if (which == Protocol::usd2) {
    const Amp tau{0.0, -alpha_prime};
    const double bound = std::pow(alpha_prime + std::abs(tau), 2);
    std::size_t dim = options.dim_override ? options.dim_override : recommended_dim(bound);
    dim *= options.dim_scale;
    const Matrix d = displacement_matrix(tau, dim);
    auto click_amp = [&](Amp a) {
      const Eigen::VectorXcd out = d * to_eigen(coherent_fock(a, dim));
      return out(1);
    };
    for (std::size_t j = 0; j < state.num_branches(); ++j) {
      const auto& b = state.branches()[j];
      detector_amp[j] = click_amp(b.amps[i1]) * click_amp(b.amps[i2]);
    }
  } else {
    const auto disp = usd4_displacements(alpha_prime, params.phi);
    const double reach = std::max(std::abs(disp.left), std::abs(disp.right));
    const double bound = std::pow(alpha_prime + reach, 2);
    std::size_t dim = options.dim_override ? options.dim_override : recommended_dim(bound);
    dim *= options.dim_scale;
    const FockVector vacuum = basis_state(0, dim);
    auto pair_amp = [&](Amp a) {
      TwoModeFock v = TwoModeFock::tensor(vacuum, coherent_fock(a, dim));
      v = beamsplitter_fock(v, 0.5);
      v = displace_fock(v, disp.left, disp.right);
      return v.at(1, 1);
    };
    for (std::size_t j = 0; j < state.num_branches(); ++j) {
      const auto& b = state.branches()[j];
      detector_amp[j] = pair_amp(b.amps[i1]) * pair_amp(b.amps[i2]);
    }
  }

  Amp total{0.0, 0.0};
  for (std::size_t j = 0; j < state.num_branches(); ++j) {
    const auto& bj = state.branches()[j];
    for (std::size_t k = 0; k < state.num_branches(); ++k) {
      const auto& bk = state.branches()[k];
      const Amp env = overlap(bj.amps[ea], bk.amps[ea]) * overlap(bj.amps[eb], bk.amps[eb]);
      total += std::conj(bj.coeff * detector_amp[j]) * bk.coeff * detector_amp[k] * env;
    }
  }
  return total.real();
}

}  // namespace macrobell::fock
