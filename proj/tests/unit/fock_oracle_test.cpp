#include "macrobell/fock_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "macrobell/error.hpp"
#include "test_support.hpp"

using namespace macrobell;
using namespace macrobell::fock;
using macrobell::testing::random_amp;
using macrobell::testing::uniform;

namespace {

Amp inner(const FockVector& a, const FockVector& b) {
  Amp s = 0.0;
  for (std::size_t n = 0; n < a.dim(); ++n) s += std::conj(a[n]) * b[n];
  return s;
}

}  // namespace

TEST(CoherentFock, Vacuum) {
  const auto v = coherent_fock(0.0, 16);
  EXPECT_EQ(v[0], Amp(1.0, 0.0));
  for (std::size_t n = 1; n < 16; ++n) EXPECT_EQ(v[n], Amp(0.0, 0.0));
}

TEST(CoherentFock, SinglePhotonWeight) {
  EXPECT_NEAR(std::norm(coherent_fock(1.0, 32)[1]), 0.36787944117144233, 1e-15);
}

TEST(CoherentFock, TruncationDeficit) {
  EXPECT_LT(std::abs(coherent_fock(3.0, 64).norm_deficit()), 1e-10);
  for (double m : {0.0, 1.0, 9.0, 16.0, 50.0}) {
    const std::size_t d = recommended_dim(m);
    EXPECT_LT(std::abs(coherent_fock(std::sqrt(m), d).norm_deficit()), 1e-10) << "mean " << m;
  }
}

TEST(CoherentFock, RefusesBelowFloor) {
  EXPECT_EQ(minimum_dim(9.0), 14u);
  EXPECT_THROW(coherent_fock(3.0, 13), TruncationError);
  EXPECT_NO_THROW(coherent_fock(3.0, 14));
}

TEST(DisplaceFock, ZeroIsIdentity) {
  const auto v = coherent_fock(Amp(0.5, 0.2), 30);
  const auto d = displace_fock(v, 0.0);
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(std::abs(d[n] - v[n]), 0.0, 1e-14);
}

TEST(DisplaceFock, ReturnsToVacuum) {
  const auto v = coherent_fock(Amp(0.0, 2.0), recommended_dim(4.0));
  const auto d = displace_fock(v, Amp(0.0, -2.0));
  EXPECT_GT(std::norm(d[0]), 1.0 - 1e-8);
}

TEST(DisplaceFock, PhaseConvention) {
  std::mt19937_64 gen(41);
  for (int i = 0; i < 20; ++i) {
    const Amp nu = random_amp(gen, 2.0), tau = random_amp(gen, 2.0);
    const std::size_t dim = recommended_dim(std::pow(std::abs(nu) + std::abs(tau), 2));
    const auto d = displace_fock(coherent_fock(nu, dim), tau);
    const Amp ov = inner(coherent_fock(nu + tau, dim), d);
    EXPECT_LT(std::abs(1.0 - std::abs(ov)), 1e-8);
    EXPECT_LT(std::abs(ov - std::polar(1.0, std::imag(tau * std::conj(nu)))), 1e-8);
  }
}

TEST(DisplaceFock, InversePair) {
  const auto v = coherent_fock(Amp(-0.3, 0.8), 60);
  const auto back = displace_fock(displace_fock(v, Amp(1.0, 0.5)), Amp(-1.0, -0.5));
  for (std::size_t n = 0; n < 60; ++n) EXPECT_LT(std::abs(back[n] - v[n]), 1e-8);
}

TEST(DisplaceFock, ReportsInsufficientDimension) {
  EXPECT_THROW(displace_fock(coherent_fock(0.0, 12), Amp(3.0, 0.0)), TruncationError);
}

TEST(DisplaceFock, PreservesNorm) {
  const auto v = coherent_fock(Amp(1.0, -1.0), 70);
  EXPECT_NEAR(displace_fock(v, Amp(0.7, 1.3)).norm_sq(), v.norm_sq(), 1e-10);
}

TEST(BeamSplitterFock, ZeroIsIdentity) {
  const auto t = TwoModeFock::tensor(coherent_fock(0.7, 20), coherent_fock(Amp(0, 1), 20));
  const auto out = beamsplitter_fock(t, 0.0);
  for (std::size_t n = 0; n < 20; ++n)
    for (std::size_t m = 0; m < 20; ++m) EXPECT_LT(std::abs(out.at(n, m) - t.at(n, m)), 1e-14);
}

TEST(BeamSplitterFock, CoherentInputSplitsEvenly) {
  const std::size_t dim = 40;
  const auto out = beamsplitter_fock(TwoModeFock::tensor(basis_state(0, dim), coherent_fock(1.0, dim)), 0.5);
  const auto expect = TwoModeFock::tensor(coherent_fock(1.0 / std::sqrt(2.0), dim),
                                          coherent_fock(1.0 / std::sqrt(2.0), dim));
  Amp f = 0.0;
  for (std::size_t n = 0; n < dim; ++n)
    for (std::size_t m = 0; m < dim; ++m) f += std::conj(expect.at(n, m)) * out.at(n, m);
  EXPECT_GT(std::norm(f), 1.0 - 1e-8);
}

TEST(BeamSplitterFock, SinglePhotonHalves) {
  const auto out = beamsplitter_fock(TwoModeFock::tensor(basis_state(1, 4), basis_state(0, 4)), 0.5);
  EXPECT_NEAR(std::norm(out.at(1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(out.at(0, 1)), 0.5, 1e-15);
}

TEST(BeamSplitterFock, Unitary) {
  std::mt19937_64 gen(42);
  for (int i = 0; i < 10; ++i) {
    const std::size_t dim = 45;
    const auto t = TwoModeFock::tensor(coherent_fock(random_amp(gen, 2.0), dim),
                                       coherent_fock(random_amp(gen, 2.0), dim));
    EXPECT_NEAR(beamsplitter_fock(t, uniform(gen, 0, 1)).norm_sq(), t.norm_sq(), 1e-10);
  }
  EXPECT_THROW(beamsplitter_fock(TwoModeFock(4), 1.5), ParameterError);
}

namespace {

struct OraclePoint {
  ProtocolParams params;
  ChannelParams channel;
  double ap2;
  double nl;
};

OraclePoint oracle_point(double ap, double nl, double phi, double ds) {
  const double a2 = ap * ap + nl;
  return {{std::sqrt(a2), phi, ds, 0.0}, ChannelParams::from_transmittance(ap * ap / a2), ap * ap, nl};
}

}  // namespace

TEST(Oracle, ZeroPhase) {
  const auto pt = oracle_point(2.0, 1.0, 0.0, M_PI);
  EXPECT_NEAR(oracle_protocol_prob(pt.params, pt.channel, Protocol::usd2), 0.0, 1e-14);
  EXPECT_NEAR(oracle_protocol_prob(pt.params, pt.channel, Protocol::usd4), 0.0, 1e-14);
}

TEST(Oracle, NamedPoints) {
  const auto a = oracle_point(1.5, 0.5, 0.2, 0.0);
  EXPECT_NEAR(oracle_protocol_prob(a.params, a.channel, Protocol::usd2),
              usd2_probability_closed(a.ap2, a.nl, 0.2, 0.0), 1e-8);
  const auto b = oracle_point(2.0, 1.0, 0.3, M_PI);
  EXPECT_NEAR(oracle_protocol_prob(b.params, b.channel, Protocol::usd4),
              usd4_probability_closed(b.ap2, b.nl, 0.3, M_PI), 1e-8);
  EXPECT_NEAR(oracle_protocol_prob(b.params, b.channel, Protocol::usd4),
              usd4_probability_pipeline(b.params, b.channel), 1e-8);
  const auto c = oracle_point(1.5, 0.5, 0.2, M_PI / 3.0);
  EXPECT_NEAR(oracle_protocol_prob(c.params, c.channel, Protocol::usd2),
              usd2_probability_pipeline(c.params, c.channel), 1e-8);
}

TEST(Oracle, AgreesWithAnalyticAtRandomPoints) {
  std::mt19937_64 gen(43);
  for (int i = 0; i < 20; ++i) {
    const double ap = uniform(gen, 0.2, 3.0), nl = uniform(gen, 0.0, 5.0), phi = uniform(gen, 0.01, 0.5);
    const double ds = uniform(gen, -M_PI, M_PI);
    const auto pt = oracle_point(ap, nl, phi, ds);
    for (auto which : {Protocol::usd2, Protocol::usd4}) {
      const double oracle = oracle_protocol_prob(pt.params, pt.channel, which);
      const double analytic = protocol_probability(which, pt.params, pt.channel);
      EXPECT_NEAR(oracle, analytic, 1e-8) << to_string(which) << " ap " << ap << " phi " << phi;
    }
  }
}

TEST(Oracle, DimensionDoublingConverged) {
  std::mt19937_64 gen(44);
  for (int i = 0; i < 8; ++i) {
    const auto pt = oracle_point(uniform(gen, 0.5, 3.0), uniform(gen, 0.0, 2.0), uniform(gen, 0.05, 0.5), 2.0);
    for (auto which : {Protocol::usd2, Protocol::usd4}) {
      const double base = oracle_protocol_prob(pt.params, pt.channel, which);
      const double doubled = oracle_protocol_prob(pt.params, pt.channel, which, {2, 0});
      EXPECT_LT(std::abs(base - doubled), 1e-9);
    }
  }
}

TEST(Oracle, RefusesLargeAmplitude) {
  const auto pt = oracle_point(50.0, 1.0, 0.01, 0.0);
  EXPECT_THROW(oracle_protocol_prob(pt.params, pt.channel, Protocol::usd2), TruncationError);
  const auto edge = oracle_point(kOracleMaxAlphaPrime * 1.01, 0.0, 0.01, 0.0);
  EXPECT_THROW(oracle_protocol_prob(edge.params, edge.channel, Protocol::usd4), TruncationError);
}
