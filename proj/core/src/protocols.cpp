#include "macrobell/protocols.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "macrobell/error.hpp"
#include "macrobell/numeric.hpp"

namespace macrobell {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr Amp kI{0.0, 1.0};

// One term of the pre-measurement superposition. The coefficient is
// sign * exp(i (s1 sigma1 + s2 sigma2)) / 8; net_a and net_b are the total
// conditional phases of beam 1 and beam 2 in units of phi; env is +1 for the
// |gamma+>|delta-> source branch and -1 for |gamma->|delta+>.
struct Term {
  int sign;
  int s1;
  int s2;
  int net_a;
  int net_b;
  int env;
};

constexpr std::array<Term, 8> kAnalysisTerms{{
    {+1, 0, 1, +2, -2, +1},
    {-1, 0, 0, +2, 0, +1},
    {-1, 1, 1, 0, -2, +1},
    {+1, 1, 0, 0, 0, +1},
    {-1, 0, 1, 0, 0, -1},
    {+1, 0, 0, 0, +2, -1},
    {+1, 1, 1, -2, 0, -1},
    {-1, 1, 0, -2, +2, -1},
}};

double attenuated_amplitude(const ProtocolParams& params, const ChannelParams& channel) {
  return params.alpha * std::sqrt(channel.transmittance());
}

SuperposedState pipeline_usd4_state(const ProtocolParams& params, const ChannelParams& channel,
                                    const EvalOptions& options) {
  using namespace modes;
  SuperposedState s = build_analysis_state(params, channel);
  s = add_vacuum_mode(s, vac_a);
  s = add_vacuum_mode(s, vac_b);
  s = apply_beam_splitter(s, {0.5, vac_a, beam1, out_a3, out_a4});
  s = apply_beam_splitter(s, {0.5, vac_b, beam2, out_b3, out_b4});
  const auto d = usd4_displacements(attenuated_amplitude(params, channel), params.phi);
  s = apply_displacement(s, out_a3, d.left, options.displacement);
  s = apply_displacement(s, out_a4, d.right, options.displacement);
  s = apply_displacement(s, out_b3, d.left, options.displacement);
  s = apply_displacement(s, out_b4, d.right, options.displacement);
  return s;
}

double detect(const SuperposedState& s, std::span<const ModeLabel> detectors,
              DetectionModel model) {
  if (model == DetectionModel::click) return product_expectation(s, detectors, click_kernel);
  SuperposedState projected = s;
  for (const auto& m : detectors) projected = project_single_photon(projected, m);
  return projected.norm_sq();
}

double fringe_visibility(double p_max, double p_min) {
  const double sum = p_max + p_min;
  return sum > 0.0 ? (p_max - p_min) / sum : 0.0;
}

using ProbabilityFn = double (*)(const ProtocolParams&, const ChannelParams&, const EvalOptions&);

double closed_route(Protocol which, const ProtocolParams& params, const ChannelParams& channel,
                    const EvalOptions& options) {
  const double a2 = params.alpha * params.alpha;
  const double received = a2 * channel.transmittance();
  const double lost = a2 - received;
  const double ds = params.sigma1 - params.sigma2;
  return which == Protocol::usd4
             ? usd4_probability_closed(received, lost, params.phi, ds, options.visibility_form)
             : usd2_probability_closed(received, lost, params.phi, ds, options.visibility_form);
}

RateReport make_report(Protocol which, const ProtocolParams& params, const ChannelParams& channel,
                       const EvalOptions& options) {
  params.validate();
  channel.validate();
  RateReport r;
  ProtocolParams at_max = params;
  at_max.sigma1 = params.sigma2 + kPi;
  ProtocolParams at_min = params;
  at_min.sigma1 = params.sigma2;
  r.p_success = protocol_probability(which, params, channel, options);
  r.p_max = protocol_probability(which, at_max, channel, options);
  r.p_min = protocol_probability(which, at_min, channel, options);
  r.visibility = fringe_visibility(r.p_max, r.p_min);
  r.chsh_s = 2.0 * std::numbers::sqrt2 * r.visibility;
  return r;
}

}  // namespace

void ProtocolParams::validate() const {
  if (!(std::isfinite(alpha) && alpha > 0.0))
    throw ParameterError("alpha must be finite and > 0, got " + std::to_string(alpha));
  if (!std::isfinite(phi)) throw ParameterError("phi must be finite");
  if (!std::isfinite(sigma1) || !std::isfinite(sigma2))
    throw ParameterError("sigma1 and sigma2 must be finite");
}

bool ProtocolParams::in_protocol_regime() const { return std::abs(phi) < kPi / 4.0; }

std::string_view to_string(Protocol p) { return p == Protocol::usd2 ? "usd2" : "usd4"; }

Protocol parse_protocol(std::string_view s) {
  if (s == "usd2") return Protocol::usd2;
  if (s == "usd4") return Protocol::usd4;
  throw ParameterError("unknown protocol '" + std::string(s) + "' (expected usd2 or usd4)");
}

SuperposedState build_source_state(const ProtocolParams& params) {
  params.validate();
  const Amp plus = std::polar(params.alpha, params.phi);
  const Amp minus = std::polar(params.alpha, -params.phi);
  const double c = 1.0 / std::numbers::sqrt2;
  return SuperposedState({modes::beam1, modes::beam2},
                         {Branch{Amp{c, 0.0}, {plus, minus}}, Branch{Amp{c, 0.0}, {minus, plus}}});
}

SuperposedState build_analysis_state(const ProtocolParams& params, const ChannelParams& channel) {
  params.validate();
  channel.validate();
  const double eta = channel.transmittance();
  const double kept = params.alpha * std::sqrt(eta);
  const double leaked = params.alpha * std::sqrt(1.0 - eta);
  const double phi = params.phi;

  std::vector<Branch> branches;
  branches.reserve(kAnalysisTerms.size());
  for (const auto& t : kAnalysisTerms) {
    const Amp coeff = static_cast<double>(t.sign) / 8.0 *
                      std::polar(1.0, t.s1 * params.sigma1 + t.s2 * params.sigma2);
    branches.push_back(Branch{coeff,
                              {kI * std::polar(kept, t.net_a * phi),
                               kI * std::polar(kept, t.net_b * phi),
                               std::polar(leaked, t.env * phi),
                               std::polar(leaked, -t.env * phi)}});
  }
  return SuperposedState({modes::beam1, modes::beam2, modes::env_a, modes::env_b},
                         std::move(branches));
}

SuperposedState apply_heralded_interferometer(const SuperposedState& state,
                                              std::span<const KerrCoupling> couplings, double phi,
                                              double upper_phase, double lower_phase) {
  std::vector<std::size_t> idx;
  for (const auto& c : couplings) idx.push_back(state.mode_index(c.mode));
  const Amp upper = 0.5 * std::polar(1.0, upper_phase);
  const Amp lower = -0.5 * std::polar(1.0, lower_phase);

  std::vector<Branch> out;
  out.reserve(2 * state.num_branches());
  for (const auto& b : state.branches()) {
    Branch up{b.coeff * upper, b.amps};
    Branch down{b.coeff * lower, b.amps};
    for (std::size_t k = 0; k < idx.size(); ++k) {
      up.amps[idx[k]] *= std::polar(1.0, couplings[k].sign * phi);
      down.amps[idx[k]] *= std::polar(1.0, -couplings[k].sign * phi);
    }
    out.push_back(std::move(up));
    out.push_back(std::move(down));
  }
  return SuperposedState(state.registry(), std::move(out));
}

SuperposedState build_analysis_state_compositional(const ProtocolParams& params,
                                                   const ChannelParams& channel) {
  params.validate();
  channel.validate();
  using namespace modes;
  const double eta = channel.transmittance();

  SuperposedState s = SuperposedState::product({beam1, beam2}, {params.alpha, params.alpha});
  const std::array<KerrCoupling, 2> source{{{beam1, +1}, {beam2, -1}}};
  s = apply_heralded_interferometer(s, source, params.phi, 0.0, 0.0);
  s = apply_loss(s, {eta, beam1, env_a});
  s = apply_loss(s, {eta, beam2, env_b});
  s = apply_phase(s, beam1, kPi / 2.0);
  s = apply_phase(s, beam2, kPi / 2.0);
  const std::array<KerrCoupling, 1> station_a{{{beam1, +1}}};
  const std::array<KerrCoupling, 1> station_b{{{beam2, -1}}};
  s = apply_heralded_interferometer(s, station_a, params.phi, 0.0, params.sigma1);
  s = apply_heralded_interferometer(s, station_b, params.phi, params.sigma2, 0.0);
  return s;
}

Usd4Displacements usd4_displacements(double alpha_prime, double phi) {
  const double h = alpha_prime / std::numbers::sqrt2;
  const double s = std::sin(2.0 * phi);
  const double c = std::cos(2.0 * phi);
  return {Amp{-h * s, -h * c}, Amp{h * s, -h * c}};
}

Amp usd2_displacement(double alpha_prime) { return Amp{0.0, -alpha_prime}; }

double visibility(double n_lost, double phi, VisibilityForm form) {
  if (!(n_lost >= 0.0)) throw ParameterError("n_lost must be >= 0");
  const double s = form == VisibilityForm::exact ? std::sin(phi) : phi;
  return std::exp(-4.0 * n_lost * s * s);
}

double usd4_probability_pipeline(const ProtocolParams& params, const ChannelParams& channel,
                                 const EvalOptions& options) {
  using namespace modes;
  const SuperposedState s = pipeline_usd4_state(params, channel, options);
  const std::array<ModeLabel, 4> detectors{out_a3, out_a4, out_b3, out_b4};
  return detect(s, detectors, options.detection);
}

double usd2_probability_pipeline(const ProtocolParams& params, const ChannelParams& channel,
                                 const EvalOptions& options) {
  using namespace modes;
  SuperposedState s = build_analysis_state(params, channel);
  const Amp tau = usd2_displacement(attenuated_amplitude(params, channel));
  s = apply_displacement(s, beam1, tau, options.displacement);
  s = apply_displacement(s, beam2, tau, options.displacement);
  const std::array<ModeLabel, 2> detectors{beam1, beam2};
  return detect(s, detectors, options.detection);
}

double protocol_prefactor(Protocol which, double alpha_prime_sq, double phi) {
  const double sn = std::sin(phi);
  const double x = alpha_prime_sq * sn * sn;
  const double x2 = x * x;
  const double power = which == Protocol::usd4 ? x2 * x2 : x2;
  return 0.5 * power * std::exp(-8.0 * x);
}

double log_protocol_prefactor(Protocol which, double alpha_prime_sq, double phi) {
  const double sn = std::sin(phi);
  const double x = alpha_prime_sq * sn * sn;
  const double k = which == Protocol::usd4 ? 4.0 : 2.0;
  return k * std::log(x) - 8.0 * x - std::numbers::ln2;
}

double usd4_probability_closed(double alpha_prime_sq, double n_lost, double phi,
                               double delta_sigma, VisibilityForm form) {
  return protocol_prefactor(Protocol::usd4, alpha_prime_sq, phi) *
         (1.0 - visibility(n_lost, phi, form) * std::cos(delta_sigma));
}

double usd2_probability_closed(double alpha_prime_sq, double n_lost, double phi,
                               double delta_sigma, VisibilityForm form) {
  return protocol_prefactor(Protocol::usd2, alpha_prime_sq, phi) *
         (1.0 - visibility(n_lost, phi, form) * std::cos(delta_sigma));
}

double protocol_probability(Protocol which, const ProtocolParams& params,
                            const ChannelParams& channel, const EvalOptions& options) {
  if (options.route == Route::closed_form) return closed_route(which, params, channel, options);
  return which == Protocol::usd4 ? usd4_probability_pipeline(params, channel, options)
                                 : usd2_probability_pipeline(params, channel, options);
}

RateReport protocol_usd4(const ProtocolParams& params, const ChannelParams& channel,
                         const EvalOptions& options) {
  return make_report(Protocol::usd4, params, channel, options);
}

RateReport protocol_usd2(const ProtocolParams& params, const ChannelParams& channel,
                         const EvalOptions& options) {
  return make_report(Protocol::usd2, params, channel, options);
}

RateReport evaluate_protocol(Protocol which, const ProtocolParams& params,
                             const ChannelParams& channel, const EvalOptions& options) {
  return make_report(which, params, channel, options);
}

ChshAngles optimal_chsh_angles() { return {0.0, kPi / 2.0, kPi / 4.0, 3.0 * kPi / 4.0}; }

double chsh_s(double visibility, const ChshAngles& g) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw ParameterError("visibility must lie in [0, 1]");
  const auto e = [](double x, double y) { return std::cos(x - y); };
  return visibility *
         std::abs(e(g.a, g.b) - e(g.a, g.b_prime) + e(g.a_prime, g.b) + e(g.a_prime, g.b_prime));
}

ChshOptimum maximize_chsh(double visibility) {
  // S depends only on angle differences, so a = 0 is fixed and the search
  // runs over (a', b, b').
  using Point = std::array<double, 3>;
  const auto angles = [](const Point& p) { return ChshAngles{0.0, p[0], p[1], p[2]}; };
  const auto score = [&](const Point& p) { return chsh_s(visibility, angles(p)); };

  constexpr int kGrid = 24;
  const double step = 2.0 * kPi / kGrid;
  Point best{};
  double best_s = score(best);
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        const Point p{i * step, j * step, k * step};
        const double s = score(p);
        if (s > best_s) {
          best = p;
          best_s = s;
        }
      }

  for (int sweep = 0; sweep < 30; ++sweep) {
    for (std::size_t c = 0; c < best.size(); ++c) {
      auto along = [&](double x) {
        Point p = best;
        p[c] = x;
        return score(p);
      };
      const auto [x, s] = golden_section_max(along, best[c] - step, best[c] + step, 1e-13);
      if (s >= best_s) {
        best[c] = x;
        best_s = s;
      }
    }
  }
  return {best_s, angles(best)};
}

}  // namespace macrobell
