#include "macrobell/experiment.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "macrobell/error.hpp"
#include "macrobell/numeric.hpp"
#include "macrobell/parallel.hpp"

namespace macrobell {
namespace {

constexpr double kBellThreshold = 1.0 / std::numbers::sqrt2;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream for one (block, fringe setting) cell; depends only on its indices.
std::mt19937_64 block_stream(std::uint64_t seed, std::uint64_t block, std::uint64_t setting) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ block) ^ (setting + 1)));
}

std::uint64_t draw_counts(std::mt19937_64& rng, long long pulses, double p, double accidental_mean) {
  std::uint64_t n = 0;
  if (pulses > 0 && p > 0.0) n += static_cast<std::uint64_t>(std::binomial_distribution<long long>(pulses, std::min(p, 1.0))(rng));
  if (accidental_mean > 0.0)
    n += static_cast<std::uint64_t>(std::poisson_distribution<long long>(accidental_mean)(rng));
  return n;
}

struct LinkPoint {
  double rate_hz;
  double visibility;
};

LinkPoint link_point(const ProtocolParams& params, double loss_db_per_km, double per_arm_km,
                     double source_rate_hz, Protocol which, VisibilityForm form) {
  const double a2 = params.alpha * params.alpha;
  const double received = a2 * ChannelParams{loss_db_per_km, per_arm_km}.transmittance();
  const double v = visibility(a2 - received, params.phi, form);
  const double p_max = protocol_prefactor(which, received, params.phi) * (1.0 + v);
  return {p_max * source_rate_hz, v};
}

}  // namespace

Attenuation attenuate(double alpha, const ChannelParams& channel) {
  if (!(std::isfinite(alpha) && alpha > 0.0)) throw ParameterError("alpha must be finite and > 0");
  channel.validate();
  const double a2 = alpha * alpha;
  Attenuation out;
  out.photons_received = a2 * channel.transmittance();
  out.photons_lost = a2 - out.photons_received;
  // Re-derive the smaller share from the larger so the subtraction is exact
  // and received + lost reproduces a2 bit for bit.
  if (out.photons_received < 0.5 * a2) out.photons_received = a2 - out.photons_lost;
  out.alpha_prime = std::sqrt(out.photons_received);
  return out;
}

CountingRates counting_rates(double p_max, double p_min, double source_rate_hz) {
  if (!(p_max >= 0.0 && p_max <= 1.0 && p_min >= 0.0 && p_min <= 1.0))
    throw ParameterError("probabilities must lie in [0, 1]");
  if (!(source_rate_hz >= 0.0 && std::isfinite(source_rate_hz)))
    throw ParameterError("source rate must be finite and >= 0");
  return {p_max * source_rate_hz, p_min * source_rate_hz};
}

void DetectorSpec::validate() const {
  if (!(std::isfinite(dark_rate_hz) && dark_rate_hz >= 0.0))
    throw ParameterError("dark_rate_hz must be finite and >= 0");
  if (!(std::isfinite(coincidence_window_s) && coincidence_window_s > 0.0))
    throw ParameterError("coincidence_window_s must be finite and > 0");
}

double accidental_rate(const DetectorSpec& det, int n_fold) {
  det.validate();
  if (n_fold < 1) throw ParameterError("n_fold must be >= 1");
  return n_fold * det.dark_rate_hz * std::pow(det.dark_rate_hz * det.coincidence_window_s, n_fold - 1);
}

int detector_count(Protocol which) { return which == Protocol::usd4 ? 4 : 2; }

std::optional<double> visibility_stderr(std::uint64_t counts_max, std::uint64_t counts_min) {
  const double big = static_cast<double>(counts_max);
  const double small = static_cast<double>(counts_min);
  const double total = big + small;
  if (total <= 0.0) return std::nullopt;
  return 2.0 * std::sqrt(big * small / (total * total * total));
}

RunResult monte_carlo_run(const ProtocolParams& params, const ChannelParams& channel,
                          const DetectorSpec& det, const MonteCarloConfig& config, Protocol which) {
  det.validate();
  if (!(config.duration_s >= 0.0 && std::isfinite(config.duration_s)))
    throw ParameterError("duration_s must be finite and >= 0");
  if (!(config.source_rate_hz > 0.0 && std::isfinite(config.source_rate_hz)))
    throw ParameterError("source rate must be finite and > 0");
  if (!(config.block_s > 0.0 && std::isfinite(config.block_s)))
    throw ParameterError("block_s must be finite and > 0");

  const RateReport report = evaluate_protocol(which, params, channel);
  const double acc = accidental_rate(det, detector_count(which));

  RunResult result;
  result.seed = config.seed;
  const auto blocks = static_cast<std::size_t>(std::ceil(config.duration_s / config.block_s));
  result.bins.resize(blocks);

  parallel_for(blocks, config.threads, [&](std::size_t b) {
    CountBin& bin = result.bins[b];
    bin.start_s = static_cast<double>(b) * config.block_s;
    bin.end_s = std::min(config.duration_s, bin.start_s + config.block_s);
    const double len = bin.end_s - bin.start_s;
    const long long pulses = std::llround(len * config.source_rate_hz);
    auto rng_max = block_stream(config.seed, b, 0);
    auto rng_min = block_stream(config.seed, b, 1);
    bin.counts_max = draw_counts(rng_max, pulses, report.p_max, acc * len);
    bin.counts_min = draw_counts(rng_min, pulses, report.p_min, acc * len);
  });

  for (const auto& bin : result.bins) {
    result.counts_max += bin.counts_max;
    result.counts_min += bin.counts_min;
  }
  const double total = static_cast<double>(result.counts_max + result.counts_min);
  if (total > 0.0) {
    result.estimated_visibility =
        (static_cast<double>(result.counts_max) - static_cast<double>(result.counts_min)) / total;
    result.stderr_visibility = visibility_stderr(result.counts_max, result.counts_min);
  }
  return result;
}

double asymptotic_visibility(double alpha, double phi) {
  return visibility(alpha * alpha, phi, VisibilityForm::small_angle);
}

std::string_view to_string(RangeLimit limit) {
  return limit == RangeLimit::rate ? "rate" : "visibility";
}

RangeResult max_range(const ProtocolParams& params, double loss_db_per_km, double rate_floor_hz,
                      double source_rate_hz, Protocol which, const RangeOptions& options) {
  params.validate();
  if (!(loss_db_per_km > 0.0 && std::isfinite(loss_db_per_km)))
    throw ParameterError("range planning needs a finite loss_db_per_km > 0");
  if (!(rate_floor_hz > 0.0)) throw ParameterError("rate floor must be > 0");
  if (!(source_rate_hz > 0.0 && std::isfinite(source_rate_hz)))
    throw ParameterError("source rate must be finite and > 0");
  if (!(options.resolution_km_total > 0.0)) throw ParameterError("resolution must be > 0");

  RangeResult out;
  if (!std::isfinite(rate_floor_hz)) return out;

  auto eval = [&](double d) {
    return link_point(params, loss_db_per_km, d, source_rate_hz, which, options.visibility_form);
  };
  auto feasible = [&](const LinkPoint& p) {
    return p.rate_hz >= rate_floor_hz && p.visibility > kBellThreshold;
  };

  // Beyond d_mono the prefactor and the visibility both fall with distance,
  // so feasibility there is monotone.
  const double sn = std::sin(params.phi);
  const double x0 = params.alpha * params.alpha * sn * sn;
  const double x_stat = which == Protocol::usd4 ? 0.5 : 0.25;
  const double d_mono = x0 > x_stat ? -10.0 * std::log10(x_stat / x0) / loss_db_per_km : 0.0;

  double d_hi = std::max(d_mono, 1.0);
  while (feasible(eval(d_hi))) {
    d_hi *= 2.0;
    if (d_hi > 1e7) throw ParameterError("range search diverged");
  }

  constexpr int kScan = 4096;
  int last = -1;
  for (int i = 0; i <= kScan; ++i)
    if (feasible(eval(d_hi * i / kScan))) last = i;
  if (last < 0) return out;

  double lo = d_hi * last / kScan;
  double hi = d_hi * (last + 1) / kScan;
  const double tol = 0.5 * options.resolution_km_total;  // per arm
  if (last < kScan) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (feasible(eval(mid)) ? lo : hi) = mid;
    }
  }

  const LinkPoint at = eval(lo);
  const LinkPoint beyond = eval(hi);
  out.feasible = true;
  out.per_arm_km = lo;
  out.total_km = 2.0 * lo;
  out.r_max_hz = at.rate_hz;
  out.visibility = at.visibility;
  out.limit = beyond.visibility <= kBellThreshold ? RangeLimit::visibility : RangeLimit::rate;
  return out;
}

PhiOptimum optimize_phi(double alpha, const ChannelParams& channel, Protocol which,
                        const PhiOptions& options) {
  const Attenuation att = attenuate(alpha, channel);
  PhiOptimum out;

  double phi_hi = std::numbers::pi / 2.0;
  if (options.constrain_visibility && att.photons_lost > 0.0) {
    // exp(-4 N sin^2 phi) = 1/sqrt(2)  <=>  sin^2 phi = ln 2 / (8 N)
    const double s2 = std::numbers::ln2 / (8.0 * att.photons_lost);
    if (s2 < 1.0) phi_hi = std::asin(std::sqrt(s2)) * (1.0 - 1e-12);
  }
  if (!(phi_hi > 0.0)) return out;
  out.feasible = true;

  const double received = att.photons_received;
  auto objective = [&](double phi) {
    return phi > 0.0 ? log_protocol_prefactor(which, received, phi)
                     : -std::numeric_limits<double>::infinity();
  };
  const auto [phi, logp] = golden_section_max(objective, 0.0, phi_hi, options.tolerance);
  out.phi = phi;
  out.visibility = visibility(att.photons_lost, phi, VisibilityForm::exact);
  out.p_max = protocol_prefactor(which, received, phi) * (1.0 + out.visibility);
  out.degenerate = !(received > 0.0) || !std::isfinite(logp) || out.p_max < 1e-300;
  out.constrained = phi_hi < std::numbers::pi / 2.0 && phi_hi - phi < 1e-9 * phi_hi + options.tolerance;
  return out;
}

}  // namespace macrobell
