// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "macrobell/experiment.hpp"
#include "macrobell/fock_oracle.hpp"
#include "macrobell/parallel.hpp"
#include "macrobell/protocols.hpp"

using namespace macrobell;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Verdict()> check;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool within_rel(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

std::string six_sig(double x) { return fmt("%.6g", x); }

const ProtocolParams kReference{100.0, 0.0028, std::numbers::pi, 0.0};
const ChannelParams kSeventyPerArm{0.15, 70.0};
const ChannelParams kTwoHundredPerArm{0.15, 200.0};

struct RandomPoint {
  ProtocolParams params;
  ChannelParams channel;
  double ap2, nl, phi, ds;
};

RandomPoint make_point(double ap, double nl, double phi, double s1, double s2) {
  const double a2 = ap * ap + nl;
  return {{std::sqrt(a2), phi, s1, s2}, ChannelParams::from_transmittance(ap * ap / a2), ap * ap, nl, phi, s1 - s2};
}

Verdict link_budget() {
  const auto a = attenuate(100.0, kSeventyPerArm);
  const auto b = attenuate(100.0, kTwoHundredPerArm);
  const bool ok = six_sig(a.photons_received) == "891.251" && six_sig(a.photons_lost) == "9108.75" &&
                  six_sig(b.photons_received) == "10" && six_sig(b.photons_lost) == "9990";
  return {ok, fmt("70 km/arm: |a'|^2=%s N_L=%s; 200 km/arm: |a'|^2=%s N_L=%s", six_sig(a.photons_received).c_str(),
                  six_sig(a.photons_lost).c_str(), six_sig(b.photons_received).c_str(), six_sig(b.photons_lost).c_str())};
}

Verdict four_detector_regression() {
  const auto r = protocol_usd4(kReference, kSeventyPerArm);
  const bool ok = within_rel(r.p_max, 1.97e-9, 0.02) && within_rel(r.p_min, 0.28e-9, 0.02) &&
                  std::abs(r.visibility - 0.75) <= 0.005;
  return {ok, fmt("p_max=%.4e p_min=%.4e v=%.5f", r.p_max, r.p_min, r.visibility)};
}

Verdict two_detector_regression() {
  const auto r = protocol_usd2(kReference, kTwoHundredPerArm);
  const double s_star = maximize_chsh(r.visibility).s;
  const bool ok = within_rel(r.p_max, 5.3e-9, 0.02) && within_rel(r.p_min, 0.83e-9, 0.02) &&
                  std::abs(r.visibility - 0.73) <= 0.005 && std::abs(r.visibility - 0.7308) <= 0.005 &&
                  std::abs(s_star - 2.067) <= 0.005 && s_star > 2.0 &&
                  std::abs(r.chsh_s - 2.0 * std::numbers::sqrt2 * r.visibility) <= 1e-12;
  return {ok, fmt("p_max=%.4e p_min=%.4e v=%.5f S*=%.4f", r.p_max, r.p_min, r.visibility, s_star)};
}

Verdict pipeline_closed_form() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ap_d(0.5, 40.0), nl_d(0.0, 1e4), phi_d(1e-3, 0.3), s_d(-M_PI, M_PI);
  double worst = 0.0;
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const double ap = ap_d(gen), nl = nl_d(gen), phi = phi_d(gen), s1 = s_d(gen), s2 = s_d(gen);
    const auto pt = make_point(ap, nl, phi, s1, s2);
    const double pairs[2][2] = {
        {usd4_probability_pipeline(pt.params, pt.channel), usd4_probability_closed(pt.ap2, nl, phi, pt.ds)},
        {usd2_probability_pipeline(pt.params, pt.channel), usd2_probability_closed(pt.ap2, nl, phi, pt.ds)}};
    for (const auto& p : pairs) {
      const double scale = std::max(std::abs(p[0]), std::abs(p[1]));
      const double rel = scale > 0.0 ? std::abs(p[0] - p[1]) / scale : 0.0;
      worst = std::max(worst, rel);
      ++compared;
    }
  }
  return {worst <= 1e-10, fmt("%d comparisons, worst relative deviation %.3e", compared, worst)};
}

Verdict fock_oracle() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> ap_d(0.2, 3.0), nl_d(0.0, 5.0), phi_d(0.01, 0.5), s_d(-M_PI, M_PI);
  struct Case {
    RandomPoint pt;
    Protocol which;
    double err = 0.0, shift = 0.0;
  };
  std::vector<Case> cases;
  for (int i = 0; i < 12; ++i)
    for (auto which : {Protocol::usd2, Protocol::usd4})
      cases.push_back({make_point(ap_d(gen), nl_d(gen), phi_d(gen), s_d(gen), 0.0), which});
  parallel_for(cases.size(), 0, [&](std::size_t i) {
    auto& c = cases[i];
    const double oracle = fock::oracle_protocol_prob(c.pt.params, c.pt.channel, c.which);
    const double doubled = fock::oracle_protocol_prob(c.pt.params, c.pt.channel, c.which, {2, 0});
    c.err = std::abs(oracle - protocol_probability(c.which, c.pt.params, c.pt.channel));
    c.shift = std::abs(doubled - oracle);
  });
  double worst_err = 0.0, worst_shift = 0.0;
  for (const auto& c : cases) {
    worst_err = std::max(worst_err, c.err);
    worst_shift = std::max(worst_shift, c.shift);
  }
  return {worst_err <= 1e-8 && worst_shift < 1e-9,
          fmt("%zu points (|a'|<=3), worst |oracle-analytic|=%.2e, worst doubling shift=%.2e", cases.size(),
              worst_err, worst_shift)};
}

Verdict scaling_laws() {
  const auto slope = [](Protocol which) {
    const auto lo = make_point(2.0, 0.0, 1e-4, M_PI, 0.0);
    const auto hi = make_point(2.0, 0.0, 1e-3, M_PI, 0.0);
    return (std::log(evaluate_protocol(which, hi.params, hi.channel).p_max) -
            std::log(evaluate_protocol(which, lo.params, lo.channel).p_max)) /
           std::log(10.0);
  };
  const double s4 = slope(Protocol::usd4), s2 = slope(Protocol::usd2);
  return {std::abs(s4 - 8.0) <= 0.01 && std::abs(s2 - 4.0) <= 0.01,
          fmt("log-log slope usd4=%.4f usd2=%.4f", s4, s2)};
}

Verdict range_doubling() {
  bool ok = true;
  std::string detail;
  for (double floor : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    const auto r2 = max_range(kReference, 0.15, floor, 1e9, Protocol::usd2);
    const auto r4 = max_range(kReference, 0.15, floor, 1e9, Protocol::usd4);
    const double ratio = r2.total_km / r4.total_km;
    ok = ok && r2.feasible && r4.feasible && ratio >= 1.8 && ratio <= 2.2;
    detail += fmt("%s%g/s: %.1f/%.1f km = %.2f", detail.empty() ? "" : "; ", floor, r2.total_km, r4.total_km, ratio);
  }
  return {ok, detail + " (target ratio 1.8..2.2)"};
}

Verdict rate_limited_regime() {
  const double v_inf = asymptotic_visibility(100.0, 0.0028);
  const DetectorSpec det{0.0008, 1e-9};
  const double acc2 = accidental_rate(det, 2), acc4 = accidental_rate(det, 4);
  const double sig2 = protocol_usd2(kReference, kTwoHundredPerArm).p_min * 1e9;
  const double sig4 = protocol_usd4(kReference, kSeventyPerArm).p_min * 1e9;
  const bool ok = std::abs(v_inf - 0.7308) <= 5e-5 && v_inf > 1.0 / std::numbers::sqrt2 && acc2 <= 1e-10 * sig2 &&
                  acc4 <= 1e-10 * sig4;
  return {ok, fmt("v_inf=%.5f; accidentals 2-fold %.2e vs %.3g/s, 4-fold %.2e vs %.3g/s", v_inf, acc2, sig2, acc4, sig4)};
}

std::string serialize(const RunResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.seed << ' ' << r.counts_max << ' ' << r.counts_min << ' ' << r.estimated_visibility.value_or(-1) << ' '
     << r.stderr_visibility.value_or(-1) << '\n';
  for (const auto& b : r.bins) os << b.start_s << ',' << b.end_s << ',' << b.counts_max << ',' << b.counts_min << '\n';
  return os.str();
}

Verdict monte_carlo() {
  MonteCarloConfig cfg;
  cfg.duration_s = 1e4;
  cfg.source_rate_hz = 1e9;
  cfg.seed = 424242;
  cfg.threads = 1;
  const RunResult base = monte_carlo_run(kReference, kTwoHundredPerArm, {}, cfg, Protocol::usd2);
  const std::string ref = serialize(base);
  bool identical = true;
  for (unsigned t : {2u, 3u, 8u, 0u}) {
    cfg.threads = t;
    identical = identical && serialize(monte_carlo_run(kReference, kTwoHundredPerArm, {}, cfg, Protocol::usd2)) == ref;
  }
  const double v = base.estimated_visibility.value_or(0.0), se = base.stderr_visibility.value_or(0.0);
  const bool within = se > 0.0 && std::abs(v - 0.7308) <= 3.0 * se;
  return {within && identical, fmt("v=%.4f +/- %.4f (|dv|=%.2f sigma), counts %llu/%llu, partitions identical: %s", v,
                                   se, se > 0 ? std::abs(v - 0.7308) / se : 0.0,
                                   static_cast<unsigned long long>(base.counts_max),
                                   static_cast<unsigned long long>(base.counts_min), identical ? "yes" : "no")};
}

Verdict displacement_convention() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ap_d(0.5, 40.0), nl_d(0.0, 1e4), phi_d(1e-3, 0.3), s_d(-M_PI, M_PI);
  EvalOptions free;
  free.displacement = DisplacementConvention::phase_free;
  std::vector<RandomPoint> points{make_point(std::sqrt(10.0), 9990.0, 0.0028, M_PI, 0.0),
                                  make_point(std::sqrt(10.0), 9990.0, 0.0028, 0.0, 0.0)};
  for (int i = 0; i < 100; ++i) points.push_back(make_point(ap_d(gen), nl_d(gen), phi_d(gen), s_d(gen), s_d(gen)));
  double worst = 0.0;
  for (const auto& pt : points) {
    const double full = usd2_probability_pipeline(pt.params, pt.channel);
    const double dropped = usd2_probability_pipeline(pt.params, pt.channel, free);
    const double scale = std::max(std::abs(full), std::abs(dropped));
    if (scale > 0.0) worst = std::max(worst, std::abs(full - dropped) / scale);
  }
  return {worst <= 1e-12, fmt("%zu points, worst relative deviation %.3e", points.size(), worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"link_budget", 0.01, link_budget},
      {"four_detector_rates", 0.1, four_detector_regression},
      {"two_detector_rates_and_bell_violation", 0.1, two_detector_regression},
      {"pipeline_matches_closed_form", 1.0, pipeline_closed_form},
      {"fock_oracle_agreement", 60.0, fock_oracle},
      {"scaling_laws", 0.1, scaling_laws},
      {"range_doubling", 5.0, range_doubling},
      {"rate_limited_regime", 0.1, rate_limited_regime},
      {"monte_carlo_statistics", 30.0, monte_carlo},
      {"displacement_convention", 1.0, displacement_convention},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  %-40s %s [%.3f s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), v.detail.c_str(), secs,
                in_time ? "" : ", over budget");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
