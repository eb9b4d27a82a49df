#include "macrobell_cli/commands.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrobell/error.hpp"
#include "macrobell/fock_oracle.hpp"
#include "macrobell/parallel.hpp"
#include "macrobell_cli/output.hpp"

namespace macrobell::cli {
namespace {

using nlohmann::ordered_json;
using Rows = std::vector<std::pair<std::string, std::string>>;

constexpr double kSqrt2 = std::numbers::sqrt2;

// JSON numbers carry the same 12 significant digits as CSV.
ordered_json jnum(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(machine_number(x));
}

void set_variable(RunConfig& c, const std::string& var, double value) {
  if (var == "alpha") c.params.alpha = value;
  else if (var == "phi_rad") c.params.phi = value;
  else if (var == "sigma1_rad") c.params.sigma1 = value;
  else if (var == "sigma2_rad") c.params.sigma2 = value;
  else if (var == "delta_sigma_rad") c.params.sigma1 = c.params.sigma2 + value;
  else if (var == "distance_km_total") c.distance_km_total = value;
  else if (var == "loss_db_per_km") c.loss_db_per_km = value;
  else throw ConfigError("sweep." + var + ": unknown sweep variable");
}

struct RatePoint {
  RateReport report;
  CountingRates rates;
  double rate_success = 0.0;
};

RatePoint evaluate(const RunConfig& c) {
  RatePoint p;
  p.report = evaluate_protocol(c.protocol, c.params, c.channel(), c.eval);
  p.rates = counting_rates(p.report.p_max, p.report.p_min, c.source_rate_hz);
  p.rate_success = p.report.p_success * c.source_rate_hz;
  return p;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
  }
  return kExitInvalid;
}

void regime_warning(const RunConfig& c, std::ostream& err) {
  if (!c.params.in_protocol_regime())
    err << "warning: |source.phi_rad| >= pi/4 is outside the small-phase discrimination regime\n";
}

}  // namespace

int cmd_rates(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    regime_warning(config, err);
    const RatePoint p = evaluate(config);
    const Attenuation att = attenuate(config.params.alpha, config.channel());
    const double acc = accidental_rate(config.detector, detector_count(config.protocol));
    const bool silent = p.report.p_max == 0.0;
    const std::string note = silent
        ? "zero rates: phi = 0 leaves the branches indistinguishable and nothing reaches the detectors"
        : "";

    const std::vector<std::pair<std::string, double>> values = {
        {"distance_km_total", config.distance_km_total},
        {"photons_received", att.photons_received},
        {"photons_lost", att.photons_lost},
        {"p_success", p.report.p_success},
        {"p_max", p.report.p_max},
        {"p_min", p.report.p_min},
        {"R_success_hz", p.rate_success},
        {"R_max_hz", p.rates.r_max},
        {"R_min_hz", p.rates.r_min},
        {"visibility", p.report.visibility},
        {"S", p.report.chsh_s},
        {"accidental_hz", acc},
    };

    switch (config.format) {
      case OutputFormat::table: {
        Rows rows{{"protocol", std::string(to_string(config.protocol))}};
        for (const auto& [k, v] : values) rows.emplace_back(k, human_number(v));
        rows.emplace_back("bell_violation", p.report.chsh_s > 2.0 ? "yes" : "no");
        rows.emplace_back("assumptions", "unit detector efficiency, coincidence window " +
                                             human_number(config.detector.coincidence_window_s) + " s");
        if (silent) rows.emplace_back("note", note);
        write_table(out, rows);
        break;
      }
      case OutputFormat::csv: {
        std::vector<std::string> header{"protocol"}, row{std::string(to_string(config.protocol))};
        for (const auto& [k, v] : values) {
          header.push_back(k);
          row.push_back(machine_number(v));
        }
        header.emplace_back("note");
        row.push_back(note);
        write_csv_row(out, header);
        write_csv_row(out, row);
        break;
      }
      case OutputFormat::json: {
        ordered_json j;
        j["protocol"] = to_string(config.protocol);
        for (const auto& [k, v] : values) j[k] = jnum(v);
        j["bell_violation"] = p.report.chsh_s > 2.0;
        j["detector_efficiency"] = 1.0;
        j["coincidence_window_s"] = jnum(config.detector.coincidence_window_s);
        if (silent) j["note"] = note;
        out << j.dump(2) << '\n';
        break;
      }
    }
    return kExitOk;
  });
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    if (config.sweep.size() != 1) {
      err << "error: sweep needs exactly one axis in [sweep] or --sweep (got " << config.sweep.size() << ")\n";
      return kExitInvalid;
    }
    const SweepAxis& axis = config.sweep.front();
    const std::vector<double> xs = axis.values();
    std::vector<RatePoint> points(xs.size());
    std::vector<RunConfig> configs(xs.size(), config);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      set_variable(configs[i], axis.variable, xs[i]);
      configs[i].validate();
    }
    regime_warning(configs.back(), err);
    parallel_for(xs.size(), config.threads, [&](std::size_t i) { points[i] = evaluate(configs[i]); });

    const std::vector<std::string> header{axis.variable, "p_success", "p_max", "p_min", "visibility",
                                          "S",           "R_max_hz",  "R_min_hz"};
    auto columns = [&](std::size_t i) {
      const auto& r = points[i];
      return std::vector<double>{xs[i],         r.report.p_success, r.report.p_max, r.report.p_min,
                                 r.report.visibility, r.report.chsh_s, r.rates.r_max, r.rates.r_min};
    };

    switch (config.format) {
      case OutputFormat::table: {
        std::string line;
        for (const auto& h : header) line += pad_right(h);
        out << line << '\n';
        for (std::size_t i = 0; i < xs.size(); ++i) {
          line.clear();
          for (double v : columns(i)) line += pad_right(human_number(v));
          out << line << '\n';
        }
        break;
      }
      case OutputFormat::csv: {
        write_csv_row(out, header);
        for (std::size_t i = 0; i < xs.size(); ++i) {
          std::vector<std::string> row;
          for (double v : columns(i)) row.push_back(machine_number(v));
          write_csv_row(out, row);
        }
        break;
      }
      case OutputFormat::json: {
        ordered_json j;
        j["protocol"] = to_string(config.protocol);
        j["axis"] = axis.variable;
        j["rows"] = ordered_json::array();
        for (std::size_t i = 0; i < xs.size(); ++i) {
          ordered_json row;
          const auto cols = columns(i);
          for (std::size_t k = 0; k < header.size(); ++k) row[header[k]] = jnum(cols[k]);
          j["rows"].push_back(row);
        }
        out << j.dump(2) << '\n';
        break;
      }
    }
    return kExitOk;
  });
}

namespace {

struct OracleCheck {
  std::string name;
  Protocol protocol;
  double alpha_prime;
  double n_lost;
  double phi;
  double delta_sigma;
};

// Small-amplitude points spread over both protocols, both fringe extremes and
// a range of environment sizes.
std::vector<OracleCheck> default_suite() {
  const double pi = std::numbers::pi;
  return {
      {"usd2_a1.5_phi0.2_ds0", Protocol::usd2, 1.5, 0.5, 0.2, 0.0},
      {"usd2_a1.5_phi0.2_ds_pi/3", Protocol::usd2, 1.5, 0.5, 0.2, pi / 3.0},
      {"usd2_a3_phi0.25_ds_pi", Protocol::usd2, 3.0, 2.0, 0.25, pi},
      {"usd2_a0.5_lossless", Protocol::usd2, 0.5, 0.0, 0.1, pi},
      {"usd4_a2_phi0.3_ds_pi", Protocol::usd4, 2.0, 1.0, 0.3, pi},
      {"usd4_a2_phi0.3_ds0", Protocol::usd4, 2.0, 1.0, 0.3, 0.0},
      {"usd4_a3_lossless", Protocol::usd4, 3.0, 0.0, 0.4, 1.0},
      {"usd4_a1_phi0.5_nl5", Protocol::usd4, 1.0, 5.0, 0.5, 2.0},
  };
}

}  // namespace

int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const Attenuation att = attenuate(config.params.alpha, config.channel());
    if (att.alpha_prime > fock::kOracleMaxAlphaPrime) {
      err << "error: oracle refused: received amplitude |alpha'| = " << human_number(att.alpha_prime)
          << " exceeds the truncation budget; the recommended maximum is |alpha'| <= "
          << human_number(fock::kOracleMaxAlphaPrime)
          << " (lower source.alpha or lengthen channel.distance_km_total)\n";
      return kExitInvalid;
    }

    std::vector<OracleCheck> suite = default_suite();
    suite.push_back({"configured_point", config.protocol, att.alpha_prime, att.photons_lost, config.params.phi,
                     config.params.sigma1 - config.params.sigma2});

    struct Outcome {
      double oracle = 0.0;
      double analytic = 0.0;
      double doubling_shift = 0.0;
    };
    std::vector<Outcome> results(suite.size());
    parallel_for(suite.size(), config.threads, [&](std::size_t i) {
      const auto& c = suite[i];
      const double a2 = c.alpha_prime * c.alpha_prime + c.n_lost;
      const ProtocolParams params{std::sqrt(a2), c.phi, c.delta_sigma, 0.0};
      const ChannelParams channel = ChannelParams::from_transmittance(c.alpha_prime * c.alpha_prime / a2);
      Outcome& o = results[i];
      o.oracle = fock::oracle_protocol_prob(params, channel, c.protocol);
      o.analytic = protocol_probability(c.protocol, params, channel);
      o.doubling_shift = std::abs(fock::oracle_protocol_prob(params, channel, c.protocol, {2, 0}) - o.oracle);
    });

    bool all_pass = true;
    std::vector<bool> pass(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) {
      pass[i] = std::abs(results[i].oracle - results[i].analytic) <= config.oracle_tolerance;
      all_pass = all_pass && pass[i];
    }

    const std::vector<std::string> header{"check", "protocol", "alpha_prime", "photons_lost", "phi_rad",
                                          "delta_sigma_rad", "oracle", "analytic", "abs_error",
                                          "doubling_shift", "verdict"};
    auto row = [&](std::size_t i, auto&& num) {
      const auto& c = suite[i];
      const auto& r = results[i];
      return std::vector<std::string>{c.name, std::string(to_string(c.protocol)), num(c.alpha_prime),
                                      num(c.n_lost), num(c.phi), num(c.delta_sigma), num(r.oracle),
                                      num(r.analytic), num(std::abs(r.oracle - r.analytic)),
                                      num(r.doubling_shift), pass[i] ? "pass" : "FAIL"};
    };

    switch (config.format) {
      case OutputFormat::table: {
        out << "tolerance " << human_number(config.oracle_tolerance) << " (absolute)\n";
        for (std::size_t i = 0; i < suite.size(); ++i) {
          const auto r = row(i, human_number);
          out << pad_right(r[10], 6) << pad_right(r[0], 28) << "error " << pad_right(r[8]) << "oracle " << pad_right(r[6])
              << "analytic " << r[7] << '\n';
        }
        out << (all_pass ? "all checks passed" : "oracle disagreement detected") << '\n';
        break;
      }
      case OutputFormat::csv: {
        write_csv_row(out, header);
        for (std::size_t i = 0; i < suite.size(); ++i) write_csv_row(out, row(i, machine_number));
        break;
      }
      case OutputFormat::json: {
        ordered_json j;
        j["tolerance"] = jnum(config.oracle_tolerance);
        j["passed"] = all_pass;
        j["checks"] = ordered_json::array();
        for (std::size_t i = 0; i < suite.size(); ++i) {
          const auto& c = suite[i];
          const auto& r = results[i];
          j["checks"].push_back({{"check", c.name},
                                 {"protocol", to_string(c.protocol)},
                                 {"alpha_prime", jnum(c.alpha_prime)},
                                 {"photons_lost", jnum(c.n_lost)},
                                 {"phi_rad", jnum(c.phi)},
                                 {"delta_sigma_rad", jnum(c.delta_sigma)},
                                 {"oracle", jnum(r.oracle)},
                                 {"analytic", jnum(r.analytic)},
                                 {"abs_error", jnum(std::abs(r.oracle - r.analytic))},
                                 {"doubling_shift", jnum(r.doubling_shift)},
                                 {"pass", static_cast<bool>(pass[i])}});
        }
        out << j.dump(2) << '\n';
        break;
      }
    }
    return all_pass ? kExitOk : kExitFailed;
  });
}

int cmd_plan(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    RangeOptions opts;
    opts.visibility_form = config.eval.visibility_form;
    const RangeResult range =
        max_range(config.params, config.loss_db_per_km, config.rate_floor_hz, config.source_rate_hz, config.protocol, opts);
    const double v_inf = asymptotic_visibility(config.params.alpha, config.params.phi);

    if (!range.feasible) {
      switch (config.format) {
        case OutputFormat::table:
          write_table(out, {{"protocol", std::string(to_string(config.protocol))},
                            {"feasible", "no"},
                            {"rate_floor_hz", human_number(config.rate_floor_hz)},
                            {"reason", "no separation reaches the rate floor with visibility above 1/sqrt(2)"}});
          break;
        case OutputFormat::csv:
          write_csv_row(out, {"protocol", "feasible", "rate_floor_hz"});
          write_csv_row(out, {std::string(to_string(config.protocol)), "false", machine_number(config.rate_floor_hz)});
          break;
        case OutputFormat::json: {
          ordered_json j;
          j["protocol"] = to_string(config.protocol);
          j["feasible"] = false;
          j["rate_floor_hz"] = jnum(config.rate_floor_hz);
          out << j.dump(2) << '\n';
          break;
        }
      }
      return kExitFailed;
    }

    const PhiOptimum phi = optimize_phi(config.params.alpha, {config.loss_db_per_km, range.per_arm_km}, config.protocol);
    const double s_at_range = 2.0 * kSqrt2 * range.visibility;
    const std::vector<std::pair<std::string, double>> values = {
        {"rate_floor_hz", config.rate_floor_hz},
        {"max_range_km_total", range.total_km},
        {"max_range_km_per_arm", range.per_arm_km},
        {"R_max_hz_at_range", range.r_max_hz},
        {"visibility_at_range", range.visibility},
        {"S_at_range", s_at_range},
        {"S_margin", s_at_range - 2.0},
        {"asymptotic_visibility", v_inf},
        {"optimal_phi_rad", phi.phi},
        {"optimal_p_max", phi.p_max},
    };
    switch (config.format) {
      case OutputFormat::table: {
        Rows rows{{"protocol", std::string(to_string(config.protocol))}, {"feasible", "yes"}};
        for (const auto& [k, v] : values) rows.emplace_back(k, human_number(v));
        rows.emplace_back("limiting_factor", std::string(to_string(range.limit)));
        rows.emplace_back("optimal_phi_constrained", phi.constrained ? "yes (visibility boundary)" : "no");
        write_table(out, rows);
        break;
      }
      case OutputFormat::csv: {
        std::vector<std::string> header{"protocol", "feasible", "limiting_factor"};
        std::vector<std::string> row{std::string(to_string(config.protocol)), "true", std::string(to_string(range.limit))};
        for (const auto& [k, v] : values) {
          header.push_back(k);
          row.push_back(machine_number(v));
        }
        write_csv_row(out, header);
        write_csv_row(out, row);
        break;
      }
      case OutputFormat::json: {
        ordered_json j;
        j["protocol"] = to_string(config.protocol);
        j["feasible"] = true;
        j["limiting_factor"] = to_string(range.limit);
        for (const auto& [k, v] : values) j[k] = jnum(v);
        j["optimal_phi_constrained"] = phi.constrained;
        out << j.dump(2) << '\n';
        break;
      }
    }
    return kExitOk;
  });
}

int cmd_montecarlo(const RunConfig& config, std::ostream& out, std::ostream& err, std::ostream* bins_out) {
  return guarded(err, [&] {
    config.validate();
    MonteCarloConfig mc;
    mc.duration_s = config.duration_s;
    mc.source_rate_hz = config.source_rate_hz;
    mc.seed = config.seed;
    mc.block_s = config.block_s;
    mc.threads = config.threads;
    if (config.duration_s == 0.0) err << "warning: run.duration_s = 0; no counts simulated, no estimate\n";
    const RunResult r = monte_carlo_run(config.params, config.channel(), config.detector, mc, config.protocol);
    const RateReport expect = evaluate_protocol(config.protocol, config.params, config.channel());

    const bool have = r.estimated_visibility.has_value();
    const double v = have ? *r.estimated_visibility : 0.0;
    const double se = have ? *r.stderr_visibility : 0.0;
    const double s_est = 2.0 * kSqrt2 * v;
    const bool violates = have && 2.0 * kSqrt2 * (v - 3.0 * se) > 2.0;

    auto write_bins = [&](std::ostream& os) {
      write_csv_row(os, {"start_s", "end_s", "counts_max", "counts_min"});
      for (const auto& b : r.bins)
        write_csv_row(os, {machine_number(b.start_s), machine_number(b.end_s), std::to_string(b.counts_max),
                           std::to_string(b.counts_min)});
    };
    if (bins_out) write_bins(*bins_out);

    switch (config.format) {
      case OutputFormat::table: {
        Rows rows{{"protocol", std::string(to_string(config.protocol))},
                  {"seed", std::to_string(r.seed)},
                  {"duration_s", human_number(config.duration_s)},
                  {"counts_max", std::to_string(r.counts_max)},
                  {"counts_min", std::to_string(r.counts_min)},
                  {"expected_counts_max", human_number(expect.p_max * config.source_rate_hz * config.duration_s)},
                  {"expected_visibility", human_number(expect.visibility)}};
        if (have) {
          rows.emplace_back("visibility", human_number(v) + " +/- " + human_number(se));
          rows.emplace_back("S_estimate", human_number(s_est));
          rows.emplace_back("S_exceeds_2_at_3sigma", violates ? "yes" : "no");
        } else {
          rows.emplace_back("visibility", "n/a (no counts)");
        }
        write_table(out, rows);
        break;
      }
      case OutputFormat::csv:
        write_bins(out);
        break;
      case OutputFormat::json: {
        ordered_json j;
        j["protocol"] = to_string(config.protocol);
        j["seed"] = r.seed;
        j["duration_s"] = jnum(config.duration_s);
        j["counts_max"] = r.counts_max;
        j["counts_min"] = r.counts_min;
        j["expected_visibility"] = jnum(expect.visibility);
        j["estimated_visibility"] = have ? jnum(v) : ordered_json(nullptr);
        j["stderr_visibility"] = have ? jnum(se) : ordered_json(nullptr);
        j["S_estimate"] = have ? jnum(s_est) : ordered_json(nullptr);
        j["S_exceeds_2_at_3sigma"] = violates;
        j["bins"] = ordered_json::array();
        for (const auto& b : r.bins)
          j["bins"].push_back({{"start_s", jnum(b.start_s)},
                               {"end_s", jnum(b.end_s)},
                               {"counts_max", b.counts_max},
                               {"counts_min", b.counts_min}});
        out << j.dump(2) << '\n';
        break;
      }
    }
    return kExitOk;
  });
}

}  // namespace macrobell::cli
