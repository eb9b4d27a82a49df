#include "macrobell_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "macrobell/error.hpp"

namespace macrobell::cli {
namespace {

double parse_real(const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError(field + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(field + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using Setter = std::function<void(RunConfig&, const std::string& field, const std::string& value)>;

template <typename T>
Setter real_into(T RunConfig::*member) {
  return [member](RunConfig& c, const std::string& f, const std::string& v) { c.*member = parse_real(f, v); };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"source",
       {
           {"alpha", [](RunConfig& c, const std::string& f, const std::string& v) { c.params.alpha = parse_real(f, v); }},
           {"phi_rad", [](RunConfig& c, const std::string& f, const std::string& v) { c.params.phi = parse_real(f, v); }},
           {"sigma1_rad", [](RunConfig& c, const std::string& f, const std::string& v) { c.params.sigma1 = parse_real(f, v); }},
           {"sigma2_rad", [](RunConfig& c, const std::string& f, const std::string& v) { c.params.sigma2 = parse_real(f, v); }},
           {"rate_hz", real_into(&RunConfig::source_rate_hz)},
       }},
      {"channel",
       {
           {"loss_db_per_km", real_into(&RunConfig::loss_db_per_km)},
           {"distance_km_total", real_into(&RunConfig::distance_km_total)},
       }},
      {"detector",
       {
           {"dark_rate_hz", [](RunConfig& c, const std::string& f, const std::string& v) { c.detector.dark_rate_hz = parse_real(f, v); }},
           {"coincidence_window_s",
            [](RunConfig& c, const std::string& f, const std::string& v) { c.detector.coincidence_window_s = parse_real(f, v); }},
       }},
      {"run",
       {
           {"protocol",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "usd2") c.protocol = Protocol::usd2;
              else if (v == "usd4") c.protocol = Protocol::usd4;
              else throw ConfigError(f + ": expected usd2 or usd4, got '" + v + "'");
            }},
           {"format",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "table") c.format = OutputFormat::table;
              else if (v == "csv") c.format = OutputFormat::csv;
              else if (v == "json") c.format = OutputFormat::json;
              else throw ConfigError(f + ": expected table, csv or json, got '" + v + "'");
            }},
           {"seed", [](RunConfig& c, const std::string& f, const std::string& v) { c.seed = parse_unsigned(f, v); }},
           {"duration_s", real_into(&RunConfig::duration_s)},
           {"block_s", real_into(&RunConfig::block_s)},
           {"threads",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              const auto n = parse_unsigned(f, v);
              if (n > 4096) throw ConfigError(f + ": at most 4096 threads");
              c.threads = static_cast<unsigned>(n);
            }},
           {"rate_floor_hz", real_into(&RunConfig::rate_floor_hz)},
           {"oracle_tolerance", real_into(&RunConfig::oracle_tolerance)},
           {"visibility_form",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "exact") c.eval.visibility_form = VisibilityForm::exact;
              else if (v == "small_angle") c.eval.visibility_form = VisibilityForm::small_angle;
              else throw ConfigError(f + ": expected exact or small_angle, got '" + v + "'");
            }},
           {"route",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "pipeline") c.eval.route = Route::pipeline;
              else if (v == "closed_form") c.eval.route = Route::closed_form;
              else throw ConfigError(f + ": expected pipeline or closed_form, got '" + v + "'");
            }},
           {"detection_model",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "single_photon") c.eval.detection = DetectionModel::single_photon;
              else if (v == "click") c.eval.detection = DetectionModel::click;
              else throw ConfigError(f + ": expected single_photon or click, got '" + v + "'");
            }},
           {"displacement",
            [](RunConfig& c, const std::string& f, const std::string& v) {
              if (v == "full_phase") c.eval.displacement = DisplacementConvention::full_phase;
              else if (v == "phase_free") c.eval.displacement = DisplacementConvention::phase_free;
              else throw ConfigError(f + ": expected full_phase or phase_free, got '" + v + "'");
            }},
       }},
  };
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> names = {"alpha",           "phi_rad",           "sigma1_rad",
                                                 "sigma2_rad",      "delta_sigma_rad",   "distance_km_total",
                                                 "loss_db_per_km"};
  return names;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

SweepAxis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep: expected var=start:stop:steps, got '" + text + "'");
  SweepAxis axis;
  axis.variable = trim(text.substr(0, eq));
  const std::string spec = trim(text.substr(eq + 1));
  const std::string field = "sweep." + axis.variable;
  const auto& names = sweep_variables();
  if (std::find(names.begin(), names.end(), axis.variable) == names.end())
    throw ConfigError(field + ": unknown sweep variable");
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
  if (parts.size() != 3) throw ConfigError(field + ": expected start:stop:steps, got '" + spec + "'");
  axis.start = parse_real(field, parts[0]);
  axis.stop = parse_real(field, parts[1]);
  axis.steps = parse_unsigned(field, parts[2]);
  return axis;
}

void apply_setting(RunConfig& config, const std::string& section, const std::string& key, const std::string& value) {
  const std::string field = section + "." + key;
  if (section == "sweep") {
    config.sweep.push_back(parse_sweep(key + "=" + value));
    return;
  }
  const auto& s = schema();
  const auto sec = s.find(section);
  if (sec == s.end()) throw ConfigError(field + ": unknown field (no section [" + section + "])");
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) throw ConfigError(field + ": unknown field");
  it->second(config, field, trim(value));
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("--set: expected section.key=value, got '" + assignment + "'");
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  if (section == "sweep") config.sweep.clear();
  apply_setting(config, section, key, value);
}

void load_config(RunConfig& config, std::istream& in, const std::string& source_name) {
  // The ini reader only knows ';' comments; drop '#' lines up front.
  std::stringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const std::string t = trim(line);
    cleaned << (t.rfind('#', 0) == 0 ? std::string() : line) << '\n';
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(cleaned, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source_name + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  bool sweep_seen = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": unknown field (keys must sit inside a [section])");
    if (section == "sweep" && !sweep_seen) {
      config.sweep.clear();
      sweep_seen = true;
    }
    for (const auto& [key, value] : body) apply_setting(config, section, key, value.data());
  }
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config(config, in, path);
}

void RunConfig::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  require(finite(params.alpha) && params.alpha > 0.0, "source.alpha: must be finite and > 0");
  require(finite(params.phi), "source.phi_rad: must be finite");
  require(finite(params.sigma1), "source.sigma1_rad: must be finite");
  require(finite(params.sigma2), "source.sigma2_rad: must be finite");
  require(finite(source_rate_hz) && source_rate_hz > 0.0, "source.rate_hz: must be finite and > 0");
  require(finite(loss_db_per_km) && loss_db_per_km >= 0.0, "channel.loss_db_per_km: must be finite and >= 0");
  require(finite(distance_km_total) && distance_km_total >= 0.0,
          "channel.distance_km_total: must be finite and >= 0");
  require(finite(detector.dark_rate_hz) && detector.dark_rate_hz >= 0.0,
          "detector.dark_rate_hz: must be finite and >= 0");
  require(finite(detector.coincidence_window_s) && detector.coincidence_window_s > 0.0,
          "detector.coincidence_window_s: must be finite and > 0");
  require(detector.coincidence_window_s * source_rate_hz <= 1.0,
          "detector.coincidence_window_s: must not exceed the pulse period 1/source.rate_hz");
  for (const auto& axis : sweep) {
    const std::string f = "sweep." + axis.variable;
    require(finite(axis.start) && finite(axis.stop), f + ": start and stop must be finite");
    require(axis.steps >= 1, f + ": steps must be >= 1");
  }
  require(finite(duration_s) && duration_s >= 0.0, "run.duration_s: must be finite and >= 0");
  require(finite(block_s) && block_s > 0.0, "run.block_s: must be finite and > 0");
  require(rate_floor_hz > 0.0, "run.rate_floor_hz: must be > 0");
  require(finite(oracle_tolerance) && oracle_tolerance > 0.0, "run.oracle_tolerance: must be finite and > 0");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::table: return "table";
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
  }
  return "table";
}

}  // namespace macrobell::cli
