#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "macrobell/experiment.hpp"
#include "macrobell/protocols.hpp"

namespace macrobell::cli {

/// Configuration problem; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { table, csv, json };

/// One swept variable: `steps` evenly spaced values from start to stop
/// inclusive (a single step evaluates start only).
struct SweepAxis {
  std::string variable;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  std::vector<double> values() const;
};

/// Names accepted as sweep variables.
const std::vector<std::string>& sweep_variables();

struct RunConfig {
  // [source]
  ProtocolParams params{100.0, 0.0028, 3.14159265358979323846, 0.0};
  double source_rate_hz = 1e9;
  // [channel]
  double loss_db_per_km = 0.15;
  double distance_km_total = 400.0;
  // [detector]
  DetectorSpec detector;
  // [sweep]
  std::vector<SweepAxis> sweep;
  // [run]
  Protocol protocol = Protocol::usd2;
  OutputFormat format = OutputFormat::table;
  std::uint64_t seed = 1;
  double duration_s = 1e4;
  double block_s = 1.0;
  unsigned threads = 0;
  double rate_floor_hz = 5.3;
  double oracle_tolerance = 1e-8;
  EvalOptions eval;

  ChannelParams channel() const {
    return ChannelParams::from_total_km(loss_db_per_km, distance_km_total);
  }

  /// Re-checks every physical bound; throws ConfigError naming the field.
  void validate() const;
};

/// Sets `section.key` from its textual value. Unknown sections or keys and
/// unparsable values raise ConfigError.
void apply_setting(RunConfig& config, const std::string& section, const std::string& key,
                   const std::string& value);

/// Applies a "section.key=value" override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Reads a sectioned key = value document (';' or '#' comments). Keys in
/// [sweep] replace any axes set earlier.
void load_config(RunConfig& config, std::istream& in, const std::string& source_name);
void load_config_file(RunConfig& config, const std::string& path);

/// Parses "var=start:stop:steps".
SweepAxis parse_sweep(const std::string& text);

std::string to_string(OutputFormat f);

}  // namespace macrobell::cli
