#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subscat::cli {

/// Configuration problem; `line` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct WidthHeight {
  double width;
  double height;
};

struct BarrierConfig {
  std::string kind = "rectangular";  // rectangular | symmetric | segments
  double a = 0.0;
  double b = 1.0;       // rectangular
  double height = 0.0;  // rectangular
  std::vector<WidthHeight> profile;  // symmetric: left half; segments: full list
};

struct PacketConfig {
  double x0 = 0.0;
  double sigma = 1.0;
  double k0 = 1.0;
  std::size_t k_points = 2048;
};

struct Tolerances {
  double unitarity = 1e-10;
  double decomposition = 1e-9;
  double norm = 1e-6;
  double sum = 1e-6;
  double overlap = 1e-6;
  double route = 1e-3;
  double oracle_l2 = 1e-4;
  double numerov = 1e-6;
  double clock = 1e-2;  // stability of the extrapolated clock reading

  /// Multiplies every tolerance by factor.
  void scale(double factor);
};

struct RunParams {
  double k_min = 0.0;
  double k_max = 0.0;
  std::size_t k_count = 0;
  std::vector<double> times;
  double dx = 0.05;
  std::vector<double> omega_ladder{1e-3, 5e-4, 2.5e-4};  // units of E0 = k0^2 / 2
  double oracle_dx = 0.0025;
  double oracle_dt = 0.002;
  double points_per_wavelength = 400.0;
};

struct RunConfig {
  BarrierConfig barrier;
  std::optional<PacketConfig> packet;
  RunParams run;
  Tolerances tolerances;
  bool has_k_grid = false;
  bool has_times = false;
  std::string text;      // verbatim source
  std::uint64_t hash = 0;  // FNV-1a of text
};

/// Parses the sectioned key = value format:
///
///   [barrier]  kind, a, b, height, half_profile, segments
///   [packet]   x0, sigma, k0, k_points
///   [run]      k_min, k_max, k_count, times, dx, omega_ladder, oracle_dx,
///              oracle_dt, points_per_wavelength, tol_<name>
///
/// Lists are comma separated; profiles are "width height" pairs separated by
/// commas. '#' and ';' start comments. Unknown sections or keys, duplicates
/// and malformed values raise ConfigError with the offending line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

enum class Command { solve, decompose, evolve, times, larmor };

/// Command-specific requirements (k-grid, packet, time samples, ladder).
void validate_for(const RunConfig& config, Command command);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace subscat::cli
