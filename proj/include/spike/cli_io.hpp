#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spike/ode_core.hpp"

namespace spike {

enum class Command { Solve, Scan, Branches, Ground, Eigen, Verify, Limit };
enum class Format { Csv, Json, Svg };

const char* to_string(Command c);
const char* to_string(Format f);

struct RunConfig {
  Command command = Command::Solve;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  double alpha = 0.3;
  std::optional<double> theta1;
  int k = 1;
  int n = 2;
  std::size_t grid = 256;
  std::string out;
  Format format = Format::Json;
  Tolerances tol;

  /// eps from whichever of lambda / epsilon was given; Error{Usage} if neither.
  double eps() const;
  double lam() const { return -1.0 / (eps() * eps()); }
};

/// Parses argv (argv[0] is the program name). Error{Usage} on bad or
/// conflicting flags; help requests yield std::nullopt after printing to out.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

struct RunReport {
  nlohmann::json json;
  /// False when a verification assertion failed.
  bool ok = true;
};

RunReport dispatch(const RunConfig& config);

/// Full CLI: parse, dispatch, write files, print the JSON report. Exit codes:
/// 0 success, 1 runtime error, 2 usage error, 3 verification failed.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "theta,u,du" header, one row per node, 17 significant digits.
std::string csv_string(const Trajectory& traj);
std::vector<State> parse_csv(const std::string& text);
void emit_csv(const Trajectory& traj, const std::string& path);

struct SvgOptions {
  int width = 800;
  int height = 480;
  std::string title;
  /// Dense samples added between nodes for the polyline.
  int samples = 2000;
};

/// Standalone SVG of u(theta); Error{Domain} for an empty trajectory.
std::string svg_string(const Trajectory& traj, const SvgOptions& opt = {});
void emit_svg(const Trajectory& traj, const std::string& path, const SvgOptions& opt = {});

/// Error{Io} with the path on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace spike
