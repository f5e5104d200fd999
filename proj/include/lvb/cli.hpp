#pragma once

// Command-line front end: CSV tables, figure data and the verify report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lvb::cli {

enum class ExitCode : int {
  Ok = 0,
  Config = 1,
  VerifyFailed = 2,
  Integration = 3,
};

// Bad flags or flag combinations; maps to ExitCode::Config.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Subcommand { Bounds, Lambert, Simulate, Verify, Figure };
enum class Spacing { Linear, Log };
enum class SystemKind { LotkaVolterra, RosenzweigMacArthur };
enum class EventKind { PreyReturn, PredatorReturn, Cycle, None };

struct Grid {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  Spacing spacing = Spacing::Linear;

  // Throws ConfigError unless count >= 2, min < max and, for log spacing, min > 0.
  void validate() const;
  std::vector<double> points() const;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::Verify;
  Grid grid;
  SystemKind system = SystemKind::LotkaVolterra;
  double alpha = 1.0;
  double m = 1.0;
  double lambda = 0.3;
  double a = 0.1;
  std::optional<double> x0;
  std::optional<double> s0;
  EventKind event = EventKind::Cycle;
  double t_max = 1e3;
  std::optional<std::string> out;  // file, or directory for `figure`
  std::vector<int> figures;        // empty means all
  std::uint64_t seed = 0;
  bool corrupt_coefficient = false;
};

Grid default_bounds_grid();
Grid default_lambert_grid();

// Parses argv (including the program name). Throws ConfigError.
RunConfig parse_args(int argc, const char* const* argv);

void run_bounds(const RunConfig& config, std::ostream& out);
void run_lambert(const RunConfig& config, std::ostream& out);

// Trajectory to `out`, event summary to `events`.
void run_simulate(const RunConfig& config, std::ostream& out, std::ostream& events);

// Prints the report; returns true when every suite passed.
bool run_verify(const RunConfig& config, std::ostream& out);

// Writes fig<N>_<panel>.csv files into `dir` and returns their paths.
std::vector<std::filesystem::path> run_figure(const std::vector<int>& figures,
                                              const std::filesystem::path& dir);

int run_main(int argc, const char* const* argv);

}  // namespace lvb::cli
