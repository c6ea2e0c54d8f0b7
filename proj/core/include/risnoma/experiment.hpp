#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/driver.hpp"
#include "risnoma/metrics.hpp"
#include "risnoma/scenario.hpp"

namespace risnoma {

enum class SweepAxis { RisElements, TransmitPowerDbm, AngleScan };

const char* to_string(SweepAxis axis);

/// Sweep files are JSON (comments allowed), see scenarios/README.md.
/// For the angle_scan axis each value is a scan resolution in degrees.
struct SweepSpec {
  std::string sweep_id = "sweep";
  std::string scenario_path;  ///< resolved against the sweep file directory
  SweepAxis axis = SweepAxis::RisElements;
  std::vector<double> values;
  std::vector<MethodKind> methods;
  std::vector<std::uint64_t> seeds;
  std::string output = "results.csv";

  /// Throws ConfigError naming the empty or malformed field.
  void check() const;
};

SweepSpec parse_sweep(const std::string& text, const std::string& base_dir = ".");
SweepSpec load_sweep(const std::string& path);

struct ResultRow {
  std::string scenario_id;
  std::uint64_t seed = 0;
  MethodKind method = MethodKind::PAO;
  double axis_value = 0.0;
  int N_s = 0;
  int M = 0;
  double P_t_dbm = 0.0;
  double r_th = 0.0;  ///< smallest rate threshold, bits/s/Hz
  double mbpg_watts = 0.0;
  double mbpg_db = 0.0;  ///< dBm
  std::vector<double> target_gains;  ///< watts
  double sum_rate = 0.0;
  int ao_iterations = 0;
  double runtime_ms = 0.0;
  RunStatus status = RunStatus::Failed;
};

/// One angle-scan sample with its run attached.
struct ScanRow {
  std::string scenario_id;
  std::uint64_t seed = 0;
  MethodKind method = MethodKind::PAO;
  double resolution_deg = 0.0;
  BeampatternSample sample;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<ScanRow> scans;  ///< angle_scan axis only
};

/// Runs every (value, method, seed) cell in that order. Failures land in the
/// status column; the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, const ScenarioFile& base);

/// Scenario with the swept quantity replaced. Throws ConfigError.
ScenarioFile apply_axis(const ScenarioFile& base, SweepAxis axis, double value);

ResultRow make_row(const ScenarioFile& file, const Solution& solution, double axis_value, double runtime_ms);

/// Beampattern over [-90, 90] degrees on a uniform grid including both ends.
/// Throws ConfigError for a nonpositive resolution.
std::vector<BeampatternSample> angle_scan(const Solution& solution, const ChannelSet& channels, double resolution_deg);

/// Indices of strict interior local maxima (plateaus count once, at their
/// first sample).
std::vector<std::size_t> local_maxima(const std::vector<BeampatternSample>& samples);

/// CSV with a header row; floats carry 10 significant digits. The number of
/// gain_target columns follows the first row.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_scan_csv(const std::vector<ScanRow>& rows, std::ostream& out);

/// Sidecar JSON with the spec, the base scenario and the code version.
std::string sweep_metadata(const SweepSpec& spec, const ScenarioFile& base);

const char* version();

/// A saved run: the scenario, the seed that regenerates its channels and
/// the optimized variables.
struct SavedSolution {
  ScenarioFile scenario;
  Solution solution;
};

std::string dump_solution(const ScenarioFile& scenario, const Solution& solution);
SavedSolution parse_solution(const std::string& text);

}  // namespace risnoma
