#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chblend/diagnostics.hpp"
#include "chblend/mesh.hpp"
#include "chblend/model.hpp"

namespace chblend {

enum class SnapshotFormat { Csv, Vtk };

/// Everything needed to reproduce one run.
///
/// Config file grammar, one setting per line:
///
///   # comment                      (also allowed after a value)
///   key = value
///   key = "quoted string"          (\" and \\ escapes)
///   key = 1, 2.5, 3                (lists)
///
/// Keys: x_min x_max y_min y_max nx ny tau_u tau_v eps_u eps_v alpha beta
/// sigma v_bar dt t_end scheme stab solver_tol solver_max_iter linear_solver
/// blowup_threshold u0 v0 snapshot_times snapshot_fields snapshot_format
/// series_every output_dir tag.<name>. Unknown keys are rejected.
/// `v_bar = v0_mean` sets v_bar to the mean of the interpolated v0.
struct RunConfig {
  Domain domain;
  std::size_t nx = 20;
  std::size_t ny = 20;
  Params params;
  bool v_bar_from_v0 = true;
  std::string u0 = "sin(10*x*y)";
  std::string v0 = "cos(10*(x-y))*x*y";
  std::vector<double> snapshot_times;
  std::vector<std::string> snapshot_fields{"u", "v"};
  std::vector<SnapshotFormat> snapshot_formats{SnapshotFormat::Csv, SnapshotFormat::Vtk};
  std::size_t series_every = 1;
  std::string output_dir;  // empty: $CHBLEND_OUTPUT_ROOT or "output"
  std::map<std::string, std::string> tags;

  /// Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(std::string_view text);
/// Throws IOError if the file cannot be read, ConfigError if it is malformed.
RunConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` setting (value as written in a config file).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   std::size_t line = 0);

/// Config text that parses back to an equivalent RunConfig.
std::string dump_config(const RunConfig& config);

/// Params with v_bar resolved against the mesh when v_bar_from_v0 is set.
Params effective_params(const RunConfig& config, const Mesh& mesh);

/// %.17g
std::string format_real(double value);

inline constexpr std::string_view kSeriesHeader =
    "t,mass_u,mass_v,energy,energy_nonlocal,u_min,u_max,v_min,v_max";

void write_series(const TimeSeries& records, const std::filesystem::path& path);
TimeSeries read_series(const std::filesystem::path& path);

struct Snapshot {
  double t = 0.0;
  std::string field;  // u | v | w_u | w_v
  NodalField values;
};

/// Field values of `state` by name; throws std::invalid_argument for unknown names.
Snapshot take_snapshot(const State& state, std::string_view field);

/// CSV: header `x,y,value` then one row per vertex. VTK: legacy ASCII
/// unstructured grid with triangle cells (type 5) and point scalars.
void write_snapshot(const Snapshot& snapshot, const Mesh& mesh, SnapshotFormat format,
                    const std::filesystem::path& path);

struct SnapshotRow {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};
std::vector<SnapshotRow> read_snapshot_csv(const std::filesystem::path& path);

/// e.g. snapshot_u_t3.csv, snapshot_v_t0.9.vtk
std::string snapshot_filename(const Snapshot& snapshot, SnapshotFormat format);

}  // namespace chblend
