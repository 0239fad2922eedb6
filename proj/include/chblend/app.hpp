#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chblend/io.hpp"
#include "chblend/stepper.hpp"

namespace chblend {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitBlowup = 3,
  kExitVerify = 4,
};

int exit_code_for(const StepFailure& failure);

/// Where a run writes its files: `config.output_dir` when set, otherwise
/// `$CHBLEND_OUTPUT_ROOT/<name>` or `output/<name>`.
std::filesystem::path resolve_output_dir(const RunConfig& config, const std::string& name);

struct RunSummary {
  RunResult result;
  std::size_t steps_planned = 0;
  Params params;  // with v_bar resolved
  std::filesystem::path output_dir;
  TimeSeriesRecord final_record;  // diagnostics of the last good state
  int exit_code = kExitOk;
};

/// Runs one configuration and writes config.txt, series.csv and the requested
/// snapshots into `output_dir`. The series is written even when the run
/// stops early.
RunSummary execute_run(const RunConfig& config, const std::filesystem::path& output_dir);

struct CompareRow {
  std::string scheme;
  double dt = 0.0;
  std::size_t steps_planned = 0;
  std::size_t steps_completed = 0;
  bool completed = false;
  std::string failure;  // "", "solver" or "blowup"
  double final_t = 0.0;
  double mass_u = 0.0;
  double mass_v = 0.0;
  double energy = 0.0;
};

inline constexpr std::string_view kCompareHeader =
    "scheme,dt,steps_planned,steps_completed,completed,failure,final_t,mass_u,mass_v,energy";

/// Runs every (scheme, dt) pair of the base configuration. A single dt is
/// used for all schemes; otherwise the lists must have equal length. Each
/// pair writes its series to <output_dir>/<scheme>_dt<dt>/ and the summary
/// goes to <output_dir>/compare.csv. Throws ConfigError on bad lists.
std::vector<CompareRow> compare_schemes(const RunConfig& base, const std::vector<std::string>& schemes,
                                        const std::vector<double>& dts,
                                        const std::filesystem::path& output_dir);

void write_compare(const std::vector<CompareRow>& rows, const std::filesystem::path& path);

struct SweepEntry {
  std::string value;
  std::filesystem::path output_dir;
  int exit_code = kExitOk;
  std::size_t steps_completed = 0;
};

inline constexpr std::string_view kManifestHeader = "value,output_dir,exit_code,steps_completed";

/// One run per value of `param`, at most `jobs` at a time, each in
/// <output_dir>/<param>_<value>/. Entries keep the order of `values`; the
/// manifest is written to <output_dir>/manifest.csv. Throws ConfigError for
/// an empty value list or a value the parameter does not accept.
std::vector<SweepEntry> sweep(const RunConfig& base, const std::string& param,
                              const std::vector<std::string>& values, std::size_t jobs,
                              const std::filesystem::path& output_dir);

/// Splits "a, b,c" into trimmed items; an empty string gives an empty list.
std::vector<std::string> split_csv_list(const std::string& text);

}  // namespace chblend
