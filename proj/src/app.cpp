#include "chblend/app.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "chblend/assembly.hpp"
#include "chblend/errors.hpp"
#include "chblend/expr.hpp"

namespace chblend {

namespace {

std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::string safe_component(std::string s) {
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ' ' || c == ':') c = '_';
  return s;
}

Expr parse_initial(const std::string& text, const char* key) {
  try {
    return Expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(key, 0, e.what());
  }
}

}  // namespace

int exit_code_for(const StepFailure& failure) {
  return failure.kind == FailureKind::LinearSolve ? kExitSolver : kExitBlowup;
}

std::filesystem::path resolve_output_dir(const RunConfig& config, const std::string& name) {
  if (!config.output_dir.empty()) return config.output_dir;
  const char* root = std::getenv("CHBLEND_OUTPUT_ROOT");
  const std::filesystem::path base = root && *root ? root : "output";
  return base / name;
}

RunSummary execute_run(const RunConfig& config, const std::filesystem::path& output_dir) {
  config.validate();
  const Mesh mesh = build_structured(config.domain, config.nx, config.ny);
  const Expr u0 = parse_initial(config.u0, "u0");
  const Expr v0 = parse_initial(config.v0, "v0");

  RunSummary summary;
  try {
    summary.params = effective_params(config, mesh);
  } catch (const EvalError& e) {
    throw ConfigError("v0", 0, e.what());
  }
  summary.steps_planned = summary.params.num_steps();
  summary.output_dir = output_dir;

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw IOError("cannot create '" + output_dir.string() + "': " + ec.message());
  {
    std::ofstream out(output_dir / "config.txt");
    if (!out) throw IOError("cannot write '" + (output_dir / "config.txt").string() + "'");
    out << dump_config(config);
  }

  std::set<std::size_t> snapshot_steps;
  for (double t : config.snapshot_times)
    snapshot_steps.insert(static_cast<std::size_t>(std::llround(t / config.params.dt)));

  RunCallbacks callbacks;
  callbacks.on_state = [&](const State& s) {
    if (!snapshot_steps.contains(s.k)) return;
    for (const auto& field : config.snapshot_fields) {
      const Snapshot snap = take_snapshot(s, field);
      for (SnapshotFormat f : config.snapshot_formats)
        write_snapshot(snap, mesh, f, output_dir / snapshot_filename(snap, f));
    }
  };

  try {
    summary.result = run(mesh, summary.params, u0, v0, RunOptions{config.series_every}, callbacks);
  } catch (const EvalError& e) {
    throw ConfigError("u0", 0, std::string("initial data: ") + e.what());
  }
  write_series(summary.result.series, output_dir / "series.csv");
  const EnergyEvaluator evaluator(mesh, mass_matrix(mesh), stiffness_matrix(mesh),
                                  {summary.params.solver_tol, summary.params.solver_max_iter});
  summary.final_record = make_record(summary.result.final_state, summary.params, evaluator);
  summary.exit_code =
      summary.result.failure ? exit_code_for(*summary.result.failure) : static_cast<int>(kExitOk);
  return summary;
}

std::vector<CompareRow> compare_schemes(const RunConfig& base, const std::vector<std::string>& schemes,
                                        const std::vector<double>& dts,
                                        const std::filesystem::path& output_dir) {
  if (schemes.empty()) throw ConfigError("schemes", 0, "empty scheme list");
  if (dts.empty()) throw ConfigError("dts", 0, "empty dt list");
  if (dts.size() != 1 && dts.size() != schemes.size())
    throw ConfigError("dts", 0, "give one dt or one per scheme");

  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    RunConfig c = base;
    apply_setting(c, "scheme", schemes[i]);
    c.params.dt = dts.size() == 1 ? dts[0] : dts[i];
    c.snapshot_times.clear();
    c.output_dir = (output_dir / (to_string(c.params.scheme) + "_dt" + compact(c.params.dt))).string();
    c.validate();
    configs.push_back(std::move(c));
  }

  std::vector<CompareRow> rows;
  for (const auto& c : configs) {
    const RunSummary s = execute_run(c, c.output_dir);
    CompareRow row;
    row.scheme = to_string(c.params.scheme);
    row.dt = c.params.dt;
    row.steps_planned = s.steps_planned;
    row.steps_completed = s.result.steps_completed;
    row.completed = !s.result.failure;
    if (s.result.failure)
      row.failure = s.result.failure->kind == FailureKind::LinearSolve ? "solver" : "blowup";
    row.final_t = s.final_record.t;
    row.mass_u = s.final_record.mass_u;
    row.mass_v = s.final_record.mass_v;
    row.energy = s.final_record.energy;
    rows.push_back(row);
  }
  write_compare(rows, output_dir / "compare.csv");
  return rows;
}

void write_compare(const std::vector<CompareRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write '" + path.string() + "'");
  out << kCompareHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << format_real(r.dt) << ',' << r.steps_planned << ','
        << r.steps_completed << ',' << (r.completed ? 1 : 0) << ',' << r.failure << ','
        << format_real(r.final_t) << ',' << format_real(r.mass_u) << ',' << format_real(r.mass_v)
        << ',' << format_real(r.energy) << '\n';
  }
}

std::vector<SweepEntry> sweep(const RunConfig& base, const std::string& param,
                              const std::vector<std::string>& values, std::size_t jobs,
                              const std::filesystem::path& output_dir) {
  if (values.empty()) throw ConfigError(param, 0, "empty value list");
  std::vector<RunConfig> configs;
  std::vector<SweepEntry> entries;
  for (const auto& v : values) {
    RunConfig c = base;
    apply_setting(c, param, v);
    const auto dir = output_dir / safe_component(param + "_" + v);
    c.output_dir = dir.string();
    c.validate();
    configs.push_back(std::move(c));
    entries.push_back({v, dir, kExitOk, 0});
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        const RunSummary s = execute_run(configs[i], entries[i].output_dir);
        entries[i].exit_code = s.exit_code;
        entries[i].steps_completed = s.result.steps_completed;
      } catch (const ConfigError&) {
        entries[i].exit_code = kExitConfig;
      } catch (const IOError&) {
        entries[i].exit_code = kExitConfig;
      } catch (const LinearSolveFailure&) {
        entries[i].exit_code = kExitSolver;
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, configs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(output_dir);
  std::ofstream out(output_dir / "manifest.csv");
  if (!out) throw IOError("cannot write manifest in '" + output_dir.string() + "'");
  out << kManifestHeader << '\n';
  for (const auto& e : entries)
    out << e.value << ',' << e.output_dir.string() << ',' << e.exit_code << ','
        << e.steps_completed << '\n';
  return entries;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  if (trimmed(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trimmed(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace chblend
