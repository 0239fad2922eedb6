#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "chblend/app.hpp"
#include "chblend/assembly.hpp"
#include "chblend/errors.hpp"
#include "chblend/verify.hpp"

using namespace chblend;

namespace {

void report_run(const RunSummary& s) {
  const auto& r = s.result;
  std::cout << "steps " << r.steps_completed << "/" << s.steps_planned << ", output "
            << s.output_dir.string() << "\n";
  const auto& last = s.final_record;
  std::cout << "t = " << format_real(last.t) << "  mass_u = " << format_real(last.mass_u)
            << "  mass_v = " << format_real(last.mass_v) << "  energy = " << format_real(last.energy)
            << "\n";
  if (r.failure) {
    std::cerr << (r.failure->kind == FailureKind::LinearSolve ? "solver failure" : "blow-up")
              << " at step " << r.failure->step << ": " << r.failure->message << "\n";
  }
}

RunConfig load_with_output(const std::string& path, const std::string& output) {
  RunConfig cfg = load_config(path);
  if (!output.empty()) cfg.output_dir = output;
  return cfg;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Cahn-Hilliard / Cahn-Hilliard-Ono finite-element solver"};
  app.require_subcommand(1, 1);

  std::string config_path, output, schemes_arg, dts_arg, param, values_arg, level = "quick", fault;
  bool dump = false;
  std::size_t jobs = 1, nx = 20, ny = 20;

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_flag("--dump-config", dump, "Print the effective config and exit");
  run_cmd->add_option("--output", output, "Output directory");

  auto* compare_cmd = app.add_subcommand("compare", "Compare schemes and time steps");
  compare_cmd->add_option("--config", config_path, "Base config file")->required();
  compare_cmd->add_option("--schemes", schemes_arg, "Comma-separated schemes")->required();
  compare_cmd->add_option("--dts", dts_arg, "Comma-separated time steps (one, or one per scheme)")
      ->required();
  compare_cmd->add_option("--output", output, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "One run per value of a parameter");
  sweep_cmd->add_option("--config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--param", param, "Config key to vary")->required();
  sweep_cmd->add_option("--values", values_arg, "Comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output", output, "Output directory");

  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant checks");
  verify_cmd->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  verify_cmd->add_option("--inject-fault", fault, "none | flip_stiffness_sign")
      ->check(CLI::IsMember({"none", "flip_stiffness_sign"}));

  auto* mesh_cmd = app.add_subcommand("mesh-info", "Describe the mesh and system sizes");
  mesh_cmd->add_option("--config", config_path, "Config file (overrides --nx/--ny)");
  mesh_cmd->add_option("--nx", nx, "Cells in x")->check(CLI::PositiveNumber);
  mesh_cmd->add_option("--ny", ny, "Cells in y")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      RunConfig cfg = load_with_output(config_path, output);
      if (dump) {
        std::cout << dump_config(cfg);
        return kExitOk;
      }
      const RunSummary s = execute_run(cfg, resolve_output_dir(cfg, stem_of(config_path)));
      report_run(s);
      return s.exit_code;
    }

    if (*compare_cmd) {
      RunConfig cfg = load_with_output(config_path, output);
      std::vector<double> dts;
      for (const auto& item : split_csv_list(dts_arg)) {
        try {
          dts.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw ConfigError("dts", 0, "not a number: '" + item + "'");
        }
      }
      const auto dir = resolve_output_dir(cfg, stem_of(config_path) + "_compare");
      const auto rows = compare_schemes(cfg, split_csv_list(schemes_arg), dts, dir);
      std::cout << kCompareHeader << "\n";
      for (const auto& r : rows)
        std::cout << r.scheme << ',' << format_real(r.dt) << ',' << r.steps_planned << ','
                  << r.steps_completed << ',' << r.completed << ',' << r.failure << ','
                  << format_real(r.final_t) << ',' << format_real(r.mass_u) << ','
                  << format_real(r.mass_v) << ',' << format_real(r.energy) << "\n";
      std::cout << "summary written to " << (dir / "compare.csv").string() << "\n";
      return kExitOk;
    }

    if (*sweep_cmd) {
      RunConfig cfg = load_with_output(config_path, output);
      const auto dir = resolve_output_dir(cfg, stem_of(config_path) + "_sweep_" + param);
      const auto entries = sweep(cfg, param, split_csv_list(values_arg), jobs, dir);
      int code = kExitOk;
      for (const auto& e : entries) {
        std::cout << param << " = " << e.value << ": exit " << e.exit_code << ", "
                  << e.steps_completed << " steps, " << e.output_dir.string() << "\n";
        if (code == kExitOk) code = e.exit_code;
      }
      std::cout << "manifest written to " << (dir / "manifest.csv").string() << "\n";
      return code;
    }

    if (*verify_cmd) {
      VerifyOptions opts{parse_verify_level(level), parse_injected_fault(fault)};
      int failed = 0;
      run_verification(opts, [&](const CheckResult& r) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.detail << ")\n"
                  << std::flush;
        if (!r.passed) ++failed;
      });
      std::cout << (failed ? std::to_string(failed) + " check(s) failed" : "all checks passed")
                << "\n";
      return failed ? kExitVerify : kExitOk;
    }

    if (*mesh_cmd) {
      Domain domain;
      if (!config_path.empty()) {
        const RunConfig cfg = load_config(config_path);
        domain = cfg.domain;
        nx = cfg.nx;
        ny = cfg.ny;
      }
      const Mesh mesh = build_structured(domain, nx, ny);
      const Assembler assembler(mesh);
      std::cout << "domain     (" << format_real(domain.x_min) << ", " << format_real(domain.x_max)
                << ") x (" << format_real(domain.y_min) << ", " << format_real(domain.y_max)
                << ")\n"
                << "cells      " << nx << " x " << ny << "\n"
                << "vertices   " << mesh.num_vertices() << "\n"
                << "triangles  " << mesh.num_triangles() << "\n"
                << "h          " << format_real(mesh.h()) << "\n"
                << "area       " << format_real(mesh.area()) << "\n"
                << "matrix nnz " << assembler.pattern()->nnz() << "\n"
                << "unknowns   " << 4 * mesh.num_vertices() << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IOError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LinearSolveFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
