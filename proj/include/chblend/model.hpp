#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "chblend/schemes.hpp"
#include "chblend/sparse.hpp"

namespace chblend {

/// lu: sparse LU of every step's matrix.
/// gmres: GMRES preconditioned by the LU factors of an earlier step; the
/// factors are refreshed when convergence slows down. Pays off for small dt.
enum class LinearSolverKind { Lu, Gmres };

LinearSolverKind parse_linear_solver(std::string_view name);
std::string to_string(LinearSolverKind kind);

/// Physical and numerical constants of the coupled system
///
///   tau_u u_t = -Lap w_u,            w_u = eps_u^2 Lap u + phi(u) - alpha v - beta v^2
///   tau_v v_t = -Lap w_v - sigma (v - v_bar),
///                                    w_v = eps_v^2 Lap v + phi(v) - alpha u - 2 beta u v
///
/// with homogeneous Neumann conditions on all four fields.
struct Params {
  double tau_u = 1.0;
  double tau_v = 100.0;
  double eps_u = 0.05;
  double eps_v = 0.05;
  double alpha = 0.01;
  double beta = -0.9;
  double sigma = 100.0;
  double v_bar = 0.0;
  double dt = 0.005;
  double t_end = 15.0;
  SchemeKind scheme = SchemeKind::OD2;
  double stab = 0.0;  // WVV gradient stabilization
  double solver_tol = 1e-10;
  int solver_max_iter = 10;
  LinearSolverKind linear_solver = LinearSolverKind::Lu;
  // A step whose |u| or |v| exceeds this is reported as a blow-up.
  double blowup_threshold = 1e3;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  /// round(t_end / dt). Throws ConfigError if t_end is not a whole number of steps.
  std::size_t num_steps() const;
};

struct State {
  NodalField u;
  NodalField w_u;
  NodalField v;
  NodalField w_v;
  std::size_t k = 0;
  double t = 0.0;
};

}  // namespace chblend
