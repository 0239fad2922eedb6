#include "chblend/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chblend/errors.hpp"

namespace chblend {

namespace {

void require(bool ok, const char* key, const char* message) {
  if (!ok) throw ConfigError(key, 0, message);
}

}  // namespace

LinearSolverKind parse_linear_solver(std::string_view name) {
  if (name == "lu") return LinearSolverKind::Lu;
  if (name == "gmres") return LinearSolverKind::Gmres;
  throw std::invalid_argument("unknown linear solver '" + std::string(name) +
                              "' (expected lu or gmres)");
}

std::string to_string(LinearSolverKind kind) {
  return kind == LinearSolverKind::Lu ? "lu" : "gmres";
}

void Params::validate() const {
  require(std::isfinite(tau_u) && tau_u > 0.0, "tau_u", "must be positive");
  require(std::isfinite(tau_v) && tau_v > 0.0, "tau_v", "must be positive");
  require(std::isfinite(eps_u) && eps_u > 0.0, "eps_u", "must be positive");
  require(std::isfinite(eps_v) && eps_v > 0.0, "eps_v", "must be positive");
  require(std::isfinite(alpha), "alpha", "must be finite");
  require(std::isfinite(beta), "beta", "must be finite");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma", "must be non-negative");
  require(std::isfinite(v_bar), "v_bar", "must be finite");
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be positive");
  require(std::isfinite(t_end) && t_end > 0.0, "t_end", "must be positive");
  require(dt <= t_end, "dt", "must not exceed t_end");
  require(std::isfinite(stab) && stab >= 0.0, "stab", "must be non-negative");
  require(std::isfinite(solver_tol) && solver_tol > 0.0, "solver_tol", "must be positive");
  require(solver_max_iter >= 0, "solver_max_iter", "must be non-negative");
  require(blowup_threshold > 0.0, "blowup_threshold", "must be positive");
  (void)num_steps();
}

std::size_t Params::num_steps() const {
  const double ratio = t_end / dt;
  const double n = std::round(ratio);
  if (!(n >= 1.0) || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("t_end", 0, "must be a whole multiple of dt");
  return static_cast<std::size_t>(n);
}

}  // namespace chblend
