#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "chblend/assembly.hpp"
#include "chblend/diagnostics.hpp"
#include "chblend/expr.hpp"
#include "chblend/linear_solver.hpp"
#include "chblend/mesh.hpp"
#include "chblend/model.hpp"

namespace chblend {

/// Nodal interpolation of the initial data; w_u and w_v start at zero.
/// Throws EvalError if an expression is not finite at some vertex.
State initialize(const Mesh& mesh, const Expr& u0, const Expr& v0);

/// The 4N x 4N system of one time step, unknowns ordered (u, w_u, v, w_v).
struct BlockSystem {
  SparseMatrix matrix;
  Vector rhs;
};

/// Semi-implicit step of the coupled system. Each step solves
///
///   (tau_u/dt) M u' - K w_u'                                   = (tau_u/dt) M u
///   M w_u' + (c_u K - M[a_u]) u' + (alpha M + beta M[v]) v'    = M g_u - e_u K u
///   ((tau_v/dt) + sigma) M v' - K w_v'                         = (tau_v/dt) M v + sigma v_bar M 1
///   M w_v' + alpha M u' + (c_v K - M[a_v] + 2 beta M[u]) v'    = M g_v - e_v K v
///
/// where M[c] is the mass matrix weighted by the previous-step field c,
/// (a, g) = linearize(scheme, previous field) and (c, e) = gradient_split.
/// v^2 is lagged as v v' and u v as u v'.
///
/// M and K are assembled once. The weighted blocks are refreshed every step
/// on a fixed block pattern, so the fill-reducing ordering of the direct
/// solver is computed only on the first step.
class Stepper {
 public:
  Stepper(const Mesh& mesh, Params params);

  const Params& params() const { return params_; }
  const Mesh& mesh() const { return mesh_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  std::size_t num_nodes() const { return n_; }

  BlockSystem assemble(const State& state) const;

  /// Throws LinearSolveFailure or NonFiniteState.
  State step(const State& state);

 private:
  Mesh mesh_;
  Params params_;
  Assembler assembler_;
  std::size_t n_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  Vector mass_ones_;
  std::shared_ptr<const SparsityPattern> block_pattern_;
  // Position in the block value array of node-pattern entry k for block (r, c).
  std::array<std::array<std::vector<std::size_t>, 4>, 4> block_pos_;
  SparseLuSolver solver_;
  bool refactor_ = true;
};

/// Single step with freshly built operators; convenient for tests, use a
/// Stepper for trajectories.
State step(const State& state, const Params& params, const Mesh& mesh);

enum class FailureKind { LinearSolve, NonFinite };

struct StepFailure {
  std::size_t step = 0;  // index k+1 of the step that failed
  FailureKind kind = FailureKind::LinearSolve;
  std::string message;
};

struct RunOptions {
  std::size_t series_every = 1;
};

struct RunCallbacks {
  /// Called with the initial state and after every completed step.
  std::function<void(const State&)> on_state;
  std::function<void(const TimeSeriesRecord&)> on_record;
};

struct RunResult {
  State final_state;
  TimeSeries series;
  std::size_t steps_completed = 0;
  std::optional<StepFailure> failure;
};

/// Runs num_steps() steps from the interpolated initial data. A record is
/// taken at k = 0 and at every series_every-th step. A failing step stops the
/// run; the series and the last good state are kept and the failure is
/// reported in the result.
RunResult run(const Mesh& mesh, const Params& params, const Expr& u0, const Expr& v0,
              const RunOptions& options = {}, const RunCallbacks& callbacks = {});

}  // namespace chblend
