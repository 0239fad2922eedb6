#include "chblend/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chblend/errors.hpp"

namespace chblend {

namespace {

constexpr std::array<std::pair<int, int>, 10> kBlocks{{
    {0, 0}, {0, 1},                  // u evolution
    {1, 0}, {1, 1}, {1, 2},          // u potential
    {2, 2}, {2, 3},                  // v evolution
    {3, 0}, {3, 2}, {3, 3},          // v potential
}};

// GMRES iteration count above which the preconditioner is refactorized.
constexpr int kSlowGmres = 4;

const char* field_name(std::size_t block) {
  static constexpr const char* names[] = {"u", "w_u", "v", "w_v"};
  return names[block];
}

}  // namespace

State initialize(const Mesh& mesh, const Expr& u0, const Expr& v0) {
  State s;
  const std::size_t n = mesh.num_vertices();
  s.u.resize(n);
  s.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = mesh.vertices()[i];
    s.u[i] = u0.eval(p.x, p.y);
    s.v[i] = v0.eval(p.x, p.y);
  }
  s.w_u.assign(n, 0.0);
  s.w_v.assign(n, 0.0);
  return s;
}

Stepper::Stepper(const Mesh& mesh, Params params)
    : mesh_(mesh), params_(params), assembler_(mesh_), n_(mesh_.num_vertices()) {
  params_.validate();
  mass_ = assembler_.mass();
  stiffness_ = assembler_.stiffness();
  mass_ones_ = mass_.multiply(Vector(n_, 1.0));

  const auto& np = *assembler_.pattern();
  std::vector<std::vector<std::size_t>> rows(4 * n_);
  for (const auto& [br, bc] : kBlocks) {
    for (std::size_t i = 0; i < n_; ++i) {
      auto& row = rows[static_cast<std::size_t>(br) * n_ + i];
      for (std::size_t k = np.row_offsets[i]; k < np.row_offsets[i + 1]; ++k)
        row.push_back(static_cast<std::size_t>(bc) * n_ + np.columns[k]);
    }
  }
  block_pattern_ = make_pattern(4 * n_, std::move(rows));

  for (const auto& [br, bc] : kBlocks) {
    auto& pos = block_pos_[br][bc];
    pos.resize(np.nnz());
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = np.row_offsets[i]; k < np.row_offsets[i + 1]; ++k)
        pos[k] = block_pattern_->find(static_cast<std::size_t>(br) * n_ + i,
                                      static_cast<std::size_t>(bc) * n_ + np.columns[k]);
  }
}

BlockSystem Stepper::assemble(const State& state) const {
  if (state.u.size() != n_ || state.v.size() != n_)
    throw std::invalid_argument("Stepper: state does not match the mesh");
  const Params& p = params_;
  const auto lin_u = linearize(p.scheme, state.u);
  const auto lin_v = linearize(p.scheme, state.v);
  const auto split_u = gradient_split(p.scheme, p.eps_u, p.stab);
  const auto split_v = gradient_split(p.scheme, p.eps_v, p.stab);

  const SparseMatrix ma_u = assembler_.weighted_mass(lin_u.a);
  const SparseMatrix ma_v = assembler_.weighted_mass(lin_v.a);
  const SparseMatrix m_v = assembler_.weighted_mass(state.v);
  const SparseMatrix m_u = assembler_.weighted_mass(state.u);

  const auto m = mass_.values();
  const auto k = stiffness_.values();
  const auto mau = ma_u.values();
  const auto mav = ma_v.values();
  const auto mv = m_v.values();
  const auto mu = m_u.values();

  BlockSystem sys{SparseMatrix(block_pattern_), Vector(4 * n_, 0.0)};
  auto a = sys.matrix.values();
  const auto set = [&](int br, int bc, auto&& value) {
    const auto& pos = block_pos_[br][bc];
    for (std::size_t e = 0; e < pos.size(); ++e) a[pos[e]] = value(e);
  };

  const double cu = p.tau_u / p.dt;
  const double cv = p.tau_v / p.dt;
  set(0, 0, [&](std::size_t e) { return cu * m[e]; });
  set(0, 1, [&](std::size_t e) { return -k[e]; });
  set(1, 0, [&](std::size_t e) { return split_u.c_implicit * k[e] - mau[e]; });
  set(1, 1, [&](std::size_t e) { return m[e]; });
  set(1, 2, [&](std::size_t e) { return p.alpha * m[e] + p.beta * mv[e]; });
  set(2, 2, [&](std::size_t e) { return (cv + p.sigma) * m[e]; });
  set(2, 3, [&](std::size_t e) { return -k[e]; });
  set(3, 0, [&](std::size_t e) { return p.alpha * m[e]; });
  set(3, 2, [&](std::size_t e) { return split_v.c_implicit * k[e] - mav[e] + 2.0 * p.beta * mu[e]; });
  set(3, 3, [&](std::size_t e) { return m[e]; });

  std::span<double> b = sys.rhs;
  auto b0 = b.subspan(0, n_);
  auto b1 = b.subspan(n_, n_);
  auto b2 = b.subspan(2 * n_, n_);
  auto b3 = b.subspan(3 * n_, n_);
  mass_.multiply_add(state.u, b0, cu);
  mass_.multiply_add(lin_u.g, b1);
  if (split_u.c_explicit != 0.0) stiffness_.multiply_add(state.u, b1, -split_u.c_explicit);
  mass_.multiply_add(state.v, b2, cv);
  for (std::size_t i = 0; i < n_; ++i) b2[i] += p.sigma * p.v_bar * mass_ones_[i];
  mass_.multiply_add(lin_v.g, b3);
  if (split_v.c_explicit != 0.0) stiffness_.multiply_add(state.v, b3, -split_v.c_explicit);
  return sys;
}

State Stepper::step(const State& state) {
  const BlockSystem sys = assemble(state);
  const SolveOptions options{params_.solver_tol, params_.solver_max_iter};
  Vector x;
  if (params_.linear_solver == LinearSolverKind::Gmres && !refactor_ && solver_.factorized()) {
    Vector x0;
    x0.reserve(4 * n_);
    for (const auto* f : {&state.u, &state.w_u, &state.v, &state.w_v})
      x0.insert(x0.end(), f->begin(), f->end());
    const auto precond = [this](std::span<const double> r) { return solver_.apply(r); };
    SolveReport report;
    try {
      x = gmres(sys.matrix, sys.rhs, x0, precond, options, 30, &report);
      refactor_ = report.iterations > kSlowGmres;
    } catch (const LinearSolveFailure&) {
      refactor_ = true;
    }
  }
  if (x.empty()) {
    solver_.factorize(sys.matrix);
    x = solver_.solve(sys.rhs, options);
    refactor_ = false;
  }

  State next;
  next.u.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_));
  next.w_u.assign(x.begin() + static_cast<std::ptrdiff_t>(n_), x.begin() + static_cast<std::ptrdiff_t>(2 * n_));
  next.v.assign(x.begin() + static_cast<std::ptrdiff_t>(2 * n_), x.begin() + static_cast<std::ptrdiff_t>(3 * n_));
  next.w_v.assign(x.begin() + static_cast<std::ptrdiff_t>(3 * n_), x.end());
  next.k = state.k + 1;
  next.t = static_cast<double>(next.k) * params_.dt;

  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw NonFiniteState("non-finite " + std::string(field_name(i / n_)) + " at step " +
                           std::to_string(next.k));
  }
  const double peak = std::max(norm_inf(next.u), norm_inf(next.v));
  if (peak > params_.blowup_threshold)
    throw NonFiniteState("max(|u|, |v|) = " + std::to_string(peak) + " exceeds " +
                         std::to_string(params_.blowup_threshold) + " at step " +
                         std::to_string(next.k));
  return next;
}

State step(const State& state, const Params& params, const Mesh& mesh) {
  Stepper stepper(mesh, params);
  return stepper.step(state);
}

RunResult run(const Mesh& mesh, const Params& params, const Expr& u0, const Expr& v0,
              const RunOptions& options, const RunCallbacks& callbacks) {
  if (options.series_every == 0) throw ConfigError("series_every", 0, "must be >= 1");
  Stepper stepper(mesh, params);
  const std::size_t n_steps = params.num_steps();
  const EnergyEvaluator evaluator(mesh, stepper.mass(), stepper.stiffness(),
                                  {params.solver_tol, params.solver_max_iter});

  RunResult result;
  result.final_state = initialize(mesh, u0, v0);

  const auto record = [&](const State& s) {
    result.series.push_back(make_record(s, params, evaluator));
    if (callbacks.on_record) callbacks.on_record(result.series.back());
  };
  record(result.final_state);
  if (callbacks.on_state) callbacks.on_state(result.final_state);

  for (std::size_t k = 0; k < n_steps; ++k) {
    try {
      result.final_state = stepper.step(result.final_state);
      ++result.steps_completed;
      if (result.final_state.k % options.series_every == 0) record(result.final_state);
    } catch (const LinearSolveFailure& e) {
      result.failure = StepFailure{k + 1, FailureKind::LinearSolve, e.what()};
      break;
    } catch (const NonFiniteState& e) {
      result.failure = StepFailure{k + 1, FailureKind::NonFinite, e.what()};
      break;
    }
    if (callbacks.on_state) callbacks.on_state(result.final_state);
  }
  return result;
}

}  // namespace chblend
