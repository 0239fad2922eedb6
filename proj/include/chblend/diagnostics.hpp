#pragma once

#include <array>
#include <span>
#include <vector>

#include "chblend/linear_solver.hpp"
#include "chblend/mesh.hpp"
#include "chblend/model.hpp"
#include "chblend/sparse.hpp"

namespace chblend {

/// Symmetric 6-point triangle rule, exact for polynomials of degree 4.
/// Points are barycentric; weights sum to 1 and are scaled by the element area.
struct QuadraturePoint {
  std::array<double, 3> lambda;
  double weight;
};
const std::array<QuadraturePoint, 6>& degree4_rule();

/// int_Omega f_h = 1^T M f.
double mass(const SparseMatrix& mass_matrix, std::span<const double> f);

/// int_Omega W(u_h, v_h) with
///   W(u, v) = (u^2 - 1)^2 / 4 + (v^2 - 1)^2 / 4 + alpha u v + beta u v^2.
double local_potential(const Mesh& mesh, std::span<const double> u, std::span<const double> v,
                       double alpha, double beta);

/// int_Omega (f_h^2 - 1)^2 / 4
double double_well_integral(const Mesh& mesh, std::span<const double> f);

/// (eps^2 / 2) f^T K f + int (f_h^2 - 1)^2 / 4: the energy of one uncoupled field.
double field_energy(const Mesh& mesh, const SparseMatrix& stiffness, std::span<const double> f,
                    double eps);

struct Energy {
  double total = 0.0;
  double gradient = 0.0;   // (eps_u^2/2) u'Ku + (eps_v^2/2) v'Kv
  double potential = 0.0;  // int W(u, v)
  double nonlocal = 0.0;   // (sigma/2) psi'K psi
  // mass(v) - v_bar |Omega|, removed from the Poisson right-hand side.
  double projection = 0.0;
};

/// Evaluates the free energy including the nonlocal term
/// (sigma/2) |(-Lap)^{-1/2}(v - v_bar)|^2 = (sigma/2) int |grad psi|^2, where
/// psi solves the Neumann problem K psi = M (v - v_bar) with int psi = 0.
///
/// The zero-mean constraint is imposed with a Lagrange multiplier: the
/// bordered system [K m; m^T 0] with m = M 1 is factorized once per mesh.
/// The right-hand side is first projected onto zero sum along m, which is
/// the same as shifting v by a constant.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const Mesh& mesh, SparseMatrix mass, SparseMatrix stiffness,
                  SolveOptions options = {});

  Energy evaluate(const State& state, const Params& params) const;

  /// Zero-mean psi for the given v; `projection` receives mass(v) - v_bar |Omega|.
  Vector inverse_laplacian(std::span<const double> v, double v_bar, double* projection = nullptr) const;

  const SparseMatrix& mass_matrix() const { return mass_; }
  const SparseMatrix& stiffness_matrix() const { return stiffness_; }

 private:
  Mesh mesh_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  Vector m_;  // M 1
  double area_;
  SolveOptions options_;
  SparseLuSolver bordered_;
};

Energy energy(const State& state, const Params& params, const Mesh& mesh, const SparseMatrix& mass,
              const SparseMatrix& stiffness);

struct TimeSeriesRecord {
  double t = 0.0;
  double mass_u = 0.0;
  double mass_v = 0.0;
  double energy = 0.0;
  double energy_nonlocal = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
};

using TimeSeries = std::vector<TimeSeriesRecord>;

TimeSeriesRecord make_record(const State& state, const Params& params,
                             const EnergyEvaluator& evaluator);

}  // namespace chblend
