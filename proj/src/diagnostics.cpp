#include "chblend/diagnostics.hpp"

#include <algorithm>
#include <stdexcept>

namespace chblend {

const std::array<QuadraturePoint, 6>& degree4_rule() {
  // Dunavant's degree-4 rule: two orbits of three points each.
  constexpr double a1 = 0.445948490915964886318329253883;
  constexpr double b1 = 0.108103018168070227363341492233;
  constexpr double w1 = 0.223381589678011465944819473;
  constexpr double a2 = 0.091576213509770743459571463402;
  constexpr double b2 = 0.816847572980458513080857073196;
  constexpr double w2 = 0.109951743655321867388513860;
  static const std::array<QuadraturePoint, 6> rule{{
      {{a1, a1, b1}, w1},
      {{a1, b1, a1}, w1},
      {{b1, a1, a1}, w1},
      {{a2, a2, b2}, w2},
      {{a2, b2, a2}, w2},
      {{b2, a2, a2}, w2},
  }};
  return rule;
}

double mass(const SparseMatrix& mass_matrix, std::span<const double> f) {
  if (f.size() != mass_matrix.cols()) throw std::invalid_argument("mass: size mismatch");
  const auto& p = mass_matrix.pattern();
  const auto values = mass_matrix.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.n_rows; ++i)
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
      total += values[k] * f[p.columns[k]];
  return total;
}

namespace {

template <typename Integrand>
double integrate(const Mesh& mesh, Integrand&& integrand) {
  const auto& rule = degree4_rule();
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = element_geometry(mesh, t).area;
    double local = 0.0;
    for (const auto& q : rule) local += q.weight * integrand(tri, q.lambda);
    total += area * local;
  }
  return total;
}

double interpolate(std::span<const double> f, const Triangle& tri, const std::array<double, 3>& l) {
  return l[0] * f[tri[0]] + l[1] * f[tri[1]] + l[2] * f[tri[2]];
}

double well(double x) {
  const double s = x * x - 1.0;
  return 0.25 * s * s;
}

}  // namespace

double local_potential(const Mesh& mesh, std::span<const double> u, std::span<const double> v,
                       double alpha, double beta) {
  if (u.size() != mesh.num_vertices() || v.size() != mesh.num_vertices())
    throw std::invalid_argument("local_potential: size mismatch");
  return integrate(mesh, [&](const Triangle& tri, const std::array<double, 3>& l) {
    const double uq = interpolate(u, tri, l);
    const double vq = interpolate(v, tri, l);
    return well(uq) + well(vq) + alpha * uq * vq + beta * uq * vq * vq;
  });
}

double double_well_integral(const Mesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.num_vertices()) throw std::invalid_argument("double_well_integral: size mismatch");
  return integrate(mesh, [&](const Triangle& tri, const std::array<double, 3>& l) {
    return well(interpolate(f, tri, l));
  });
}

double field_energy(const Mesh& mesh, const SparseMatrix& stiffness, std::span<const double> f,
                    double eps) {
  return 0.5 * eps * eps * dot(f, stiffness.multiply(f)) + double_well_integral(mesh, f);
}

EnergyEvaluator::EnergyEvaluator(const Mesh& mesh, SparseMatrix mass, SparseMatrix stiffness,
                                 SolveOptions options)
    : mesh_(mesh),
      mass_(std::move(mass)),
      stiffness_(std::move(stiffness)),
      options_(options) {
  const std::size_t n = mesh_.num_vertices();
  if (mass_.rows() != n || stiffness_.rows() != n)
    throw std::invalid_argument("EnergyEvaluator: matrices do not match the mesh");
  m_ = mass_.multiply(Vector(n, 1.0));
  area_ = 0.0;
  for (double x : m_) area_ += x;

  // Bordered matrix [K m; m^T 0].
  const auto& kp = stiffness_.pattern();
  std::vector<std::vector<std::size_t>> rows(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].assign(kp.columns.begin() + static_cast<std::ptrdiff_t>(kp.row_offsets[i]),
                   kp.columns.begin() + static_cast<std::ptrdiff_t>(kp.row_offsets[i + 1]));
    rows[i].push_back(n);
    rows[n].push_back(i);
  }
  SparseMatrix bordered(make_pattern(n + 1, std::move(rows)));
  const auto kv = stiffness_.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = kp.row_offsets[i]; k < kp.row_offsets[i + 1]; ++k)
      bordered.add(i, kp.columns[k], kv[k]);
    bordered.add(i, n, m_[i]);
    bordered.add(n, i, m_[i]);
  }
  bordered_.factorize(bordered);
}

Vector EnergyEvaluator::inverse_laplacian(std::span<const double> v, double v_bar,
                                          double* projection) const {
  const std::size_t n = mesh_.num_vertices();
  if (v.size() != n) throw std::invalid_argument("inverse_laplacian: size mismatch");
  Vector shifted(v.begin(), v.end());
  for (double& x : shifted) x -= v_bar;
  Vector rhs = mass_.multiply(shifted);
  double excess = 0.0;
  for (double x : rhs) excess += x;
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= excess / area_ * m_[i];
  if (projection) *projection = excess;
  rhs.push_back(0.0);
  Vector psi = bordered_.solve(rhs, options_);
  psi.pop_back();
  return psi;
}

Energy EnergyEvaluator::evaluate(const State& state, const Params& params) const {
  Energy e;
  e.gradient = 0.5 * params.eps_u * params.eps_u * dot(state.u, stiffness_.multiply(state.u)) +
               0.5 * params.eps_v * params.eps_v * dot(state.v, stiffness_.multiply(state.v));
  e.potential = local_potential(mesh_, state.u, state.v, params.alpha, params.beta);
  if (params.sigma != 0.0) {
    const Vector psi = inverse_laplacian(state.v, params.v_bar, &e.projection);
    e.nonlocal = 0.5 * params.sigma * dot(psi, stiffness_.multiply(psi));
  } else {
    e.projection = mass(mass_, state.v) - params.v_bar * area_;
  }
  e.total = e.gradient + e.potential + e.nonlocal;
  return e;
}

Energy energy(const State& state, const Params& params, const Mesh& mesh, const SparseMatrix& mass,
              const SparseMatrix& stiffness) {
  return EnergyEvaluator(mesh, mass, stiffness, {params.solver_tol, params.solver_max_iter})
      .evaluate(state, params);
}

TimeSeriesRecord make_record(const State& state, const Params& params,
                             const EnergyEvaluator& evaluator) {
  TimeSeriesRecord r;
  r.t = state.t;
  r.mass_u = mass(evaluator.mass_matrix(), state.u);
  r.mass_v = mass(evaluator.mass_matrix(), state.v);
  const Energy e = evaluator.evaluate(state, params);
  r.energy = e.total;
  r.energy_nonlocal = e.nonlocal;
  const auto [u_lo, u_hi] = std::minmax_element(state.u.begin(), state.u.end());
  const auto [v_lo, v_hi] = std::minmax_element(state.v.begin(), state.v.end());
  r.u_min = *u_lo;
  r.u_max = *u_hi;
  r.v_min = *v_lo;
  r.v_max = *v_hi;
  return r;
}

}  // namespace chblend
