#pragma once

// Dense reference implementations used as test oracles. They are written
// from the model equations directly and share no code with the library
// beyond the mesh, the state layout and the parameter struct.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "chblend/mesh.hpp"
#include "chblend/model.hpp"

namespace oracle {

struct Dense {
  std::size_t n = 0;
  std::vector<double> a;

  explicit Dense(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  std::vector<double> operator*(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += a[i * n + j] * x[j];
    return y;
  }
};

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense m, std::vector<double> b) {
  const std::size_t n = m.n;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) throw std::runtime_error("singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

struct Tri {
  double area;
  double gx[3], gy[3];
};

inline Tri tri(const chblend::Point& p0, const chblend::Point& p1, const chblend::Point& p2) {
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  Tri t{};
  t.area = 0.5 * det;
  const chblend::Point p[3] = {p0, p1, p2};
  for (int i = 0; i < 3; ++i) {
    const auto& b = p[(i + 1) % 3];
    const auto& c = p[(i + 2) % 3];
    t.gx[i] = (b.y - c.y) / det;
    t.gy[i] = (c.x - b.x) / det;
  }
  return t;
}

/// int lambda_i lambda_j lambda_k over a triangle of area A.
inline double triple(double area, int i, int j, int k) {
  if (i == j && j == k) return area / 10.0;
  if (i == j || j == k || i == k) return area / 30.0;
  return area / 60.0;
}

enum class Kind { Mass, Stiffness, Weighted };

inline Dense assemble(const chblend::Mesh& mesh, Kind kind, const std::vector<double>& c = {}) {
  Dense m(mesh.num_vertices());
  for (const auto& t : mesh.triangles()) {
    const auto& v = mesh.vertices();
    const Tri g = tri(v[t[0]], v[t[1]], v[t[2]]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double val = 0.0;
        switch (kind) {
          case Kind::Mass:
            val = g.area / 12.0 * (i == j ? 2.0 : 1.0);
            break;
          case Kind::Stiffness:
            val = g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
            break;
          case Kind::Weighted:
            for (int k = 0; k < 3; ++k) val += c[t[k]] * triple(g.area, i, j, k);
            break;
        }
        m(t[i], t[j]) += val;
      }
    }
  }
  return m;
}

/// phi(x_new) ~ a x_new + g nodewise.
inline void linearization(chblend::SchemeKind kind, double p, double& a, double& g) {
  switch (kind) {
    case chblend::SchemeKind::OD2:
      a = -1.5 * p * p + 0.5;
      g = 0.5 * p * p * p + 0.5 * p;
      return;
    case chblend::SchemeKind::EY:
      a = -2.0;
      g = -p * p * p + 3.0 * p;
      return;
    case chblend::SchemeKind::LS:
      a = (1.0 - p) * (1.0 + p);
      g = 0.0;
      return;
    case chblend::SchemeKind::WVV:
      if (p < -1.0) {
        a = 3.0;
        g = -p - 2.0;
      } else if (p > 1.0) {
        a = 3.0;
        g = -p + 2.0;
      } else {
        a = 3.0 + 1.5 * (1.0 - p * p);
        g = 0.5 * p + 0.5 * p * p * p;
      }
      return;
  }
}

struct System {
  Dense a;
  std::vector<double> b;
};

/// The full 4N system of one step in unknowns (u, w_u, v, w_v).
inline System step_system(const chblend::Mesh& mesh, const chblend::Params& p,
                          const chblend::State& s) {
  const std::size_t n = mesh.num_vertices();
  const Dense m = assemble(mesh, Kind::Mass);
  const Dense k = assemble(mesh, Kind::Stiffness);
  std::vector<double> au(n), gu(n), av(n), gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    linearization(p.scheme, s.u[i], au[i], gu[i]);
    linearization(p.scheme, s.v[i], av[i], gv[i]);
  }
  const Dense mau = assemble(mesh, Kind::Weighted, au);
  const Dense mav = assemble(mesh, Kind::Weighted, av);
  const Dense mu = assemble(mesh, Kind::Weighted, s.u);
  const Dense mv = assemble(mesh, Kind::Weighted, s.v);

  const bool wvv = p.scheme == chblend::SchemeKind::WVV;
  const double ciu = wvv ? p.eps_u * p.eps_u / 2 + p.stab : p.eps_u * p.eps_u;
  const double ceu = wvv ? p.eps_u * p.eps_u / 2 - p.stab : 0.0;
  const double civ = wvv ? p.eps_v * p.eps_v / 2 + p.stab : p.eps_v * p.eps_v;
  const double cev = wvv ? p.eps_v * p.eps_v / 2 - p.stab : 0.0;

  System sys{Dense(4 * n), std::vector<double>(4 * n, 0.0)};
  auto& A = sys.a;
  auto& b = sys.b;
  const std::size_t U = 0, WU = n, V = 2 * n, WV = 3 * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      A(U + i, U + j) = p.tau_u / p.dt * m(i, j);
      A(U + i, WU + j) = -k(i, j);
      A(WU + i, WU + j) = m(i, j);
      A(WU + i, U + j) = ciu * k(i, j) - mau(i, j);
      A(WU + i, V + j) = p.alpha * m(i, j) + p.beta * mv(i, j);
      A(V + i, V + j) = (p.tau_v / p.dt + p.sigma) * m(i, j);
      A(V + i, WV + j) = -k(i, j);
      A(WV + i, WV + j) = m(i, j);
      A(WV + i, U + j) = p.alpha * m(i, j);
      A(WV + i, V + j) = civ * k(i, j) - mav(i, j) + 2.0 * p.beta * mu(i, j);

      b[U + i] += p.tau_u / p.dt * m(i, j) * s.u[j];
      b[WU + i] += m(i, j) * gu[j] - ceu * k(i, j) * s.u[j];
      b[V + i] += p.tau_v / p.dt * m(i, j) * s.v[j] + p.sigma * p.v_bar * m(i, j);
      b[WV + i] += m(i, j) * gv[j] - cev * k(i, j) * s.v[j];
    }
  }
  return sys;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace oracle
