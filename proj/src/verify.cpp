#include "chblend/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "chblend/assembly.hpp"
#include "chblend/diagnostics.hpp"
#include "chblend/errors.hpp"
#include "chblend/expr.hpp"
#include "chblend/mesh.hpp"
#include "chblend/schemes.hpp"
#include "chblend/stepper.hpp"

namespace chblend {

namespace {

using Local = std::array<std::array<double, 3>, 3>;

constexpr SchemeKind kAllSchemes[] = {SchemeKind::OD2, SchemeKind::WVV, SchemeKind::EY,
                                      SchemeKind::LS};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_diff(const Local& a, const Local& b) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

Mesh unit_mesh(std::size_t n) { return build_structured({0.0, 1.0, 0.0, 1.0}, n, n); }

class Suite {
 public:
  Suite(const VerifyOptions& options, const std::function<void(const CheckResult&)>& sink)
      : options_(options), sink_(sink) {}

  template <typename Fn>
  void check(std::string name, Fn&& fn) {
    CheckResult r{std::move(name), false, {}};
    try {
      r.passed = fn(r.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (sink_) sink_(r);
    results_.push_back(std::move(r));
  }

  bool faulty() const { return options_.fault == InjectedFault::FlipStiffnessSign; }

  SparseMatrix stiffness(const Mesh& mesh) const {
    SparseMatrix k = stiffness_matrix(mesh);
    if (faulty()) k.scale(-1.0);
    return k;
  }

  Local local_stiffness(const ElementGeometry& geo) const {
    Local k = Assembler::local_stiffness(geo);
    if (faulty())
      for (auto& row : k)
        for (auto& v : row) v = -v;
    return k;
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  VerifyOptions options_;
  std::function<void(const CheckResult&)> sink_;
  std::vector<CheckResult> results_;
};

/// Default parameters with v_bar away from the initial mean. WVV grows
/// by a factor of about 30 per step at dt = 5e-3, so it runs at dt = 1e-4
/// where 50 steps stay bounded.
Params invariant_params(SchemeKind scheme) {
  Params p;
  p.scheme = scheme;
  p.v_bar = 0.2;
  if (scheme == SchemeKind::WVV) p.dt = 1e-4;
  p.t_end = 50 * p.dt;
  p.blowup_threshold = std::numeric_limits<double>::infinity();
  return p;
}

struct Drift {
  double u_ratio = 0.0;  // worst |drift| / (100 tol ||u||)
  double v_ratio = 0.0;
  std::size_t steps = 0;
};

Drift mass_drift(const Mesh& mesh, const Params& p, std::size_t steps) {
  Stepper stepper(mesh, p);
  const auto& m = stepper.mass();
  State s = initialize(mesh, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
  const double r = p.tau_v / (p.tau_v + p.dt * p.sigma);
  const double inflow = p.dt * p.sigma * mesh.area() * p.v_bar / (p.tau_v + p.dt * p.sigma);
  Drift d;
  for (std::size_t k = 0; k < steps; ++k) {
    State next = stepper.step(s);
    const double bound_u = 100.0 * p.solver_tol * norm2(next.u);
    const double bound_v = 100.0 * p.solver_tol * norm2(next.v);
    const double du = std::abs(mass(m, next.u) - mass(m, s.u));
    const double dv = std::abs(mass(m, next.v) - (r * mass(m, s.v) + inflow));
    d.u_ratio = std::max(d.u_ratio, du / bound_u);
    d.v_ratio = std::max(d.v_ratio, dv / bound_v);
    ++d.steps;
    s = std::move(next);
  }
  return d;
}

void mesh_checks(Suite& suite) {
  suite.check("mesh.structured_counts", [](std::string& detail) {
    const Mesh a = unit_mesh(20);
    const Mesh b = build_structured({0.0, 2.0, 0.0, 1.0}, 2, 1);
    detail = std::to_string(a.num_vertices()) + " vertices, " +
             std::to_string(a.num_triangles()) + " triangles";
    return a.num_vertices() == 441 && a.num_triangles() == 800 && b.num_vertices() == 6 &&
           b.num_triangles() == 4 && std::abs(b.h() - std::sqrt(2.0)) < 1e-14;
  });
  suite.check("mesh.area_and_orientation", [](std::string& detail) {
    const Mesh mesh = unit_mesh(7);
    double total = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto g = element_geometry(mesh, t);
      total += g.area;
      smallest = std::min(smallest, g.area);
      for (int c = 0; c < 2; ++c)
        if (std::abs(g.grad[0][c] + g.grad[1][c] + g.grad[2][c]) > 1e-12) return false;
    }
    detail = "area sum " + sci(total);
    return smallest > 0.0 && std::abs(total - 1.0) <= 1e-12;
  });
}

void assembly_checks(Suite& suite, std::size_t n) {
  const std::string tag = "[" + std::to_string(n) + "x" + std::to_string(n) + "]";

  suite.check("assembly.local_mass", [](std::string& detail) {
    const double area = 0.5;
    Local expected{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) expected[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    const double d = max_diff(Assembler::local_mass(area), expected);
    detail = "max diff " + sci(d);
    return d <= 1e-14;
  });
  suite.check("assembly.local_stiffness", [&suite](std::string& detail) {
    const auto geo = triangle_geometry({0, 0}, {1, 0}, {0, 1});
    const Local expected{{{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}}};
    const double d = max_diff(suite.local_stiffness(geo), expected);
    detail = "max diff " + sci(d);
    return d <= 1e-14;
  });
  suite.check("assembly.local_weighted_mass", [](std::string& detail) {
    const double area = 0.5;
    const double s = area / 60.0;
    const Local expected{{{6 * s, 2 * s, 2 * s}, {2 * s, 2 * s, s}, {2 * s, s, 2 * s}}};
    const double d = max_diff(Assembler::local_weighted_mass(area, {1.0, 0.0, 0.0}), expected);
    detail = "max diff " + sci(d);
    return d <= 1e-14;
  });

  const Mesh mesh = unit_mesh(n);
  suite.check("assembly.mass_total " + tag, [&](std::string& detail) {
    const double total = mass_matrix(mesh).sum();
    detail = "sum " + sci(total);
    return std::abs(total - mesh.area()) <= 1e-12 * mesh.area();
  });
  suite.check("assembly.stiffness_kernel " + tag, [&](std::string& detail) {
    const double r = norm_inf(suite.stiffness(mesh).multiply(Vector(mesh.num_vertices(), 1.0)));
    detail = "|K1| " + sci(r);
    return r <= 1e-12;
  });
  suite.check("assembly.stiffness_semidefinite " + tag, [&](std::string& detail) {
    const SparseMatrix k = suite.stiffness(mesh);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(mesh.num_vertices());
      for (auto& xi : x) xi = dist(rng);
      worst = std::min(worst, dot(x, k.multiply(x)));
    }
    detail = "min x'Kx " + sci(worst);
    return worst >= -1e-12;
  });
  suite.check("assembly.symmetry " + tag, [&](std::string& detail) {
    Vector c(mesh.num_vertices());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sin(1.0 + 3.0 * static_cast<double>(i));
    const double a = std::max({mass_matrix(mesh).asymmetry(), suite.stiffness(mesh).asymmetry(),
                               weighted_mass_matrix(mesh, c).asymmetry()});
    detail = "max asymmetry " + sci(a);
    return a == 0.0;
  });
  suite.check("assembly.weighted_mass_linearity " + tag, [&](std::string& detail) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const std::size_t nv = mesh.num_vertices();
    Vector c1(nv), c2(nv), mix(nv);
    for (auto& v : c1) v = dist(rng);
    for (auto& v : c2) v = dist(rng);
    const double a = 1.7, b = -0.3;
    for (std::size_t i = 0; i < nv; ++i) mix[i] = a * c1[i] + b * c2[i];
    SparseMatrix lhs = weighted_mass_matrix(mesh, mix);
    lhs.add_scaled(weighted_mass_matrix(mesh, c1), -a).add_scaled(weighted_mass_matrix(mesh, c2), -b);
    double d = 0.0;
    for (double v : lhs.values()) d = std::max(d, std::abs(v));
    Vector ones(nv, 1.0);
    SparseMatrix unit = weighted_mass_matrix(mesh, ones);
    unit.add_scaled(mass_matrix(mesh), -1.0);
    double u = 0.0;
    for (double v : unit.values()) u = std::max(u, std::abs(v));
    detail = "linearity " + sci(d) + ", unit weight " + sci(u);
    return d <= 1e-12 && u <= 1e-14;
  });
}

void scheme_checks(Suite& suite) {
  suite.check("schemes.fixed_point", [](std::string& detail) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    double worst = 0.0, worst_wvv = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double p = dist(rng);
      for (SchemeKind kind : {SchemeKind::OD2, SchemeKind::EY, SchemeKind::LS}) {
        const auto c = linearize_at(kind, p);
        worst = std::max(worst, std::abs(c.a * p + c.g - (p - p * p * p)));
      }
      const double q = std::clamp(p, -1.0, 1.0);
      const auto c = linearize_at(SchemeKind::WVV, q);
      worst_wvv = std::max(worst_wvv, std::abs(c.a * q + c.g - (5.0 * q - q * q * q)));
    }
    detail = "od2/ey/ls " + sci(worst) + ", wvv " + sci(worst_wvv);
    return worst <= 1e-13 && worst_wvv <= 1e-13;
  });
  suite.check("schemes.wvv_branch_continuity", [](std::string& detail) {
    double jump = 0.0;
    for (double edge : {-1.0, 1.0}) {
      const auto in = linearize_at(SchemeKind::WVV, edge);
      const auto out = linearize_at(SchemeKind::WVV, std::nextafter(edge, 2.0 * edge));
      jump = std::max({jump, std::abs(in.a - out.a), std::abs(in.g - out.g)});
    }
    detail = "max jump " + sci(jump);
    return jump <= 1e-12;
  });
  suite.check("schemes.gradient_split", [](std::string& detail) {
    const auto od2 = gradient_split(SchemeKind::OD2, 0.05, 0.3);
    const auto wvv = gradient_split(SchemeKind::WVV, 0.05, 0.01);
    detail = "wvv " + sci(wvv.c_implicit) + " / " + sci(wvv.c_explicit);
    return std::abs(od2.c_implicit - 0.0025) < 1e-15 && od2.c_explicit == 0.0 &&
           std::abs(wvv.c_implicit - 0.01125) < 1e-15 &&
           std::abs(wvv.c_explicit + 0.00875) < 1e-15;
  });
}

void diagnostics_checks(Suite& suite) {
  suite.check("diagnostics.potential_constants", [](std::string& detail) {
    const Mesh mesh = unit_mesh(4);
    const std::size_t n = mesh.num_vertices();
    const Vector zero(n, 0.0), one(n, 1.0);
    const double w00 = local_potential(mesh, zero, zero, 0.5, 0.8);
    const double w11 = local_potential(mesh, one, one, 0.5, 0.8);
    const double w01 = local_potential(mesh, zero, one, 0.5, 0.8);
    detail = "W(0,0) " + sci(w00) + ", W(1,1) " + sci(w11);
    return std::abs(w00 - 0.5) < 1e-13 && std::abs(w11 - 1.3) < 1e-13 &&
           std::abs(w01 - 0.25) < 1e-13;
  });
  suite.check("diagnostics.nonlocal_nonnegative", [](std::string& detail) {
    const Mesh mesh = unit_mesh(6);
    const EnergyEvaluator ev(mesh, mass_matrix(mesh), stiffness_matrix(mesh));
    Params p;
    p.v_bar = 0.6;
    State s = initialize(mesh, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
    const Energy e = ev.evaluate(s, p);
    s.v.assign(s.v.size(), 0.6);
    const Energy flat = ev.evaluate(s, p);
    detail = "nonlocal " + sci(e.nonlocal) + ", at v=v_bar " + sci(flat.nonlocal);
    return e.nonlocal >= 0.0 && std::abs(flat.nonlocal) <= 1e-14;
  });
}

void stepper_checks(Suite& suite, std::size_t n, std::size_t steps) {
  const std::string tag =
      "[" + std::to_string(n) + "x" + std::to_string(n) + ", " + std::to_string(steps) + " steps]";
  const Mesh mesh = unit_mesh(n);
  for (SchemeKind kind : kAllSchemes) {
    suite.check("stepper.mass_invariants." + to_string(kind) + " " + tag,
                [&](std::string& detail) {
                  const Drift d = mass_drift(mesh, invariant_params(kind), steps);
                  detail = "u drift/bound " + sci(d.u_ratio) + ", v recurrence/bound " +
                           sci(d.v_ratio);
                  return d.steps == steps && d.u_ratio <= 1.0 && d.v_ratio <= 1.0;
                });
  }
  suite.check("stepper.zero_fixed_point " + tag, [&](std::string& detail) {
    double peak = 0.0;
    for (SchemeKind kind : {SchemeKind::OD2, SchemeKind::EY, SchemeKind::LS}) {
      Params p = invariant_params(kind);
      p.v_bar = 0.0;
      Stepper stepper(mesh, p);
      State s = initialize(mesh, Expr::parse("0"), Expr::parse("0"));
      for (std::size_t k = 0; k < 5; ++k) s = stepper.step(s);
      for (const auto* f : {&s.u, &s.w_u, &s.v, &s.w_v}) peak = std::max(peak, norm_inf(*f));
    }
    detail = "max |field| " + sci(peak);
    return peak == 0.0;
  });
  suite.check("stepper.decoupling " + tag, [&](std::string& detail) {
    Params p = invariant_params(SchemeKind::OD2);
    p.alpha = 0.0;
    p.beta = 0.0;
    const Expr u0 = Expr::parse("sin(10*x*y)");
    Stepper a(mesh, p), b(mesh, p);
    State sa = initialize(mesh, u0, Expr::parse("cos(10*(x-y))*x*y"));
    State sb = initialize(mesh, u0, Expr::parse("0.3*sin(7*x)"));
    for (std::size_t k = 0; k < steps; ++k) {
      sa = a.step(sa);
      sb = b.step(sb);
    }
    double d = 0.0;
    for (std::size_t i = 0; i < sa.u.size(); ++i) d = std::max(d, std::abs(sa.u[i] - sb.u[i]));
    detail = "max |u_a - u_b| " + sci(d);
    return d <= 1e-8;
  });
}

void energy_decay_check(Suite& suite) {
  suite.check("stepper.od2_energy_decay [20x20, 200 steps]", [](std::string& detail) {
    const Mesh mesh = unit_mesh(20);
    Params p;
    p.scheme = SchemeKind::OD2;
    p.alpha = 0.0;
    p.beta = 0.0;
    p.sigma = 0.0;
    p.eps_u = 0.05;
    p.dt = 5e-3;
    p.t_end = 200 * p.dt;
    Stepper stepper(mesh, p);
    State s = initialize(mesh, Expr::parse("sin(10*x*y)"), Expr::parse("cos(10*(x-y))*x*y"));
    double prev = field_energy(mesh, stepper.stiffness(), s.u, p.eps_u);
    const double first = prev;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
      s = stepper.step(s);
      const double e = field_energy(mesh, stepper.stiffness(), s.u, p.eps_u);
      worst = std::max(worst, e - prev);
      prev = e;
    }
    detail = "energy " + sci(first) + " -> " + sci(prev) + ", max increase " + sci(worst);
    return worst <= 1e-8;
  });
}

}  // namespace

VerifyLevel parse_verify_level(std::string_view name) {
  if (name == "quick") return VerifyLevel::Quick;
  if (name == "full") return VerifyLevel::Full;
  throw std::invalid_argument("unknown verify level '" + std::string(name) + "' (quick|full)");
}

InjectedFault parse_injected_fault(std::string_view name) {
  if (name.empty() || name == "none") return InjectedFault::None;
  if (name == "flip_stiffness_sign") return InjectedFault::FlipStiffnessSign;
  throw std::invalid_argument("unknown fault '" + std::string(name) +
                              "' (none|flip_stiffness_sign)");
}

std::vector<CheckResult> run_verification(const VerifyOptions& options,
                                          const std::function<void(const CheckResult&)>& on_result) {
  Suite suite(options, on_result);
  mesh_checks(suite);
  assembly_checks(suite, 4);
  scheme_checks(suite);
  diagnostics_checks(suite);
  stepper_checks(suite, 4, 20);
  if (options.level == VerifyLevel::Full) {
    assembly_checks(suite, 20);
    stepper_checks(suite, 20, 50);
    energy_decay_check(suite);
  }
  return suite.take();
}

}  // namespace chblend
